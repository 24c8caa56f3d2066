"""One-sided (Hestenes) Jacobi SVD for small dense real matrices."""

import numpy as np

_TINY = 1e-300


def jacobi_svd(a, tol=1e-15, max_sweeps=60):
    """Thin SVD ``a = U diag(s) V^T`` by cyclic one-sided Jacobi rotations.

    Columns of the taller orientation are orthogonalized pairwise until every
    pair satisfies ``|<x_i, x_j>| <= tol * |x_i| |x_j|``. The sweep order is
    fixed, so results are deterministic.

    Parameters
    ----------
    a : array_like, shape (m, n)
    tol : float
        Relative orthogonality threshold.
    max_sweeps : int

    Returns
    -------
    u : ndarray, shape (m, k)
    s : ndarray, shape (k,)
        Singular values in descending order, ``k = min(m, n)``.
    vt : ndarray, shape (k, n)
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("jacobi_svd expects a 2-D array")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    m, n = a.shape
    flip = m < n
    b = (a.T if flip else a).copy()
    rows, p = b.shape
    v = np.eye(p)

    for _ in range(max_sweeps):
        rotated = False
        for i in range(p - 1):
            for j in range(i + 1, p):
                bi, bj = b[:, i], b[:, j]
                alpha = bi @ bi
                beta = bj @ bj
                gamma = bi @ bj
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or abs(gamma) < _TINY:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                bi_new = c * bi - s * bj
                b[:, j] = s * bi + c * bj
                b[:, i] = bi_new
                vi = v[:, i].copy()
                v[:, i] = c * vi - s * v[:, j]
                v[:, j] = s * vi + c * v[:, j]
        if not rotated:
            break

    sigma = np.linalg.norm(b, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    b = b[:, order]
    v = v[:, order]

    scale = sigma[0] if p and sigma[0] > 0 else 1.0
    u = np.zeros((rows, p))
    keep = sigma > 1e-14 * scale
    u[:, keep] = b[:, keep] / sigma[keep]
    sigma[~keep] = np.where(sigma[~keep] < _TINY, 0.0, sigma[~keep])
    u = _complete_orthonormal(u, keep)

    if flip:
        # a^T = u diag(s) v^T  =>  a = v diag(s) u^T
        return v, sigma, u.T
    return u, sigma, v.T


def _complete_orthonormal(u, keep):
    """Fill columns not in ``keep`` with unit vectors orthogonal to the rest."""
    rows, p = u.shape
    basis = [u[:, k] for k in range(p) if keep[k]]
    fill = []
    for e in np.eye(rows):
        if len(basis) + len(fill) == p:
            break
        x = e.copy()
        for _ in range(2):
            for q in basis + fill:
                x -= (q @ x) * q
        nx = np.linalg.norm(x)
        if nx > 1e-8:
            fill.append(x / nx)
    out = u.copy()
    it = iter(fill)
    for k in range(p):
        if not keep[k]:
            out[:, k] = next(it)
    return out
