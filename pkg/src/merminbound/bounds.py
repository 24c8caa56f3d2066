"""
Mermin / MABK Bell operators and the singular-value upper bound on their
maximal quantum expectation.

For an n-qubit state the bound is ``2*sqrt(2)*lambda_max`` where
``lambda_max`` is the largest singular value of the full-correlation tensor
``T[i1..in] = Lambda[i1..in]`` (all indices in 1..3) reshaped into a
``3**k x 3**(n-k)`` matrix, ``k = n // 2`` unless overridden.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .linalg import jacobi_svd
from .qstate import SIGMA, CorrelationData, DensityMatrix, correlation_data

SQRT2 = math.sqrt(2.0)
UNIT_TOL = 1e-12
DEGENERACY_RTOL = 1e-9
CERTIFY_TOL = 1e-6
VIOLATION_TOL = 1e-9
DECOMPOSITION_TOL = 1e-8


class ConsistencyError(RuntimeError):
    """The numerical oracle exceeded the analytical bound."""


# ---------------------------------------------------------------------------
# measurement settings


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """Per-party pairs of unit vectors, stored as an array of shape ``(n, 2, 3)``.

    ``vectors[j, 0]`` is the unprimed and ``vectors[j, 1]`` the primed
    direction of party ``j``.
    """

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 3 or v.shape[1:] != (2, 3) or v.shape[0] < 1:
            raise ValueError(f"settings must have shape (n, 2, 3), got {v.shape}")
        norms = np.linalg.norm(v, axis=2)
        bad = np.max(np.abs(norms**2 - 1))
        if bad > UNIT_TOL:
            raise ValueError(f"measurement directions must be unit vectors (|x|^2 off by {bad:.3g})")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def pairs(self):
        return [(self.vectors[j, 0], self.vectors[j, 1]) for j in range(self.n)]

    @classmethod
    def from_pairs(cls, pairs) -> "MeasurementSettings":
        return cls(np.array([[np.asarray(v, float), np.asarray(vp, float)] for v, vp in pairs]))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "MeasurementSettings":
        g = rng.standard_normal((n, 2, 3))
        return cls(g / np.linalg.norm(g, axis=2, keepdims=True))

    def to_json(self) -> list:
        return [{"v": p[0].tolist(), "vPrime": p[1].tolist()} for p in self.vectors]

    @classmethod
    def from_json(cls, doc) -> "MeasurementSettings":
        return cls.from_pairs([(d["v"], d["vPrime"]) for d in doc])


def spin(v) -> np.ndarray:
    """``v . sigma`` for a real 3-vector."""
    v = np.asarray(v, dtype=float)
    return np.tensordot(v, SIGMA[1:], axes=1)


# ---------------------------------------------------------------------------
# operators


def mermin_operator(settings: MeasurementSettings) -> np.ndarray:
    """Three-party Mermin operator ``ABC' + AB'C + A'BC - A'B'C'``."""
    if settings.n != 3:
        raise ValueError(f"the Mermin operator needs exactly 3 parties, got {settings.n}")
    (a, ap), (b, bp), (c, cp) = [(spin(v), spin(w)) for v, w in settings.pairs()]
    kron3 = lambda x, y, z: np.kron(np.kron(x, y), z)  # noqa: E731
    return kron3(a, b, cp) + kron3(a, bp, c) + kron3(ap, b, c) - kron3(ap, bp, cp)


def mabk_operator(settings: MeasurementSettings) -> np.ndarray:
    """MABK operator from the recursion

        B_n = B_{n-1} (x) (A_n + A_n')/2 + B'_{n-1} (x) (A_n - A_n')/2

    seeded with the CHSH operator ``A (x) (B + B') + A' (x) (B - B')``.
    ``B'`` denotes ``B`` with every primed/unprimed pair swapped.
    """
    n = settings.n
    if n < 2:
        raise ValueError(f"MABK operators need at least 2 parties, got {n}")
    ops = [(spin(v), spin(w)) for v, w in settings.pairs()]
    (a, ap), (b, bp) = ops[0], ops[1]
    cur = np.kron(a, b + bp) + np.kron(ap, b - bp)
    swp = np.kron(ap, bp + b) + np.kron(a, bp - b)
    for x, xp in ops[2:]:
        cur, swp = (
            np.kron(cur, (x + xp) / 2) + np.kron(swp, (x - xp) / 2),
            np.kron(swp, (xp + x) / 2) + np.kron(cur, (xp - x) / 2),
        )
    return cur


def mabk4_explicit_operator(settings: MeasurementSettings) -> np.ndarray:
    """Closed four-party form

        (AB - A'B') (x) [C' D+ - C D-] + (AB' + A'B) (x) [C D+ + C' D-]

    with ``D+ = (D + D')/2`` and ``D- = (D - D')/2``.
    """
    if settings.n != 4:
        raise ValueError(f"expected 4 parties, got {settings.n}")
    (a, ap), (b, bp), (c, cp), (d, dp) = [(spin(v), spin(w)) for v, w in settings.pairs()]
    dplus, dminus = (d + dp) / 2, (d - dp) / 2
    left1 = np.kron(a, b) - np.kron(ap, bp)
    left2 = np.kron(a, bp) + np.kron(ap, b)
    right1 = np.kron(cp, dplus) - np.kron(c, dminus)
    right2 = np.kron(c, dplus) + np.kron(cp, dminus)
    return np.kron(left1, right1) + np.kron(left2, right2)


def bell_operator(settings: MeasurementSettings, family: str = "mabk") -> np.ndarray:
    if family == "mermin":
        return mermin_operator(settings)
    if family == "mabk":
        return mabk_operator(settings)
    raise ValueError(f"unknown operator family {family!r}")


def mermin_coefficients() -> np.ndarray:
    """Coefficient tensor ``C[c1, c2, c3]`` (0 = unprimed, 1 = primed) of the Mermin operator."""
    c = np.zeros((2, 2, 2))
    c[0, 0, 1] = c[0, 1, 0] = c[1, 0, 0] = 1.0
    c[1, 1, 1] = -1.0
    return c


def mabk_coefficients(n: int) -> np.ndarray:
    """Coefficient tensor of the MABK operator: ``B_n = sum_c C[c] A_1^(c1) ... A_n^(cn)``."""
    if n < 2:
        raise ValueError(f"MABK operators need at least 2 parties, got {n}")
    cur = np.array([[1.0, 1.0], [1.0, -1.0]])
    for _ in range(n - 2):
        swp = np.flip(cur)  # swapping every prime flips each axis
        cur = np.stack([(cur + swp) / 2, (cur - swp) / 2], axis=-1)
    return cur


def operator_coefficients(n: int, family: str = "mabk") -> np.ndarray:
    if family == "mermin":
        if n != 3:
            raise ValueError(f"the Mermin operator needs exactly 3 parties, got {n}")
        return mermin_coefficients()
    if family == "mabk":
        return mabk_coefficients(n)
    raise ValueError(f"unknown operator family {family!r}")


def default_family(n: int) -> str:
    return "mermin" if n == 3 else "mabk"


# ---------------------------------------------------------------------------
# expectation values


def expectation(op: np.ndarray, rho: DensityMatrix) -> float:
    """``Tr[op rho]`` for a Hermitian operator."""
    op = np.asarray(op)
    if op.shape != rho.matrix.shape:
        raise ValueError(f"operator shape {op.shape} does not match state shape {rho.matrix.shape}")
    val = np.einsum("ij,ji->", op, rho.matrix)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3g}; operator is not Hermitian")
    return float(val.real)


def contracted_expectation(corr: CorrelationData, settings: MeasurementSettings) -> float:
    """Expectation of the Bell operator evaluated on the correlation tensor alone.

    n = 2:  a.T T (b + b') + a'.T T (b - b')
    n = 3:  a.T T (b (x) c' + b' (x) c) + a'.T T (b (x) c - b' (x) c')
    n = 4:  (a(x)b - a'(x)b').T T (c'(x)d+ - c(x)d-) + (a(x)b' + a'(x)b).T T (c(x)d+ + c'(x)d-)
    """
    n = corr.n
    if settings.n != n:
        raise ValueError(f"{settings.n} setting pairs for a {n}-qubit state")
    full = corr.full_correlations
    p = settings.pairs()
    if n == 2:
        (a, ap), (b, bp) = p
        return float(a @ full @ (b + bp) + ap @ full @ (b - bp))
    if n == 3:
        (a, ap), (b, bp), (c, cp) = p
        t = full.reshape(3, 9)
        y1 = np.kron(b, cp) + np.kron(bp, c)
        y2 = np.kron(b, c) - np.kron(bp, cp)
        return float(a @ t @ y1 + ap @ t @ y2)
    if n == 4:
        (a, ap), (b, bp), (c, cp), (d, dp) = p
        t = full.reshape(9, 9)
        dplus, dminus = (d + dp) / 2, (d - dp) / 2
        x1 = np.kron(a, b) - np.kron(ap, bp)
        x2 = np.kron(a, bp) + np.kron(ap, b)
        y1 = np.kron(cp, dplus) - np.kron(c, dminus)
        y2 = np.kron(c, dplus) + np.kron(cp, dminus)
        return float(x1 @ t @ y1 + x2 @ t @ y2)
    raise ValueError(f"contracted expectation is implemented for n in (2, 3, 4), got {n}")


# ---------------------------------------------------------------------------
# reshaped tensor and its spectrum


@dataclass(frozen=True, eq=False)
class ReshapedCorrelation:
    """Full-correlation tensor as a ``3**split x 3**(n - split)`` matrix."""

    matrix: np.ndarray
    n: int
    split: int

    @property
    def shape(self):
        return self.matrix.shape


def reshape_tensor(corr: CorrelationData, split: Optional[int] = None) -> ReshapedCorrelation:
    """Rows index the first ``split`` parties (default ``n // 2``), big-endian."""
    n = corr.n
    if n < 2:
        raise ValueError("reshaping needs at least two parties")
    k = n // 2 if split is None else int(split)
    if not 1 <= k <= n - 1:
        raise ValueError(f"split must be in 1..{n - 1}, got {k}")
    m = np.ascontiguousarray(corr.full_correlations).reshape(3**k, 3 ** (n - k))
    m.setflags(write=False)
    return ReshapedCorrelation(m, n, k)


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    values: np.ndarray
    left: np.ndarray  # columns are left singular vectors
    right: np.ndarray  # columns are right singular vectors
    degeneracy: int

    @property
    def lambda_max(self) -> float:
        return float(self.values[0])

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.values) @ self.right.T


def _degeneracy(values) -> int:
    top = values[0]
    return int(np.sum(top - values <= DEGENERACY_RTOL * max(top, 1e-30)))


def singular_spectrum(m) -> SingularSpectrum:
    mat = m.matrix if isinstance(m, ReshapedCorrelation) else np.asarray(m, dtype=float)
    u, s, vt = jacobi_svd(mat)
    return SingularSpectrum(s, u, vt.T, _degeneracy(s))


# ---------------------------------------------------------------------------
# reports


class Tightness(str, enum.Enum):
    CERTIFIED_TIGHT = "certified_tight"
    CERTIFIED_NOT_TIGHT = "certified_not_tight"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True, eq=False)
class BoundReport:
    n: int
    split: int
    lambda_max: float
    bound: float
    degeneracy: int
    singular_values: tuple
    classical_bound: float
    tightness: Tightness = Tightness.UNDETERMINED
    oracle_value: Optional[float] = None
    oracle_settings: Optional[MeasurementSettings] = field(default=None, repr=False)

    @property
    def violates_classical(self) -> bool:
        """Best known achievable value above the LHV bound.

        Uses the oracle value when one has been attached, the analytical
        bound otherwise.
        """
        value = self.oracle_value if self.oracle_value is not None else self.bound
        return bool(value > self.classical_bound + VIOLATION_TOL)

    def to_dict(self) -> dict:
        d = {
            "lambdaMax": self.lambda_max,
            "bound": self.bound,
            "degeneracy": self.degeneracy,
            "singularValues": [float(v) for v in self.singular_values],
            "tightness": self.tightness.value,
        }
        if self.oracle_value is not None:
            d["oracleValue"] = self.oracle_value
        d["classicalBound"] = self.classical_bound
        d["violatesClassical"] = self.violates_classical
        return d


def classical_bound(n: int, family: Optional[str] = None) -> float:
    """LHV bound of the operator, by exhaustive enumeration where feasible.

    Beyond five parties the recursion argument applies: with deterministic
    +-1 outcomes one of ``(x + x')/2`` and ``(x - x')/2`` vanishes and the
    other is +-1, so every level inherits the CHSH value 2.
    """
    from .optimizer import LHV_MAX_PARTIES, lhv_bound_by_enumeration

    family = family or default_family(n)
    if n <= LHV_MAX_PARTIES:
        return lhv_bound_by_enumeration(family, n)
    return 2.0


def analytic_bound(rho, split: Optional[int] = None) -> BoundReport:
    """``2*sqrt(2)*lambda_max`` of the reshaped correlation tensor.

    ``rho`` may be a :class:`DensityMatrix` or precomputed :class:`CorrelationData`.
    """
    corr = rho if isinstance(rho, CorrelationData) else correlation_data(rho)
    n = corr.n
    if not 2 <= n <= 8:
        raise ValueError(f"analytic bound needs 2 <= n <= 8, got {n}")
    reshaped = reshape_tensor(corr, split)
    spec = singular_spectrum(reshaped)
    lam = spec.lambda_max
    return BoundReport(
        n=n,
        split=reshaped.split,
        lambda_max=lam,
        bound=2 * SQRT2 * lam,
        degeneracy=spec.degeneracy,
        singular_values=tuple(float(v) for v in spec.values),
        classical_bound=classical_bound(n),
    )


def certify_tightness(report: BoundReport, oracle, tol: float = CERTIFY_TOL, min_restarts: int = 32) -> BoundReport:
    """Compare the bound with an oracle run on the same state and operator family.

    Raises :class:`ConsistencyError` if the oracle beats the bound by more than ``tol``.
    """
    value = float(oracle.best_value)
    if value > report.bound + tol:
        raise ConsistencyError(
            f"oracle value {value:.12g} exceeds the analytical bound {report.bound:.12g} by more than {tol:g}"
        )
    if value >= report.bound - tol:
        verdict = Tightness.CERTIFIED_TIGHT
    elif oracle.converged and len(oracle.restart_values) >= min_restarts:
        verdict = Tightness.CERTIFIED_NOT_TIGHT
    else:
        verdict = Tightness.UNDETERMINED
    return replace(report, tightness=verdict, oracle_value=value, oracle_settings=oracle.best_settings)


# ---------------------------------------------------------------------------
# decomposition of the top singular subspace


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Unit vectors ``x, x'`` (first party block) and ``y, y'`` (second block).

    ``plus_form = x (x) y' + x' (x) y`` and ``minus_form = x (x) y - x' (x) y'``
    lie in the top singular subspace.
    """

    first: tuple
    second: tuple
    plus_form: np.ndarray
    minus_form: np.ndarray
    cos_first: float
    cos_second: float
    residual: float


@dataclass(frozen=True, eq=False)
class TightnessCertificate:
    candidate_vectors: np.ndarray  # rows span the top singular subspace
    principal_angle: Optional[float] = None
    decomposition: Optional[Decomposition] = None

    @property
    def decomposed(self) -> bool:
        return self.decomposition is not None

    @property
    def saturating(self) -> bool:
        """Decomposition exists with principal angle pi/2."""
        return self.decomposed and abs(self.principal_angle - math.pi / 2) <= 1e-8

    def to_dict(self) -> dict:
        d = {"decomposed": self.decomposed, "principalAngle": self.principal_angle}
        if self.decomposition is not None:
            dec = self.decomposition
            d["first"] = [list(map(float, v)) for v in dec.first]
            d["second"] = [list(map(float, v)) for v in dec.second]
        return d


def _rank_one_in_pencil(a: np.ndarray, b: np.ndarray):
    """All ``(s, t)`` with ``s*a + t*b`` of rank <= 1, for real 3x3 ``a``, ``b``.

    Every 2x2 minor of ``s*a + t*b`` is a binary quadratic form; rank one
    means all of them share a root.
    """
    rows = []
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            for c1 in range(3):
                for c2 in range(c1 + 1, 3):
                    a11, a12, a21, a22 = a[r1, c1], a[r1, c2], a[r2, c1], a[r2, c2]
                    b11, b12, b21, b22 = b[r1, c1], b[r1, c2], b[r2, c1], b[r2, c2]
                    rows.append(
                        [
                            a11 * a22 - a12 * a21,
                            a11 * b22 + b11 * a22 - a12 * b21 - b12 * a21,
                            b11 * b22 - b12 * b21,
                        ]
                    )
    k = np.array(rows)
    _, sv, vt = np.linalg.svd(k)
    rank = int(np.sum(sv > 1e-9))
    if rank == 0:
        return [(1.0, 1j)]
    if rank == 1:
        c0, c1, c2 = vt[0]
        if abs(c0) >= abs(c2):
            return [(complex(s), 1.0) for s in np.roots([c0, c1, c2])]
        return [(1.0, complex(t)) for t in np.roots([c2, c1, c0])]
    if rank == 2:
        nu0, nu1, nu2 = vt[2]
        if abs(nu1 * nu1 - nu0 * nu2) <= 1e-8:
            return [(nu0, nu1)] if abs(nu0) >= abs(nu2) else [(nu1, nu2)]
    return []


def _rank_one_by_projection(basis: np.ndarray, starts: int = 16, iters: int = 2000):
    """Alternating projections between the complexified span and rank-one matrices."""
    rng = np.random.default_rng(0)
    k = basis.shape[1]
    found = []
    for _ in range(starts):
        w = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        z = (basis @ w).reshape(3, 3)
        for _ in range(iters):
            u, s, vh = np.linalg.svd(z)
            r1 = s[0] * np.outer(u[:, 0], vh[0])
            z = (basis @ (basis.T @ r1.reshape(-1))).reshape(3, 3)
            if s[1] <= 1e-12 * s[0]:
                break
        s = np.linalg.svd(z, compute_uv=False)
        if s[0] > 0 and s[1] <= 1e-9 * s[0]:
            found.append(z)
    return found


def _balanced(vec: np.ndarray) -> np.ndarray:
    """Rephase a complex 3-vector so its real and imaginary parts have equal norms, total norm sqrt(2)."""
    u, w = vec.real, vec.imag
    phi = 0.5 * math.atan2(u @ u - w @ w, 2 * (u @ w))
    out = vec * np.exp(1j * phi)
    return out * (SQRT2 / np.linalg.norm(out))


def _decompose_rank_one(z: np.ndarray, basis: np.ndarray) -> Decomposition:
    u, s, vh = np.linalg.svd(z)
    beta = _balanced(u[:, 0])
    gamma = _balanced(vh[0])
    if abs(beta @ beta) <= 1e-12 or abs(gamma @ gamma) <= 1e-12:
        # an isotropic factor stays balanced under any phase; use that freedom
        # to put the plus form on the first candidate vector
        z0 = np.outer(beta, gamma).reshape(-1) @ basis[:, 0]
        phase = np.exp(1j * math.atan2(z0.real, z0.imag))
        if abs(beta @ beta) <= 1e-12:
            beta = beta * phase
        else:
            gamma = gamma * phase
    x, xp = beta.real, beta.imag
    y, yp = gamma.real, gamma.imag
    if (x @ xp) * (y @ yp) < 0:
        # multiplying beta by i maps (x, x') -> (-x', x) and flips the sign of cos
        x, xp = -xp, x
    minus = np.kron(x, y) - np.kron(xp, yp)
    if basis.shape[1] > 1 and minus @ basis[:, 1] < -1e-12:
        # (x, y') -> (-x, -y') keeps the plus form and negates the minus form
        x, yp = -x, -yp
    plus = np.kron(x, yp) + np.kron(xp, y)
    minus = np.kron(x, y) - np.kron(xp, yp)
    resid = 0.0
    for f in (plus, minus):
        nf = np.linalg.norm(f)
        if nf > 1e-12:
            resid = max(resid, np.linalg.norm(f - basis @ (basis.T @ f)) / nf)
    return Decomposition((x, xp), (y, yp), plus, minus, float(x @ xp), float(y @ yp), float(resid))


def decompose_top_vectors(spectrum: SingularSpectrum, n: int) -> TightnessCertificate:
    """Look for top singular vectors of the forms ``x(x)y' + x'(x)y`` and ``x(x)y - x'(x)y'``.

    For three parties the 9-dimensional right singular vectors are examined
    (blocks b, c); for four parties the left ones (blocks a, b). A valid pair
    exists exactly when the complexified top subspace, read as 3x3 matrices,
    contains the rank-one matrix ``(x + i x')(y + i y')^T``. Among all
    solutions the one whose principal angle is closest to pi/2 is returned.
    """
    if spectrum.degeneracy < 2:
        raise ValueError(f"decomposition needs a degenerate top singular value, degeneracy is {spectrum.degeneracy}")
    if n == 3:
        vecs = spectrum.right
    elif n == 4:
        vecs = spectrum.left
    else:
        raise ValueError(f"decomposition is defined for n in (3, 4), got {n}")
    if vecs.shape[0] != 9:
        raise ValueError(f"expected 9-dimensional singular vectors, got {vecs.shape[0]}")
    k = min(spectrum.degeneracy, vecs.shape[1])
    basis = vecs[:, :k]
    candidates = basis[:, :2].T.copy()

    if spectrum.lambda_max == 0.0:
        # every vector is a top singular vector
        e = np.eye(3)
        dec = Decomposition((e[0], e[1]), (e[0], e[1]), np.kron(e[0], e[1]) + np.kron(e[1], e[0]),
                            np.kron(e[0], e[0]) - np.kron(e[1], e[1]), 0.0, 0.0, 0.0)
        return TightnessCertificate(candidates, math.pi / 2, dec)

    if k == 2:
        a, b = basis[:, 0].reshape(3, 3), basis[:, 1].reshape(3, 3)
        zs = [s * a + t * b for s, t in _rank_one_in_pencil(a, b)]
    else:
        zs = _rank_one_by_projection(basis)

    best = None
    for z in zs:
        sv = np.linalg.svd(z, compute_uv=False)
        if sv[0] == 0 or sv[1] > 1e-7 * sv[0]:
            continue
        dec = _decompose_rank_one(z, basis)
        if dec.residual > DECOMPOSITION_TOL:
            continue
        if best is None or abs(dec.cos_first * dec.cos_second) < abs(best.cos_first * best.cos_second):
            best = dec
    if best is None:
        return TightnessCertificate(candidates)
    angle = math.acos(min(1.0, max(-1.0, best.cos_first * best.cos_second)))
    return TightnessCertificate(candidates, angle, best)


def settings_from_certificate(reshaped: ReshapedCorrelation, cert: TightnessCertificate) -> MeasurementSettings:
    """Three-party settings realising ``2*lambda_max*(cos(t/2) + sin(t/2))``.

    ``b, b', c, c'`` come from the decomposition; ``a`` and ``a'`` point along
    ``T`` applied to the plus and minus forms.
    """
    if reshaped.n != 3 or reshaped.split != 1:
        raise ValueError("settings reconstruction is implemented for three parties with split 1")
    if cert.decomposition is None:
        raise ValueError("certificate carries no decomposition")
    dec = cert.decomposition
    t = reshaped.matrix

    def direction(y, fallback):
        g = t @ y
        ng = np.linalg.norm(g)
        return g / ng if ng > 1e-14 else fallback

    e = np.eye(3)
    a = direction(dec.plus_form, e[0])
    ap = direction(dec.minus_form, e[1])
    (b, bp), (c, cp) = dec.first, dec.second
    return MeasurementSettings.from_pairs([(a, ap), (b, bp), (c, cp)])
