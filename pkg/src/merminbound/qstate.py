"""
n-qubit density matrices, Pauli correlation tensors and the state families
used throughout the package.

A state of ``n`` qubits is expanded in the Pauli basis as

    rho = 2**-n * sum_mu Lambda[mu] sigma_mu1 (x) ... (x) sigma_mun

with ``Lambda[mu] = Tr[(sigma_mu1 (x) ... (x) sigma_mun) rho]``. Indices run
over 0..3 with 0 the identity and 1, 2, 3 the x, y, z Pauli matrices.
Multi-indices are flattened big-endian: party 1 is the most significant digit,
matching the Kronecker order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path

import numpy as np

MAX_QUBITS = 8
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
IMAG_TOL = 1e-10
CORR_TOL = 1e-10

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA.setflags(write=False)


class InvalidStateError(ValueError):
    """Raised when a matrix violates a density-matrix invariant."""


class ParameterError(ValueError):
    """Raised when family parameters fall outside their physical region."""


def pauli_string(idx) -> np.ndarray:
    """Kronecker product ``sigma_idx[0] (x) sigma_idx[1] (x) ...``.

    >>> pauli_string((3,)).real
    array([[ 1.,  0.],
           [ 0., -1.]])
    """
    idx = tuple(int(i) for i in idx)
    if not 1 <= len(idx) <= MAX_QUBITS:
        raise ValueError(f"Pauli string length must be in 1..{MAX_QUBITS}, got {len(idx)}")
    for i in idx:
        if i not in (0, 1, 2, 3):
            raise ValueError(f"Pauli index component {i} outside 0..3")
    return reduce(np.kron, (SIGMA[i] for i in idx))


def _qubit_count(dim: int) -> int:
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise InvalidStateError(f"dimension {dim} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise InvalidStateError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated, read-only ``2**n x 2**n`` density matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {m.shape}")
        _qubit_count(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("density matrix has non-finite entries")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (max deviation {herm:.3g})")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidStateError(f"trace {tr.real:.15g} differs from 1")
        lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lo < -PSD_TOL:
            raise InvalidStateError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return _qubit_count(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    @classmethod
    def from_pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        return cls(0.5 * (rho + rho.conj().T))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2**n, dtype=complex) / 2**n)

    def to_json(self) -> dict:
        return {"n": self.n, "re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "DensityMatrix":
        try:
            n = int(doc["n"])
            re = np.asarray(doc["re"], dtype=float)
            im = np.asarray(doc["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidStateError(f"malformed density matrix document: {exc}") from exc
        if not 1 <= n <= MAX_QUBITS:
            raise InvalidStateError(f"n={n} outside 1..{MAX_QUBITS}")
        shape = (2**n, 2**n)
        if re.shape != shape or im.shape != shape:
            raise InvalidStateError(f"expected {shape} arrays for n={n}, got re {re.shape}, im {im.shape}")
        return cls(re + 1j * im)


def load_density_matrix(path) -> DensityMatrix:
    """Read a ``{"n", "re", "im"}`` JSON document. I/O errors propagate as ``OSError``."""
    with open(Path(path), encoding="utf-8") as fh:
        doc = json.load(fh)
    return DensityMatrix.from_json(doc)


def save_density_matrix(rho: DensityMatrix, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(rho.to_json(), fh)


@dataclass(frozen=True, eq=False)
class CorrelationData:
    """Real Pauli correlation tensor ``Lambda`` of shape ``(4,) * n``."""

    tensor: np.ndarray

    def __post_init__(self):
        t = np.array(self.tensor, dtype=float)
        if t.ndim < 1 or t.shape != (4,) * t.ndim:
            raise ValueError(f"correlation tensor must have shape (4,)*n, got {t.shape}")
        if np.any(np.abs(t) > 1 + CORR_TOL):
            raise ValueError(f"correlation entries must lie in [-1, 1], found {np.max(np.abs(t)):.6g}")
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)

    @property
    def n(self) -> int:
        return self.tensor.ndim

    @property
    def flat(self) -> np.ndarray:
        """Entries at big-endian offsets ``sum mu_i 4**(n-i)``."""
        return self.tensor.reshape(-1)

    def __getitem__(self, idx) -> float:
        return float(self.tensor[tuple(idx)])

    @property
    def full_correlations(self) -> np.ndarray:
        """Sub-tensor with every index non-identity, shape ``(3,) * n``."""
        return self.tensor[(slice(1, None),) * self.n]

    def _require3(self):
        if self.n != 3:
            raise ValueError("Bloch-vector and pair views are defined for three qubits only")

    @property
    def bloch_a(self):
        self._require3()
        return self.tensor[1:, 0, 0]

    @property
    def bloch_b(self):
        self._require3()
        return self.tensor[0, 1:, 0]

    @property
    def bloch_c(self):
        self._require3()
        return self.tensor[0, 0, 1:]

    @property
    def pair_ab(self):
        self._require3()
        return self.tensor[1:, 1:, 0]

    @property
    def pair_ac(self):
        self._require3()
        return self.tensor[1:, 0, 1:]

    @property
    def pair_bc(self):
        self._require3()
        return self.tensor[0, 1:, 1:]

    @property
    def tripartite(self):
        """The 3x9 matrix ``T[i, 3*j + k] = Lambda[i, j, k]`` for i, j, k in 1..3."""
        self._require3()
        return self.full_correlations.reshape(3, 9)


def correlation_data(rho: DensityMatrix) -> CorrelationData:
    """Compute every ``Tr[sigma_mu rho]`` by contracting one qubit at a time."""
    n = rho.n
    t = rho.matrix.reshape((2,) * (2 * n))
    # axes (r_k..r_n, c_k..c_n, mu_1..mu_{k-1}); Tr[P rho] = sum P[c, r] rho[r, c]
    for remaining in range(n, 0, -1):
        t = np.tensordot(t, SIGMA, axes=([0, remaining], [2, 1]))
    lam = t
    worst = float(np.max(np.abs(lam.imag)))
    if worst > IMAG_TOL:
        raise InvalidStateError(f"correlation entries have imaginary part {worst:.3g}; state is not Hermitian")
    lam = lam.real
    return CorrelationData(lam)


def reconstruct(corr: CorrelationData) -> DensityMatrix:
    """Inverse of :func:`correlation_data`; raises if the result is unphysical."""
    n = corr.n
    if abs(corr.flat[0] - 1) > CORR_TOL:
        raise InvalidStateError(f"normalization entry is {corr.flat[0]!r}, expected 1")
    t = corr.tensor.astype(complex)
    # contract mu_k with SIGMA[mu][r, c], producing (r_k, c_k) pairs
    for _ in range(n):
        t = np.tensordot(t, SIGMA, axes=([0], [0]))
    # axes now (r_1, c_1, r_2, c_2, ...)
    perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    m = t.transpose(perm).reshape(2**n, 2**n) / 2**n
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m)


# ---------------------------------------------------------------------------
# state families

SQRT3 = math.sqrt(3.0)
_BOUNDARY_SLACK = 1e-12


def basis_ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def ghz_ket(n: int = 3, sign: int = 1) -> np.ndarray:
    return (basis_ket("0" * n) + sign * basis_ket("1" * n)) / math.sqrt(2)


def w_ket() -> np.ndarray:
    return (basis_ket("001") + basis_ket("010") + basis_ket("100")) / SQRT3


def _projector(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"mixing weight p={p} must satisfy 0 <= p <= 1")
    return p


def check_ghz_symmetric(ell: float, theta: float) -> None:
    """Raise :class:`ParameterError` naming the violated positivity constraint."""
    lo, hi = -1 / (4 * SQRT3), SQRT3 / 4
    if theta < lo - _BOUNDARY_SLACK:
        raise ParameterError(f"theta={theta} violates theta >= -1/(4*sqrt(3)) = {lo:.12g}")
    if theta > hi + _BOUNDARY_SLACK:
        raise ParameterError(f"theta={theta} violates theta <= sqrt(3)/4 = {hi:.12g}")
    cap = 1 / 8 + SQRT3 / 2 * theta
    if abs(ell) > cap + _BOUNDARY_SLACK:
        raise ParameterError(f"|l|={abs(ell)} violates |l| <= 1/8 + (sqrt(3)/2)*theta = {cap:.12g}")


def ghz_symmetric(ell: float, theta: float) -> DensityMatrix:
    """Two-parameter GHZ-symmetric family of three qubits."""
    ell, theta = float(ell), float(theta)
    check_ghz_symmetric(ell, theta)
    w_noise = (1 - 4 * theta / SQRT3) / 8
    w_plus = 2 * theta / SQRT3 + ell
    w_minus = 2 * theta / SQRT3 - ell
    m = w_noise * np.eye(8) + w_plus * _projector(ghz_ket(3, 1)) + w_minus * _projector(ghz_ket(3, -1))
    return DensityMatrix(m)


def noisy_ghz_tilde(p: float) -> DensityMatrix:
    """GHZ mixed with noise supported on the even-parity subspace of qubits 2,3."""
    p = _check_p(p)
    noise = np.kron(np.eye(2), np.diag([1.0, 0.0, 0.0, 1.0]))
    return DensityMatrix(p * _projector(ghz_ket(3)) + (1 - p) / 4 * noise)


def noisy_ghz(p: float) -> DensityMatrix:
    p = _check_p(p)
    return DensityMatrix(p * _projector(ghz_ket(3)) + (1 - p) / 8 * np.eye(8))


def noisy_w(p: float) -> DensityMatrix:
    p = _check_p(p)
    return DensityMatrix(p * _projector(w_ket()) + (1 - p) / 8 * np.eye(8))


def generalized_ghz4(phi: float) -> DensityMatrix:
    """``cos(phi)|0000> + sin(phi)|1111>``; ``phi`` is taken modulo pi."""
    phi = math.fmod(float(phi), math.pi)
    if phi < 0:
        phi += math.pi
    psi = math.cos(phi) * basis_ket("0000") + math.sin(phi) * basis_ket("1111")
    return DensityMatrix.from_pure(psi)


def ghz(n: int = 3) -> DensityMatrix:
    return DensityMatrix.from_pure(ghz_ket(int(n)))


def w3() -> DensityMatrix:
    return DensityMatrix.from_pure(w_ket())


def product_zero(n: int = 3) -> DensityMatrix:
    return DensityMatrix.from_pure(basis_ket("0" * int(n)))


def maximally_mixed(n: int = 3) -> DensityMatrix:
    return DensityMatrix.maximally_mixed(int(n))


FAMILIES = {
    "ghz_symmetric": (ghz_symmetric, ("ell", "theta")),
    "noisy_ghz_tilde": (noisy_ghz_tilde, ("p",)),
    "noisy_ghz": (noisy_ghz, ("p",)),
    "noisy_w": (noisy_w, ("p",)),
    "generalized_ghz4": (generalized_ghz4, ("phi",)),
    "ghz": (ghz, ("n",)),
    "w3": (w3, ()),
    "product": (product_zero, ("n",)),
    "mixed": (maximally_mixed, ("n",)),
}

_ALIASES = {"l": "ell", "ϑ": "theta", "w": "w3"}


def make_family(name: str, **params) -> DensityMatrix:
    """Build a named family member, e.g. ``make_family("noisy_w", p=0.5)``.

    Names accept hyphens or underscores. ``l`` is accepted for ``ell``.
    """
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in FAMILIES:
        raise ParameterError(f"unknown state family {name!r}; choose from {sorted(FAMILIES)}")
    fn, names = FAMILIES[key]
    kwargs = {}
    for k, v in params.items():
        k = _ALIASES.get(k, k)
        if k not in names:
            raise ParameterError(f"family {key!r} takes parameters {names}, got {k!r}")
        kwargs[k] = v
    missing = [k for k in names if k not in kwargs and k != "n"]
    if missing:
        raise ParameterError(f"family {key!r} is missing parameter(s) {missing}")
    return fn(**kwargs)
