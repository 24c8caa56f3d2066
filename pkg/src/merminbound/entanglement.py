"""
Genuine multipartite concurrence of three-qubit X-states and its relation to
the Mermin bound for the GHZ-type families.

X-state layout (0-based matrix positions, i = 1..4)::

    rho[i-1, i-1] = m_i
    rho[8-i, 8-i] = n_i
    rho[i-1, 8-i] = z_i,   rho[8-i, i-1] = conj(z_i)

so the upper-left block is diag(m1..m4), the lower-right block is
diag(n4..n1) and the upper-right block is antidiag(z4..z1) read from its
bottom-left corner up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import DensityMatrix

X_PATTERN_TOL = 1e-10
SQRT3 = math.sqrt(3.0)


class NotAnXState(ValueError):
    """The matrix has weight outside the diagonal and anti-diagonal."""


@dataclass(frozen=True)
class XStateForm:
    m: tuple  # m_1..m_4
    n: tuple  # n_1..n_4
    z: tuple  # z_1..z_4 (complex)

    def __post_init__(self):
        m = tuple(float(v) for v in self.m)
        n = tuple(float(v) for v in self.n)
        z = tuple(complex(v) for v in self.z)
        if not (len(m) == len(n) == len(z) == 4):
            raise ValueError("an X-state form has four m, n and z entries")
        if min(m + n) < -1e-12:
            raise ValueError("diagonal entries must be non-negative")
        if abs(sum(m) + sum(n) - 1) > 1e-12:
            raise ValueError(f"diagonal sums to {sum(m) + sum(n)!r}, expected 1")
        for i in range(4):
            cap = math.sqrt(max(m[i], 0.0) * max(n[i], 0.0))
            if abs(z[i]) > cap + 1e-10:
                raise ValueError(f"|z_{i + 1}| = {abs(z[i]):.6g} exceeds sqrt(m_{i + 1} n_{i + 1}) = {cap:.6g}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "z", z)

    def to_matrix(self) -> np.ndarray:
        rho = np.zeros((8, 8), dtype=complex)
        for i in range(4):
            rho[i, i] = self.m[i]
            rho[7 - i, 7 - i] = self.n[i]
            rho[i, 7 - i] = self.z[i]
            rho[7 - i, i] = np.conj(self.z[i])
        return rho

    def to_json(self) -> dict:
        return {
            "m": list(self.m),
            "n": list(self.n),
            "zRe": [v.real for v in self.z],
            "zIm": [v.imag for v in self.z],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "XStateForm":
        z = [complex(r, i) for r, i in zip(doc["zRe"], doc["zIm"])]
        return cls(doc["m"], doc["n"], z)


def extract_x_form(rho: DensityMatrix) -> XStateForm:
    if rho.n != 3:
        raise ValueError(f"X-state forms are defined for three qubits, got {rho.n}")
    mat = rho.matrix
    mask = np.eye(8, dtype=bool) | np.fliplr(np.eye(8, dtype=bool))
    off = np.abs(mat[~mask])
    if off.size and off.max() > X_PATTERN_TOL:
        j, k = np.argwhere((np.abs(mat) > X_PATTERN_TOL) & ~mask)[0]
        raise NotAnXState(f"entry ({j}, {k}) = {mat[j, k]:.6g} lies off the X pattern")
    m = [mat[i, i].real for i in range(4)]
    n = [mat[7 - i, 7 - i].real for i in range(4)]
    z = [mat[i, 7 - i] for i in range(4)]
    return XStateForm(m, n, z)


def gmc(x: XStateForm) -> float:
    """``2 max_i max(0, |z_i| - sum_{j != i} sqrt(m_j n_j))``."""
    roots = [math.sqrt(max(a, 0.0) * max(b, 0.0)) for a, b in zip(x.m, x.n)]
    total = sum(roots)
    best = max(abs(x.z[i]) - (total - roots[i]) for i in range(4))
    return 2.0 * max(0.0, best)


def pure_state_gmc(rho: DensityMatrix) -> float:
    """``min_j sqrt(2 (1 - P_j))`` over single-qubit cuts of a pure three-qubit state."""
    if rho.n != 3:
        raise ValueError("pure-state concurrence is implemented for three qubits")
    if abs(rho.purity() - 1) > 1e-10:
        raise ValueError(f"state is not pure (purity {rho.purity():.12g})")
    t = rho.matrix.reshape((2,) * 6)
    values = []
    for j in range(3):
        # keep qubit j, trace the other two
        rows, cols = list("abc"), list("abc")
        rows[j], cols[j] = "x", "y"
        red = np.einsum("".join(rows) + "".join(cols) + "->xy", t)
        purity = float(np.real(np.vdot(red, red)))
        values.append(math.sqrt(max(0.0, 2 * (1 - purity))))
    return min(values)


RELATION_FAMILIES = ("ghz_symmetric", "noisy_ghz_tilde", "noisy_ghz")


def relation_value(family: str, cm: float, theta: float = None) -> float:
    """Mermin optimum predicted from the concurrence for the three GHZ-type families."""
    key = family.replace("-", "_")
    if key == "ghz_symmetric":
        if theta is None:
            raise ValueError("the GHZ-symmetric relation needs theta")
        return 4 * (cm + 0.75 - SQRT3 * theta)
    if key == "noisy_ghz_tilde":
        return 4 / 3 * (2 * cm + 1)
    if key == "noisy_ghz":
        return 4 / 7 * (4 * cm + 3)
    raise ValueError(f"no concurrence relation known for family {family!r}; choose from {RELATION_FAMILIES}")


def verify_relation(family: str, params: dict, bound_value: float, cm: float) -> float:
    """``|bound_value - relation(cm)|``.

    The relations hold where the state is genuinely multipartite entangled
    (``cm > 0``); outside that region the residual is generally non-zero.
    """
    theta = params.get("theta") if params else None
    return abs(bound_value - relation_value(family, cm, theta))


def mi_threshold_concurrence(family: str, theta: float = None) -> float:
    """Concurrence above which the relation predicts a Mermin violation (bound > 2)."""
    key = family.replace("-", "_")
    if key == "ghz_symmetric":
        return SQRT3 * theta - 0.25
    if key == "noisy_ghz_tilde":
        return 0.25
    if key == "noisy_ghz":
        return 0.125
    raise ValueError(f"no threshold known for family {family!r}")
