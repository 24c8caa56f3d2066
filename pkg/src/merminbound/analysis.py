"""End-to-end analysis of one state: bound, optional oracle, concurrence and relations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .bounds import (
    BoundReport,
    TightnessCertificate,
    analytic_bound,
    certify_tightness,
    decompose_top_vectors,
    default_family,
    reshape_tensor,
    singular_spectrum,
    CERTIFY_TOL,
)
from .entanglement import NotAnXState, RELATION_FAMILIES, extract_x_form, gmc, relation_value
from .optimizer import ORACLE_MAX_PARTIES, OptimizerConfig, OptResult, seesaw_maximize
from .qstate import DensityMatrix, correlation_data


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    state: dict
    n: int
    family: str
    bound_report: BoundReport
    oracle: Optional[OptResult] = None
    concurrence: Optional[float] = None
    relations: tuple = ()
    certificate: Optional[TightnessCertificate] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "state": self.state,
            "n": self.n,
            "operator": self.family,
            "boundReport": self.bound_report.to_dict(),
            "oracle": self.oracle.to_dict() if self.oracle is not None else None,
            "concurrence": self.concurrence,
            "relations": [dict(r) for r in self.relations],
            "certificate": self.certificate.to_dict() if self.certificate is not None else None,
        }


def concurrence_or_none(rho: DensityMatrix) -> Optional[float]:
    if rho.n != 3:
        return None
    try:
        return gmc(extract_x_form(rho))
    except NotAnXState:
        return None


def analyze(
    rho: DensityMatrix,
    state: dict,
    oracle: bool = False,
    cfg: OptimizerConfig = OptimizerConfig(),
    split: Optional[int] = None,
    tol: float = CERTIFY_TOL,
) -> AnalysisReport:
    """Run the full pipeline on ``rho``.

    ``state`` describes the input, e.g. ``{"family": "noisy_ghz", "params": {"p": 0.6}}``
    or ``{"file": "rho.json"}``; family states with a known concurrence
    relation get their residuals attached.
    """
    n = rho.n
    family = default_family(n)
    corr = correlation_data(rho)
    report = analytic_bound(corr, split)

    cert = None
    if n in (3, 4) and report.degeneracy >= 2 and report.split == n // 2:
        cert = decompose_top_vectors(singular_spectrum(reshape_tensor(corr, split)), n)

    opt = None
    if oracle:
        if n > ORACLE_MAX_PARTIES:
            raise ValueError(f"the oracle supports at most {ORACLE_MAX_PARTIES} qubits, state has {n}")
        opt = seesaw_maximize(corr, family, cfg)
        report = certify_tightness(report, opt, tol)

    cm = concurrence_or_none(rho)
    relations = []
    fam = (state.get("family") or "").replace("-", "_")
    if cm is not None and fam in RELATION_FAMILIES:
        params = state.get("params", {})
        theta = params.get("theta")
        predicted = relation_value(fam, cm, theta)
        relations.append(
            {
                "name": _RELATION_NAMES[fam],
                "residual": abs(report.bound - predicted),
                "applicable": cm > 0,
            }
        )
    return AnalysisReport(state, n, family, report, opt, cm, tuple(relations), cert)


_RELATION_NAMES = {
    "ghz_symmetric": "Q = 4(Cm + 3/4 - sqrt(3) theta)",
    "noisy_ghz_tilde": "Q = 4/3 (2 Cm + 1)",
    "noisy_ghz": "Q = 4/7 (4 Cm + 3)",
}


def bisect_threshold(fn, lo: float, hi: float, level: float, iters: int = 80) -> float:
    """Smallest x in [lo, hi] with fn(x) > level, for fn non-decreasing."""
    f_lo = fn(lo)
    if f_lo > level:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) > level:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def expected_ghz4_bound(phi: float) -> float:
    return 2 * math.sqrt(2) * max(1.0, 2 * abs(math.sin(2 * phi)))
