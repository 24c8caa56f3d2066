"""
See-saw oracle for ``max |<B_n>_rho|`` over spin-measurement settings, the
exhaustive LHV bound, and a spherical-cap grid sweep for local checks.

The expectation of a Bell operator with coefficient tensor ``C`` is

    E = sum_{c, i} C[c1..cn] T[i1..in] V_1[c1, i1] ... V_n[cn, in]

where ``T`` is the full-correlation tensor and ``V_j`` stacks party j's
unprimed and primed unit vectors. ``E`` is linear in every single vector, so
with the others fixed the best choice is the normalized partial gradient.

Restart ``r`` draws its initial vectors from
``PCG64(SeedSequence(seed, spawn_key=(r,)))``; restarts are therefore
independent of each other and of execution order.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import MeasurementSettings, operator_coefficients
from .qstate import CorrelationData, correlation_data

log = logging.getLogger(__name__)

LHV_MAX_PARTIES = 5
ORACLE_MAX_PARTIES = 6
ZERO_GRADIENT = 1e-14


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 500
    convergence_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class OptResult:
    best_value: float
    best_settings: MeasurementSettings
    restart_values: tuple
    converged: bool
    iterations_total: int
    traces: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "bestValue": self.best_value,
            "converged": self.converged,
            "iterationsTotal": self.iterations_total,
            "settings": self.best_settings.to_json(),
            "restartValues": list(self.restart_values),
        }


class _Objective:
    """Bell expectation as a multilinear form on the stacked settings."""

    def __init__(self, full: np.ndarray, coef: np.ndarray):
        self.n = full.ndim
        # per party: tensor and coefficients with that party's axis first
        self._full = [np.ascontiguousarray(np.moveaxis(full, k, 0)) for k in range(self.n)]
        self._coef = [np.ascontiguousarray(np.moveaxis(coef, k, 0)) for k in range(self.n)]
        self._axes = tuple(range(1, self.n))

    def gradient(self, vecs, party) -> np.ndarray:
        """``G[c, i]`` with ``E = sum_{c,i} G[c, i] V_party[c, i]``."""
        x = self._full[party]
        for j in range(self.n):
            if j != party:
                # contract the next remaining party index, append its c axis
                x = np.tensordot(x, vecs[j], axes=([1], [1]))
        return np.tensordot(self._coef[party], x, axes=(self._axes, self._axes))

    def value(self, vecs) -> float:
        return float(np.sum(self.gradient(vecs, 0) * vecs[0]))


def _as_corr(rho) -> CorrelationData:
    return rho if isinstance(rho, CorrelationData) else correlation_data(rho)


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(restart,))))


def _seesaw_run(obj: _Objective, vecs: np.ndarray, sign: float, cfg: OptimizerConfig):
    """Coordinate ascent of ``sign * E`` from ``vecs`` (modified in place)."""
    n = obj.n
    value = sign * obj.value(vecs)
    trace = [value]
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        for party in range(n):
            g = sign * obj.gradient(vecs, party)
            for c in (0, 1):  # unprimed before primed
                ng = np.linalg.norm(g[c])
                if ng >= ZERO_GRADIENT:
                    vecs[party, c] = g[c] / ng
        # g does not depend on the last party's own vectors
        new = float(np.sum(g * vecs[n - 1]))
        trace.append(new)
        if new - value < cfg.convergence_tol:
            value = max(value, new)
            converged = True
            break
        value = new
    return value, it, converged, trace


def seesaw_maximize(rho, family: str = "mabk", cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximize ``|<B>|`` by see-saw coordinate ascent with seeded random restarts.

    Each restart ascends ``+<B>`` and ``-<B>`` from the same initial point and
    keeps the larger; the result is the best restart.
    """
    corr = _as_corr(rho)
    n = corr.n
    if not 2 <= n <= ORACLE_MAX_PARTIES:
        raise ValueError(f"the see-saw oracle supports 2 <= n <= {ORACLE_MAX_PARTIES}, got {n}")
    obj = _Objective(np.array(corr.full_correlations), operator_coefficients(n, family))

    best_value, best_vecs = -math.inf, None
    values, traces = [], []
    all_converged = True
    iterations = 0
    for r in range(cfg.restarts):
        g = _restart_rng(cfg.seed, r).standard_normal((n, 2, 3))
        init = g / np.linalg.norm(g, axis=2, keepdims=True)
        if all(np.linalg.norm(obj.gradient(init, j)) < ZERO_GRADIENT for j in range(n)):
            values.append(0.0)
            traces.append((0.0,))
            if best_vecs is None:
                best_value, best_vecs = 0.0, init
            continue
        restart_best, restart_vecs = -math.inf, None
        for sign in (1.0, -1.0):
            vecs = init.copy()
            val, its, conv, trace = _seesaw_run(obj, vecs, sign, cfg)
            iterations += its
            all_converged &= conv
            traces.append(tuple(trace))
            if val > restart_best:
                restart_best, restart_vecs = val, vecs
                if sign < 0:
                    # negating party 1's pair negates <B>
                    restart_vecs = vecs.copy()
                    restart_vecs[0] *= -1
        values.append(max(restart_best, 0.0))
        if restart_best > best_value:
            best_value, best_vecs = restart_best, restart_vecs

    best_value = max(best_value, 0.0)
    best_vecs = best_vecs / np.linalg.norm(best_vecs, axis=2, keepdims=True)
    near = sum(v >= best_value - 1e-6 for v in values)
    log.info("see-saw: best %.12g, %d/%d restarts within 1e-6", best_value, near, len(values))
    return OptResult(
        best_value=float(best_value),
        best_settings=MeasurementSettings(best_vecs),
        restart_values=tuple(float(v) for v in values),
        converged=bool(all_converged),
        iterations_total=int(iterations),
        traces=tuple(traces),
    )


def settings_value(rho, settings: MeasurementSettings, family: str = "mabk") -> float:
    """``<B>`` at the given settings, via the correlation tensor."""
    corr = _as_corr(rho)
    obj = _Objective(np.array(corr.full_correlations), operator_coefficients(corr.n, family))
    return obj.value(np.array(settings.vectors))


def lhv_bound_by_enumeration(family: str, n: int) -> float:
    """Maximum of the operator's coefficient polynomial over all +-1 assignments."""
    if not 2 <= n <= LHV_MAX_PARTIES:
        raise ValueError(f"LHV enumeration supports 2 <= n <= {LHV_MAX_PARTIES}, got {n}")
    coef = operator_coefficients(n, family)
    outcomes = np.array(list(itertools.product((1.0, -1.0), repeat=2 * n))).reshape(-1, n, 2)
    # value[s] = sum_c coef[c] prod_j outcomes[s, j, c_j]
    vals = np.zeros(len(outcomes))
    for c in itertools.product((0, 1), repeat=n):
        w = coef[c]
        if w:
            vals += w * np.prod(outcomes[:, np.arange(n), list(c)], axis=1)
    return float(np.max(np.abs(vals)))


def _cap_points(v: np.ndarray, radius: float, steps: int) -> np.ndarray:
    """Grid on the spherical cap of angular ``radius`` around unit ``v``."""
    axis = np.eye(3)[np.argmin(np.abs(v))]
    e1 = np.cross(v, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    polar = np.linspace(0.0, radius, steps + 1)[1:]
    azim = np.linspace(0.0, 2 * np.pi, 2 * steps, endpoint=False)
    pp, aa = np.meshgrid(polar, azim, indexing="ij")
    pts = (
        np.cos(pp)[..., None] * v
        + (np.sin(pp) * np.cos(aa))[..., None] * e1
        + (np.sin(pp) * np.sin(aa))[..., None] * e2
    ).reshape(-1, 3)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def grid_refine(rho, start: MeasurementSettings, radius: float, steps: int,
                family: str = "mabk", min_radius: float = 1e-7) -> OptResult:
    """Spherical-cap pattern search around ``start``.

    Every vector is probed on a cap grid of angular ``radius``; improving
    points are accepted, and the radius is halved whenever a full pass finds
    nothing better, down to ``min_radius``. ``converged`` is True when the
    first pass at the full radius found no improvement above 1e-9, i.e. the
    start is locally optimal at the grid resolution.
    """
    corr = _as_corr(rho)
    obj = _Objective(np.array(corr.full_correlations), operator_coefficients(corr.n, family))
    vecs = np.array(start.vectors)
    sign = 1.0 if obj.value(vecs) >= 0 else -1.0
    start_value = sign * obj.value(vecs)
    value = start_value
    if radius <= 0 or steps < 1:
        return OptResult(abs(value), start, (abs(value),), True, 0)

    first_pass_clean = None
    r = float(radius)
    passes = 0
    while r >= min_radius:
        improved = False
        for party in range(obj.n):
            for c in (0, 1):
                g = sign * obj.gradient(vecs, party)
                other = g[1 - c] @ vecs[party, 1 - c]
                pts = _cap_points(vecs[party, c], r, steps)
                cand = pts @ g[c] + other
                k = int(np.argmax(cand))
                if cand[k] > value + 1e-15:
                    if cand[k] > value + 1e-9:
                        improved = True
                    vecs[party, c] = pts[k]
                    value = sign * obj.value(vecs)
        passes += 1
        if first_pass_clean is None:
            first_pass_clean = not improved
        if not improved:
            r /= 2
    return OptResult(
        best_value=float(abs(value)),
        best_settings=MeasurementSettings(vecs),
        restart_values=(float(abs(value)),),
        converged=bool(first_pass_clean),
        iterations_total=passes,
    )
