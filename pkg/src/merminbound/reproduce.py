"""Reproduction of the worked examples: tables printed by ``merminbound reproduce``.

Each target returns ``(text, data)``; ``data`` holds the computed numbers
so tests can check them without parsing text.
"""

from __future__ import annotations

import math

import numpy as np

from .analysis import bisect_threshold, expected_ghz4_bound
from .bounds import (
    analytic_bound,
    certify_tightness,
    decompose_top_vectors,
    reshape_tensor,
    singular_spectrum,
)
from .entanglement import extract_x_form, gmc, relation_value
from .optimizer import OptimizerConfig, seesaw_maximize
from .qstate import correlation_data, generalized_ghz4, ghz_symmetric, noisy_ghz, noisy_ghz_tilde, noisy_w

SQRT2 = math.sqrt(2)
SQRT3 = math.sqrt(3)
TARGETS = ("example1", "example2", "example3", "figure1", "mabk4")


def _fmt_matrix(m, scale=1.0):
    return "\n".join("  [" + " ".join(f"{v / scale:6.3f}" for v in row) + "]" for row in m)


def _vec(v):
    return "(" + ", ".join(f"{x:+.4f}" for x in v) + ")"


def example1(seed: int = 0):
    ell, theta = 0.3, 0.4
    rho = ghz_symmetric(ell, theta)
    corr = correlation_data(rho)
    reshaped = reshape_tensor(corr)
    spec = singular_spectrum(reshaped)
    cert = decompose_top_vectors(spec, 3)
    dec = cert.decomposition
    lines = [
        f"GHZ-symmetric states rho(l, theta), shown at l={ell}, theta={theta}",
        "T / (2 l) =",
        _fmt_matrix(reshaped.matrix, 2 * ell),
        f"singular values: {', '.join(f'{v:.12g}' for v in spec.values)}",
        f"lambda_max = {spec.lambda_max:.15g}   2*sqrt(2)*|l| = {2 * SQRT2 * abs(ell):.15g}   degeneracy {spec.degeneracy}",
        "top singular vectors decomposed as",
        f"  b = {_vec(dec.first[0])}  b' = {_vec(dec.first[1])}",
        f"  c = {_vec(dec.second[0])}  c' = {_vec(dec.second[1])}",
        f"principal angle = {cert.principal_angle:.15g}  (pi/2 = {math.pi / 2:.15g})",
        "",
        f"{'l':>8} {'theta':>9} {'bound':>18} {'8|l|':>18} {'Cm':>10} {'residual':>10}  violates MI",
    ]
    rows = []
    for l_, th in [(-0.3, 0.4), (0.1, 0.2), (0.25, 0.4), (0.3, 0.4), (0.2, 0.3), (0.5, SQRT3 / 4)]:
        r = ghz_symmetric(l_, th)
        rep = analytic_bound(r)
        cm = gmc(extract_x_form(r))
        resid = abs(rep.bound - relation_value("ghz_symmetric", cm, th)) if cm > 0 else float("nan")
        rows.append({"ell": l_, "theta": th, "bound": rep.bound, "cm": cm, "residual": resid,
                     "violates": rep.violates_classical})
        lines.append(f"{l_:8.4f} {th:9.6f} {rep.bound:18.15f} {8 * abs(l_):18.15f} {cm:10.6f} {resid:10.2e}  {rep.violates_classical}")
    opt = seesaw_maximize(rho, "mermin", OptimizerConfig(seed=seed))
    checked = certify_tightness(analytic_bound(rho), opt)
    lines += [
        "",
        "violation threshold |l| > 1/4: bound at l = 1/4 is "
        f"{analytic_bound(ghz_symmetric(0.25, 0.4)).bound:.15g}",
        f"oracle at l={ell}: {opt.best_value:.12g} -> {checked.tightness.value}",
    ]
    data = {"lambda_max": spec.lambda_max, "degeneracy": spec.degeneracy, "angle": cert.principal_angle,
            "rows": rows, "oracle": opt.best_value, "tightness": checked.tightness.value,
            "bound_quarter": analytic_bound(ghz_symmetric(0.25, 0.4)).bound}
    return "\n".join(lines), data


def example2(seed: int = 0):
    lines = ["GHZ with colored noise (tilde) and white noise", ""]
    lines.append(f"{'p':>6} {'lambda_max':>18} {'sqrt2 p':>18} {'deg':>3} {'bound':>18} {'Cm~':>9} {'res~':>9} {'Cm':>9} {'res':>9}")
    rows = []
    for p in (0.25, 0.5, 0.6, 0.75, 0.9, 1.0):
        rep_t = analytic_bound(noisy_ghz_tilde(p))
        rep_w = analytic_bound(noisy_ghz(p))
        cm_t = gmc(extract_x_form(noisy_ghz_tilde(p)))
        cm_w = gmc(extract_x_form(noisy_ghz(p)))
        res_t = abs(rep_t.bound - relation_value("noisy_ghz_tilde", cm_t)) if cm_t > 0 else float("nan")
        res_w = abs(rep_w.bound - relation_value("noisy_ghz", cm_w)) if cm_w > 0 else float("nan")
        rows.append({"p": p, "lambda_max": rep_t.lambda_max, "degeneracy": rep_t.degeneracy,
                     "bound_tilde": rep_t.bound, "bound_white": rep_w.bound,
                     "residual_tilde": res_t, "residual_white": res_w})
        lines.append(f"{p:6.3f} {rep_t.lambda_max:18.15f} {SQRT2 * p:18.15f} {rep_t.degeneracy:3d} {rep_t.bound:18.15f} "
                     f"{cm_t:9.5f} {res_t:9.2e} {cm_w:9.5f} {res_w:9.2e}")
    threshold = bisect_threshold(lambda p: analytic_bound(noisy_ghz_tilde(p)).bound, 0.0, 1.0, 2.0)
    opt = seesaw_maximize(noisy_ghz_tilde(1.0), "mermin", OptimizerConfig(seed=seed))
    lines += [
        "",
        f"Mermin violation threshold (bound > 2): p = {threshold:.12g}",
        f"oracle at p = 1 (pure GHZ): {opt.best_value:.12g}",
    ]
    return "\n".join(lines), {"rows": rows, "threshold": threshold, "oracle_ghz": opt.best_value}


def example3(seed: int = 0):
    rho = noisy_w(1.0)
    reshaped = reshape_tensor(correlation_data(rho))
    spec = singular_spectrum(reshaped)
    rep = analytic_bound(rho)
    opt = seesaw_maximize(rho, "mermin", OptimizerConfig(seed=seed))
    checked = certify_tightness(rep, opt)
    lines = [
        "W state with white noise, p = 1",
        "T =",
        _fmt_matrix(reshaped.matrix),
        f"singular values: {', '.join(f'{v:.15g}' for v in spec.values)}",
        f"  sqrt(17)/3 = {math.sqrt(17) / 3:.15g}, 2 sqrt(2)/3 = {2 * SQRT2 / 3:.15g}",
        f"bound = {rep.bound:.15g}   2 sqrt(34)/3 = {2 * math.sqrt(34) / 3:.15g}",
        f"oracle = {opt.best_value:.12g}   gap = {rep.bound - opt.best_value:.6g}",
        f"verdict: {checked.tightness.value}",
    ]
    data = {"values": list(spec.values), "bound": rep.bound, "oracle": opt.best_value,
            "tightness": checked.tightness.value}
    return "\n".join(lines), data


def figure1(seed: int = 0):
    mi = bisect_threshold(lambda p: analytic_bound(noisy_ghz_tilde(p)).bound, 0.0, 1.0, 2.0)
    rows = [
        ("GME", 1 / 3, "quoted"),
        ("bi-local model", 5 / 12, "quoted"),
        ("MI", mi, "computed"),
        ("SI", 1 / SQRT2, "quoted"),
    ]
    lines = ["Entanglement and nonlocality thresholds in p for the GHZ state with colored noise", "",
             f"{'region':<16} {'p':>12}  source"]
    for name, val, src in rows:
        lines.append(f"{name:<16} {val:12.6g}  {src}")
    return "\n".join(lines), {"rows": [{"name": a, "p": b, "source": c} for a, b, c in rows]}


def mabk4(seed: int = 0):
    lines = ["Four-qubit MABK bound for cos(phi)|0000> + sin(phi)|1111>", "",
             f"{'phi':>10} {'bound':>18} {'2sqrt2 max(1,2sin2phi)':>24}"]
    rows = []
    for phi in np.linspace(0, math.pi / 2, 9):
        b = analytic_bound(generalized_ghz4(phi)).bound
        rows.append({"phi": float(phi), "bound": b, "expected": expected_ghz4_bound(phi)})
        lines.append(f"{phi:10.6f} {b:18.15f} {expected_ghz4_bound(phi):24.15f}")
    lines += ["", "oracle spot checks", f"{'phi':>10} {'bound':>14} {'oracle':>14}  tightness"]
    spots = []
    for phi in (0.0, math.pi / 8, math.pi / 4):
        rho = generalized_ghz4(phi)
        rep = analytic_bound(rho)
        opt = seesaw_maximize(rho, "mabk", OptimizerConfig(seed=seed))
        checked = certify_tightness(rep, opt)
        spots.append({"phi": phi, "bound": rep.bound, "oracle": opt.best_value, "tightness": checked.tightness.value})
        lines.append(f"{phi:10.6f} {rep.bound:14.10f} {opt.best_value:14.10f}  {checked.tightness.value}")
    return "\n".join(lines), {"rows": rows, "spots": spots}


def reproduce(target: str, seed: int = 0):
    fn = {"example1": example1, "example2": example2, "example3": example3,
          "figure1": figure1, "mabk4": mabk4}.get(target)
    if fn is None:
        raise ValueError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    return fn(seed)
