"""
A state where the bound is not tight: W with white noise
========================================================

The W state's top singular value is non-degenerate, so nothing forces the
bound to be reached. The see-saw oracle shows a clear gap.
"""

import math

import numpy as np

from merminbound.bounds import analytic_bound, certify_tightness
from merminbound.optimizer import OptimizerConfig, seesaw_maximize
from merminbound.qstate import noisy_w

for p in np.linspace(0.5, 1.0, 6):
    rho = noisy_w(p)
    rep = analytic_bound(rho)
    opt = seesaw_maximize(rho, "mermin", OptimizerConfig(restarts=32, seed=1))
    rep = certify_tightness(rep, opt)
    print(f"p={p:.1f}  bound={rep.bound:.6f}  (2 sqrt(34)/3 p = {2 * math.sqrt(34) / 3 * p:.6f})  "
          f"oracle={opt.best_value:.6f}  {rep.tightness.value}")

# both sides scale linearly in p, so the ratio is constant
print("oracle / bound at p = 1:", seesaw_maximize(noisy_w(1), "mermin").best_value / analytic_bound(noisy_w(1)).bound)
