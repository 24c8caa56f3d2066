"""
Four qubits: the MABK bound for cos(phi)|0000> + sin(phi)|1111>
===============================================================

The 9x9 reshaped matrix has singular values 2 sin(2 phi) (twice) and 1, so
the bound is 2 sqrt(2) max(1, 2 sin 2 phi). For small phi the see-saw
oracle stays at the classical value 2, below the bound.
"""

import numpy as np

from merminbound.bounds import analytic_bound
from merminbound.optimizer import OptimizerConfig, seesaw_maximize
from merminbound.qstate import generalized_ghz4

cfg = OptimizerConfig(restarts=16, seed=3)
for phi in np.linspace(0, np.pi / 4, 7):
    rho = generalized_ghz4(phi)
    rep = analytic_bound(rho)
    print(f"phi={phi:.3f}  singular values {np.round(rep.singular_values[:3], 4)}  "
          f"bound={rep.bound:.4f}  oracle={seesaw_maximize(rho, 'mabk', cfg).best_value:.4f}")
