"""
Noise thresholds and genuine multipartite concurrence
=====================================================

For GHZ with colored or white noise the bound is 4p. The concurrence of
these X-states is linear in p above an onset, so the bound can be
written as a function of the concurrence.
"""

import numpy as np

from merminbound.analysis import bisect_threshold
from merminbound.bounds import analytic_bound
from merminbound.entanglement import extract_x_form, gmc, relation_value
from merminbound.qstate import noisy_ghz, noisy_ghz_tilde

print(f"{'p':>5} {'bound~':>8} {'Cm~':>8} {'from Cm~':>9} {'bound':>8} {'Cm':>8} {'from Cm':>8}")
for p in np.linspace(0, 1, 11):
    a, b = noisy_ghz_tilde(p), noisy_ghz(p)
    qa, qb = analytic_bound(a).bound, analytic_bound(b).bound
    ca, cb = gmc(extract_x_form(a)), gmc(extract_x_form(b))
    ra = relation_value("noisy_ghz_tilde", ca) if ca > 0 else float("nan")
    rb = relation_value("noisy_ghz", cb) if cb > 0 else float("nan")
    print(f"{p:5.2f} {qa:8.4f} {ca:8.4f} {ra:9.4f} {qb:8.4f} {cb:8.4f} {rb:8.4f}")

# the Mermin value exceeds the classical 2 from p = 1/2 on
print("threshold:", bisect_threshold(lambda p: analytic_bound(noisy_ghz_tilde(p)).bound, 0, 1, 2.0))
