"""
When is the bound attained? The GHZ-symmetric family
====================================================

The bound 2*sqrt(2)*lambda_max is attained when the top singular value is
degenerate and its singular vectors have the right tensor shape. For the
GHZ-symmetric states both hold, and the settings can be read off the SVD.
"""

import math

import numpy as np

from merminbound.bounds import (
    contracted_expectation,
    decompose_top_vectors,
    reshape_tensor,
    settings_from_certificate,
    singular_spectrum,
)
from merminbound.optimizer import seesaw_maximize
from merminbound.qstate import correlation_data, ghz_symmetric

rho = ghz_symmetric(0.3, 0.4)
corr = correlation_data(rho)

# the 3x9 matrix of full correlations
reshaped = reshape_tensor(corr)
print(np.round(reshaped.matrix, 3))

spec = singular_spectrum(reshaped)
print("singular values", spec.values, "degeneracy", spec.degeneracy)

# two orthogonal top vectors of the forms b(x)c' + b'(x)c and b(x)c - b'(x)c'
cert = decompose_top_vectors(spec, 3)
print("principal angle", cert.principal_angle, "vs pi/2 =", math.pi / 2)

# settings built from the certificate reach the bound exactly
settings = settings_from_certificate(reshaped, cert)
print("value at certificate settings", contracted_expectation(corr, settings))
print("bound", 2 * math.sqrt(2) * spec.lambda_max)

# and an independent see-saw search agrees
print("see-saw", seesaw_maximize(rho, "mermin").best_value)
