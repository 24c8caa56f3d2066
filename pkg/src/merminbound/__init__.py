"""Analytical upper bound on Mermin and MABK expectation values via correlation-tensor singular values."""

from .bounds import (
    BoundReport,
    ConsistencyError,
    MeasurementSettings,
    Tightness,
    analytic_bound,
    bell_operator,
    certify_tightness,
    classical_bound,
    decompose_top_vectors,
    expectation,
    mabk_operator,
    mermin_operator,
    reshape_tensor,
    singular_spectrum,
)
from .entanglement import XStateForm, extract_x_form, gmc
from .optimizer import OptimizerConfig, OptResult, lhv_bound_by_enumeration, seesaw_maximize
from .qstate import (
    CorrelationData,
    DensityMatrix,
    InvalidStateError,
    ParameterError,
    correlation_data,
    make_family,
)

__all__ = [
    "BoundReport",
    "ConsistencyError",
    "MeasurementSettings",
    "Tightness",
    "analytic_bound",
    "bell_operator",
    "certify_tightness",
    "classical_bound",
    "decompose_top_vectors",
    "expectation",
    "mabk_operator",
    "mermin_operator",
    "reshape_tensor",
    "singular_spectrum",
    "XStateForm",
    "extract_x_form",
    "gmc",
    "OptimizerConfig",
    "OptResult",
    "lhv_bound_by_enumeration",
    "seesaw_maximize",
    "CorrelationData",
    "DensityMatrix",
    "InvalidStateError",
    "ParameterError",
    "correlation_data",
    "make_family",
]

__version__ = "0.1.0"
