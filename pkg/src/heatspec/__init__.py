"""Heat trace invariants of p-form Laplacians and what they reveal about the boundary."""
from .coefficients import HeatCoefficientSet, a0, a1, a2, a3, a3_section4_form, heat_coefficients
from .discriminator import (
    HypothesisViolation,
    RecoveryResult,
    SpectralDataset,
    TransferReport,
    classify_from_spectra,
    compare_manifolds,
    dataset_from_fits,
    dataset_from_model,
    recover_invariants,
)
from .exact import ExactValue, parse_exact
from .exterior import (
    SecondFundamentalForm,
    build_fiber_operators,
    coefficient_matrix,
    extract_quadratic_coefficients,
    verify_trace_tables,
)
from .fitting import FitResult, HeatTraceExpansion, compare, default_t_grid, fit, fit_spectrum
from .geometry import (
    BoundaryClassification,
    BoundaryInvariants,
    ModelManifold,
    catalog,
    classify_boundary,
    cylinder,
    disk,
    hemisphere,
    interval,
    pointwise_umbillic_oracle,
)
from .spectra import EigenvalueList, HeatTraceSample, heat_trace, one_form_spectrum_2d, spectrum

__version__ = "0.1.0"

__all__ = [
    "BoundaryClassification",
    "BoundaryInvariants",
    "EigenvalueList",
    "ExactValue",
    "FitResult",
    "HeatCoefficientSet",
    "HeatTraceExpansion",
    "HeatTraceSample",
    "HypothesisViolation",
    "ModelManifold",
    "RecoveryResult",
    "SecondFundamentalForm",
    "SpectralDataset",
    "TransferReport",
    "a0",
    "a1",
    "a2",
    "a3",
    "a3_section4_form",
    "build_fiber_operators",
    "catalog",
    "classify_boundary",
    "classify_from_spectra",
    "coefficient_matrix",
    "compare",
    "compare_manifolds",
    "cylinder",
    "dataset_from_fits",
    "dataset_from_model",
    "default_t_grid",
    "disk",
    "extract_quadratic_coefficients",
    "fit",
    "fit_spectrum",
    "heat_coefficients",
    "heat_trace",
    "hemisphere",
    "interval",
    "one_form_spectrum_2d",
    "parse_exact",
    "pointwise_umbillic_oracle",
    "recover_invariants",
    "spectrum",
    "verify_trace_tables",
]
