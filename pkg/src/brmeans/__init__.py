"""Generalized Bochner-Riesz means, sampling families and smoothness functionals on the torus."""

__version__ = "0.1.0"

from .errors import (
    BRError,
    ConfigError,
    EmptyCandidates,
    InsufficientBlocks,
    InsufficientPoints,
    QuadratureNonconvergence,
    ResolutionTooSmall,
    SamplingMismatch,
    SeriesDivergence,
    SymmetryViolation,
    TailToleranceUnreachable,
)
from .kernels import (
    ExpansionCoefficients,
    RieszSymbol,
    expansion_coefficients,
    fractional_binomial,
    kernel_coefficients,
)
from .operators import (
    FamilySpec,
    MeansSpec,
    apply_family,
    apply_means,
    convergence_probe,
    family_error,
    family_norm,
    needle_ratio,
    operator_norm,
)
from .radial import radial_transform, ball_transform_closed_form, calibrate_convention
from .regions import RegionPoint, classify, in_b_region, verdict
from .smoothness import ModulusSpec, equivalence_report, k_functional_upper, realization, special_modulus
from .spectral import (
    BiGridFunction,
    Exponent,
    GridFunction,
    SpectralPolynomial,
    analyze,
    double_norm,
    fractional_laplacian,
    lp_norm,
    synthesize,
)

__all__ = [
    "__version__",
    "BRError",
    "ConfigError",
    "EmptyCandidates",
    "InsufficientBlocks",
    "InsufficientPoints",
    "QuadratureNonconvergence",
    "ResolutionTooSmall",
    "SamplingMismatch",
    "SeriesDivergence",
    "SymmetryViolation",
    "TailToleranceUnreachable",
    "ExpansionCoefficients",
    "RieszSymbol",
    "expansion_coefficients",
    "fractional_binomial",
    "kernel_coefficients",
    "FamilySpec",
    "MeansSpec",
    "apply_family",
    "apply_means",
    "convergence_probe",
    "family_error",
    "family_norm",
    "needle_ratio",
    "operator_norm",
    "radial_transform",
    "ball_transform_closed_form",
    "calibrate_convention",
    "RegionPoint",
    "classify",
    "in_b_region",
    "verdict",
    "ModulusSpec",
    "equivalence_report",
    "k_functional_upper",
    "realization",
    "special_modulus",
    "BiGridFunction",
    "Exponent",
    "GridFunction",
    "SpectralPolynomial",
    "analyze",
    "double_norm",
    "fractional_laplacian",
    "lp_norm",
    "synthesize",
]
