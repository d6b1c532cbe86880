"""Wave-optics simulation of two-color computational ghost imaging.

The package has three layers: a scalar-field propagation core
(`core_optics`, `speckle`, `turbulence`), a closed-form width calculator
for the ghost point response (`psf_analytic`), and a Monte Carlo pipeline
that assembles both into full experiments (`ghost_pipeline`), plus a batch
CLI (`ndcgi` console script) and an acceptance suite.
"""

from .core_optics import (
    Aperture,
    ComplexField,
    GridSpec,
    apply_aperture,
    band_limit_frequency,
    intensity,
    propagate,
)
from .errors import (
    ConfigError,
    DegenerateWidthError,
    InsufficientSamplesError,
    InvalidFieldError,
    InvalidParamsError,
    NdcgiError,
    NonConvergentError,
    ResolutionError,
    SamplingCriterionError,
    ShapeMismatchError,
    WidthEstimateError,
)
from .ghost_pipeline import (
    ExperimentConfig,
    GhostAccumulator,
    GhostImage,
    accumulate,
    config_digest,
    double_slit_aperture,
    estimate_psf_width,
    finalize,
    merge,
    pinhole_aperture,
    range_from_disparity,
    run_experiment,
    simulate_realization,
    uniform_aperture,
)
from .psf_analytic import (
    GeometryParams,
    PsfCoefficients,
    PsfReport,
    matched_reference_distance,
    psf_report,
    psf_width,
    sweep,
    turbulent_coefficients,
    vacuum_coefficients,
)
from .rng import RealizationKey
from .speckle import SpeckleParams, estimate_correlation, generate_slm_field
from .turbulence import (
    PhaseScreen,
    TurbulenceSpec,
    apply_screen,
    coherence_length,
    generate_phase_screen,
    generate_phase_screen_pair,
)

__version__ = "0.1.0"

__all__ = [
    "Aperture",
    "ComplexField",
    "ConfigError",
    "DegenerateWidthError",
    "ExperimentConfig",
    "GeometryParams",
    "GhostAccumulator",
    "GhostImage",
    "GridSpec",
    "InsufficientSamplesError",
    "InvalidFieldError",
    "InvalidParamsError",
    "NdcgiError",
    "NonConvergentError",
    "PhaseScreen",
    "PsfCoefficients",
    "PsfReport",
    "RealizationKey",
    "ResolutionError",
    "SamplingCriterionError",
    "ShapeMismatchError",
    "SpeckleParams",
    "TurbulenceSpec",
    "WidthEstimateError",
    "accumulate",
    "apply_aperture",
    "apply_screen",
    "band_limit_frequency",
    "coherence_length",
    "config_digest",
    "double_slit_aperture",
    "estimate_correlation",
    "estimate_psf_width",
    "finalize",
    "generate_phase_screen",
    "generate_phase_screen_pair",
    "generate_slm_field",
    "intensity",
    "matched_reference_distance",
    "merge",
    "pinhole_aperture",
    "propagate",
    "psf_report",
    "psf_width",
    "range_from_disparity",
    "run_experiment",
    "simulate_realization",
    "sweep",
    "turbulent_coefficients",
    "uniform_aperture",
    "vacuum_coefficients",
]
