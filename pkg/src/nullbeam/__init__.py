"""Phased-array pattern synthesis with a structurally protected pattern.

The package splits excitation space through the SVD of the discretized
radiation operator: a truncated pseudoinverse reproduces a reference
pattern with minimum-norm *radiating* excitations, and a particle swarm
shapes the complementary *non-radiating* component to satisfy electrical
constraints — dynamic-range reduction, forbidden aperture regions, or
amplitude quantization — without touching the pattern beyond a provable
leakage bound.
"""

from .config import ScenarioConfig, dump_config, load_config, parse_config, save_config
from .errors import ConfigError, InputDataError, NumericalError
from .geometry import (
    ApertureRegion,
    ArrayGeometry,
    elements_in_region,
    load_geometry,
    make_linear,
    make_planar_grid,
    save_geometry,
)
from .optimizer import (
    ConstraintSpec,
    ConvergenceTrace,
    PsoConfig,
    cost_drr,
    cost_forbidden,
    cost_quantized,
    optimize_nr,
)
from .pattern import (
    AngularGrid,
    PatternMask,
    PatternSamples,
    array_factor,
    build_mask,
    hemisphere_grid,
    line_grid,
    mask_matching,
    pattern_tolerance,
    q_factor,
    sphere_grid,
)
from .pipeline import (
    run_decompose,
    run_evaluate,
    run_reference,
    run_synthesize,
)
from .radop import (
    ExcitationVector,
    NrCoefficients,
    RadiationOperator,
    TruncationReport,
    assemble,
    build_operator,
    gamma_to_real,
    load_excitations,
    minimum_norm_excitations,
    nr_excitations,
    real_to_gamma,
    save_excitations,
    select_rank,
)
from .reference import FitResult, ReferenceSpec, load_reference, synthesize_reference

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ConfigError",
    "InputDataError",
    "NumericalError",
    # geometry
    "ArrayGeometry",
    "ApertureRegion",
    "make_linear",
    "make_planar_grid",
    "elements_in_region",
    "load_geometry",
    "save_geometry",
    # pattern
    "AngularGrid",
    "PatternMask",
    "PatternSamples",
    "line_grid",
    "hemisphere_grid",
    "sphere_grid",
    "array_factor",
    "mask_matching",
    "pattern_tolerance",
    "q_factor",
    "build_mask",
    # operator
    "ExcitationVector",
    "RadiationOperator",
    "TruncationReport",
    "NrCoefficients",
    "build_operator",
    "select_rank",
    "minimum_norm_excitations",
    "nr_excitations",
    "assemble",
    "gamma_to_real",
    "real_to_gamma",
    "save_excitations",
    "load_excitations",
    # reference
    "ReferenceSpec",
    "FitResult",
    "load_reference",
    "synthesize_reference",
    # optimizer
    "PsoConfig",
    "ConstraintSpec",
    "ConvergenceTrace",
    "cost_drr",
    "cost_forbidden",
    "cost_quantized",
    "optimize_nr",
    # config & pipeline
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "dump_config",
    "save_config",
    "run_decompose",
    "run_reference",
    "run_synthesize",
    "run_evaluate",
]
