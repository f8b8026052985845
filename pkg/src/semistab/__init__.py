"""Spectral toolkit for semi-uniform stability, admissibility, and
input-to-state stability analysis of diagonal semigroup models.

Everything operates on finite spectral truncations: a ``DiagonalGenerator``
holds retained eigenvalues (plus an optional certified tail description),
and the analysis layers — decay fitting, Carleson/admissibility tests,
trajectory simulation, and ISS envelope certification — consume it.
"""

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NotSectorial,
    SemistabError,
    UsageError,
)
from .spectral_core import (
    DiagonalGenerator,
    SpectralVector,
    decay_norm_grid,
    fractional_power_apply,
    generator_apply,
    graph_norm,
    operator_decay_norm,
    poly_weighted_sup,
    resolvent_apply,
    semigroup_apply,
)
from .stability_analysis import (
    DecayFit,
    GapReport,
    SpectralConditionReport,
    check_polynomial_spectral_condition,
    check_spectral_gap,
    fit_decay_exponent,
)
from .admissibility import (
    AdmissibilityEstimate,
    CarlesonReport,
    InputOperator,
    RangeConditionReport,
    admissibility_constant_estimate,
    phi_sums,
    range_condition_margin,
    separation_gap,
)
from .trajectory_sim import (
    InputSignal,
    NonlinearTerm,
    Trajectory,
    make_grid,
    simulate_linear,
    simulate_semilinear,
)
from .iss_certify import (
    AttractivityReport,
    CertificationReport,
    Envelope,
    RunRecord,
    bilinear_iiss_envelope,
    probe_asymptotic_gain,
    probe_limit_property,
    verify_envelope,
)
from .scenarios import (
    Scenario,
    admissibility_growth_demo,
    available_scenarios,
    build_scenario,
    ugs_failure_demo,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityEstimate",
    "AttractivityReport",
    "BACKEND",
    "CarlesonReport",
    "CertificationReport",
    "ConvergenceFailure",
    "DecayFit",
    "DiagonalGenerator",
    "DimensionMismatch",
    "Envelope",
    "GapReport",
    "InputOperator",
    "InputSignal",
    "NonlinearTerm",
    "NotSectorial",
    "RangeConditionReport",
    "RunRecord",
    "Scenario",
    "SemistabError",
    "SpectralConditionReport",
    "SpectralVector",
    "Trajectory",
    "UsageError",
    "admissibility_constant_estimate",
    "admissibility_growth_demo",
    "available_scenarios",
    "bilinear_iiss_envelope",
    "build_scenario",
    "check_polynomial_spectral_condition",
    "check_spectral_gap",
    "decay_norm_grid",
    "fit_decay_exponent",
    "fractional_power_apply",
    "generator_apply",
    "graph_norm",
    "make_grid",
    "operator_decay_norm",
    "phi_sums",
    "poly_weighted_sup",
    "probe_asymptotic_gain",
    "probe_limit_property",
    "range_condition_margin",
    "resolvent_apply",
    "semigroup_apply",
    "separation_gap",
    "simulate_linear",
    "simulate_semilinear",
    "ugs_failure_demo",
    "verify_envelope",
    "__version__",
]
