"""chiralqed: simulation and inference toolkit for directional photon
emission and dark-state entanglement in a two-emitter ring-cavity system.

A two-level dot and a three-level atom share a whispering-gallery-mode
resonator whose counterpropagating modes leak into a waveguide. The
package computes the single-excitation dynamics from first principles,
the probabilities of emitting into either direction, the entanglement
(concurrence) of the cavity dark state, and implements the counting
protocol that estimates that concurrence from measured directionality
alone.
"""

from ._backend import BACKEND_NAME
from .dynamics import (
    AmplitudeState,
    ReducedGenerator,
    StepControl,
    Trajectory,
    closed_form_cavity,
    closed_form_qab_audit,
    default_horizon,
    full_rhs,
    integrate_full,
    reduced_propagate,
)
from .errors import (
    ChiralQEDError,
    ConfigError,
    DomainError,
    InsufficientCountsError,
    IntegrationError,
    NoDarkStateError,
    ParameterError,
    UnsupportedRegimeError,
)
from .inference import (
    ConcurrenceEstimate,
    MeasurementRecord,
    ScalingResult,
    error_scaling_study,
    estimate_concurrence,
    estimate_directionality,
    estimate_from_record,
    sample_outcomes,
)
from .model import (
    CouplingRatios,
    EffectiveRates,
    RegimeReport,
    SystemParams,
    check_regime,
    derive_effective_rates,
    load_params_file,
    params_from_mapping,
    ratios_of,
)
from .observables import (
    DarkState,
    EmissionProbabilities,
    ReducedDensityReport,
    concurrence_from_couplings,
    concurrence_of_state,
    concurrence_vs_directionality,
    d_max,
    dark_state,
    dark_state_probability,
    directionality,
    emission_probabilities_analytic,
    emission_probabilities_audit,
    peak_coupling_ratio,
    peak_directionality,
    ratio_from_directionality,
    reduced_density,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeState",
    "BACKEND_NAME",
    "ChiralQEDError",
    "ConcurrenceEstimate",
    "ConfigError",
    "CouplingRatios",
    "DarkState",
    "DomainError",
    "EffectiveRates",
    "EmissionProbabilities",
    "InsufficientCountsError",
    "IntegrationError",
    "MeasurementRecord",
    "NoDarkStateError",
    "ParameterError",
    "ReducedDensityReport",
    "ReducedGenerator",
    "RegimeReport",
    "ScalingResult",
    "StepControl",
    "SystemParams",
    "Trajectory",
    "UnsupportedRegimeError",
    "check_regime",
    "closed_form_cavity",
    "closed_form_qab_audit",
    "concurrence_from_couplings",
    "concurrence_of_state",
    "concurrence_vs_directionality",
    "d_max",
    "dark_state",
    "dark_state_probability",
    "default_horizon",
    "derive_effective_rates",
    "directionality",
    "emission_probabilities_analytic",
    "emission_probabilities_audit",
    "error_scaling_study",
    "estimate_concurrence",
    "estimate_directionality",
    "estimate_from_record",
    "full_rhs",
    "integrate_full",
    "load_params_file",
    "params_from_mapping",
    "peak_coupling_ratio",
    "peak_directionality",
    "ratio_from_directionality",
    "ratios_of",
    "reduced_density",
    "reduced_propagate",
    "sample_outcomes",
]
