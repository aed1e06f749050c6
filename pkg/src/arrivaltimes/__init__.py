"""Arrival-time distributions for the first fluorescence photon.

A cold two-level atom drifts into a half-space laser beam; the first
spontaneously emitted photon marks its arrival.  This package computes
the resulting time distributions from the exact scattering solution of
the conditional (no-photon-yet) dynamics, together with the ideal
free-particle reference distribution, the quantum flux, normalized
variants, and the one-channel absorbing-potential limit.

The core objects:

    LaserAtomParams / AbsorbingStepParams   model parameters, SI units
    GaussianPacket + discretize             incident packets on a
                                            Gauss-Legendre momentum grid
    compute_curves                          the arrival-time curves
    deconvolve                              undo the apparatus response
    evolve_conditional                      independent grid-based solver

and the ``arrivaltimes`` CLI for scenario files.
"""

from ._version import __version__
from .errors import (
    ArrivalTimeError,
    NumericalDegeneracyError,
    OracleMismatchError,
    SchemeViolationError,
    SingularReweightingError,
    ValidationError,
    WraparoundError,
)
from .params import (
    GAMMA_CESIUM,
    HBAR,
    MASS_CESIUM,
    AbsorbingStepParams,
    LaserAtomParams,
    sigma_k_from_position_spread,
    sigma_k_from_velocity_spread,
    wavenumber_from_velocity,
)
from .packets import DiscretizedPacket, GaussianPacket, MomentumGrid, discretize, position_amplitude
from .scattering import ScatteringAmplitudes, scattering_amplitudes, stationary_state
from .kernels import (
    ArrivalCurves,
    KNOWN_OUTPUTS,
    compute_curves,
    detection_loss,
    detection_weights,
    emission_kernel,
    predicted_time_integrals,
)
from .asymptotics import (
    ConvergenceRow,
    OverdampedConstants,
    convergence_report,
    delay_kernel,
    delay_kernel_series,
    fit_overdamped_constants,
    overdamped_constants,
    strong_decay_closure,
)
from .deconv import (
    DeconvolutionResult,
    deconvolve,
    emission_response,
    inverse_transfer,
    pi_on_spectrum,
    transfer_coefficients,
)
from . import cpot
from .oracle import (
    GridSolverConfig,
    OracleResult,
    absorber_reflection_probe,
    dense_overlap_check,
    evolve_conditional,
    time_step_budget,
)
from .scenario import Scenario, load_scenario, metadata, scenario_from_mapping

__all__ = [
    "__version__",
    "ArrivalTimeError",
    "ValidationError",
    "NumericalDegeneracyError",
    "SingularReweightingError",
    "SchemeViolationError",
    "WraparoundError",
    "OracleMismatchError",
    "HBAR",
    "GAMMA_CESIUM",
    "MASS_CESIUM",
    "LaserAtomParams",
    "AbsorbingStepParams",
    "wavenumber_from_velocity",
    "sigma_k_from_velocity_spread",
    "sigma_k_from_position_spread",
    "GaussianPacket",
    "MomentumGrid",
    "DiscretizedPacket",
    "discretize",
    "position_amplitude",
    "ScatteringAmplitudes",
    "scattering_amplitudes",
    "stationary_state",
    "ArrivalCurves",
    "KNOWN_OUTPUTS",
    "compute_curves",
    "emission_kernel",
    "detection_weights",
    "detection_loss",
    "predicted_time_integrals",
    "OverdampedConstants",
    "overdamped_constants",
    "fit_overdamped_constants",
    "strong_decay_closure",
    "delay_kernel",
    "delay_kernel_series",
    "ConvergenceRow",
    "convergence_report",
    "transfer_coefficients",
    "inverse_transfer",
    "emission_response",
    "DeconvolutionResult",
    "deconvolve",
    "pi_on_spectrum",
    "cpot",
    "GridSolverConfig",
    "OracleResult",
    "evolve_conditional",
    "time_step_budget",
    "absorber_reflection_probe",
    "dense_overlap_check",
    "Scenario",
    "load_scenario",
    "scenario_from_mapping",
    "metadata",
]
