"""One-channel absorbing-step comparison model.

Replaces the driven two-level structure by a single channel feeling a
negative imaginary step -i v0 for x > 0; absorbed norm plays the role
of detected photons.  The model is the strong-decay limit of the
two-channel one at fixed omega^2 / gamma, with v0 = hbar omega^2 /
(2 gamma), and shares all series conventions with `kernels` so the two
models can be subtracted column by column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import SingularReweightingError, ValidationError
from .kernels import (
    _DETECTION_FLOOR,
    ArrivalCurves,
    KNOWN_OUTPUTS,
    flux_scaled_base,
    free_flux_series,
    phase_frequencies,
    quadratic_form_series,
    rank_one_series,
)
from .packets import DiscretizedPacket
from .params import AbsorbingStepParams
from .scattering import sqrt_upper_half


@dataclass(frozen=True)
class StepAmplitudes:
    """Reflection/transmission data of the absorbing step.

    kappa is the complex wavenumber inside the step (Im kappa > 0, so
    the transmitted wave decays), r and t the matching amplitudes of
    the reflected and transmitted waves.
    """

    k: np.ndarray
    kappa: np.ndarray
    r: np.ndarray
    t: np.ndarray

    @property
    def detection_probability(self) -> np.ndarray:
        """Probability 1 - |r|^2 of ever being absorbed."""
        return 1.0 - np.abs(self.r) ** 2


def step_amplitudes(step: AbsorbingStepParams, k: np.ndarray) -> StepAmplitudes:
    """Plane-wave matching at the edge of the absorbing half line."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k <= 0.0):
        raise ValidationError("incident wavenumbers must be positive")
    kappa = sqrt_upper_half(k**2 + 2j * step.mass * step.v0 / step.hbar**2)
    return StepAmplitudes(
        k=k, kappa=kappa, r=(k - kappa) / (k + kappa), t=2.0 * k / (k + kappa)
    )


def absorption_kernel(
    step: AbsorbingStepParams,
    amps: StepAmplitudes,
    col_amps: StepAmplitudes | None = None,
) -> np.ndarray:
    """Flux-normalized absorption kernel of the step model.

    M[j,l] = (2 v0 / hbar) (m / (hbar sqrt(k_j k_l)))
             conj(t_j) t_l / (i (conj(kappa_j) - kappa_l))

    Hermitian, positive semidefinite, M[j,j] = 1 - |r_j|^2 exactly
    (the absorbed flux balances the reflection deficit).
    """
    b = amps if col_amps is None else col_amps
    overlap = np.conj(amps.t)[:, None] * b.t[None, :] / (
        1j * (np.conj(amps.kappa)[:, None] - b.kappa[None, :])
    )
    scale = (
        2.0 * step.v0 * step.mass / (step.hbar**2 * np.sqrt(np.outer(amps.k, b.k)))
    )
    return scale * overlap


def step_detection_weights(
    step: AbsorbingStepParams, amps: StepAmplitudes
) -> np.ndarray:
    """Per-momentum absorption probabilities, validated for reweighting."""
    d = amps.detection_probability
    if np.any(d < _DETECTION_FLOOR):
        raise SingularReweightingError(
            "absorption probability underflows at the smallest grid "
            "wavenumbers; the packet support reaches k = 0"
        )
    return d


def compute_curves(
    step: AbsorbingStepParams,
    packet: DiscretizedPacket,
    times: np.ndarray,
    outputs: Iterable[str] = ("Pi", "Pi_ON", "Pi_K", "J"),
    chunk_size: int = 512,
) -> ArrivalCurves:
    """Step-model arrival densities under the same column names as the
    two-channel engine, so scenario plumbing and comparisons are shared.
    """
    outputs = list(outputs)
    unknown = set(outputs) - set(KNOWN_OUTPUTS)
    if unknown:
        raise ValueError(f"unknown outputs: {sorted(unknown)}")
    times = np.asarray(times, dtype=float)
    omega = phase_frequencies(packet.k, step.mass, step.hbar)
    base = flux_scaled_base(packet, step.mass, step.hbar)
    cols: dict[str, np.ndarray] = {}

    kernel_outputs = [n for n in outputs if n in ("Pi", "Pi_ON", "Pi_J")]
    if kernel_outputs:
        amps = step_amplitudes(step, packet.k)
        kernel = absorption_kernel(step, amps)
        if "Pi" in outputs:
            cols["Pi"] = quadratic_form_series(times, base, omega, kernel, chunk_size)
        if "Pi_ON" in outputs or "Pi_J" in outputs:
            inv_d = 1.0 / step_detection_weights(step, amps)
            if "Pi_ON" in outputs:
                half = np.sqrt(inv_d)
                cols["Pi_ON"] = quadratic_form_series(
                    times, base, omega, half[:, None] * kernel * half[None, :], chunk_size
                )
            if "Pi_J" in outputs:
                # one-sided reweighting, real part: arithmetic-mean kernel
                cols["Pi_J"] = quadratic_form_series(
                    times, base, omega, inv_d[:, None] * kernel, chunk_size
                )
    if "Pi_K" in outputs:
        cols["Pi_K"] = rank_one_series(times, base, omega)
    if "J" in outputs:
        cols["J"] = free_flux_series(packet, times, step.mass, step.hbar)

    return ArrivalCurves(times=times, columns={n: cols[n] for n in outputs})


def position_state(
    step: AbsorbingStepParams,
    packet: DiscretizedPacket,
    x: np.ndarray,
    t: float = 0.0,
) -> np.ndarray:
    """Spectral synthesis of the one-channel wave function psi(x, t).

    Quadrature over the packet grid of the stationary step states
    (incident plus reflected wave left of the edge, decaying
    transmitted wave inside).  Lets grid-free consistency checks probe
    the underlying PDE pointwise.
    """
    x = np.asarray(x, dtype=float)
    amps = step_amplitudes(step, packet.k)
    weight = packet.w * packet.psi * np.exp(
        -0.5j * step.hbar * packet.k**2 * t / step.mass
    )
    out = np.empty(x.shape, dtype=complex)
    left = x <= 0.0
    xl = x[left]
    out[left] = np.exp(1j * np.outer(xl, packet.k)) @ weight + np.exp(
        -1j * np.outer(xl, packet.k)
    ) @ (weight * amps.r)
    xr = x[~left]
    out[~left] = np.exp(1j * np.outer(xr, amps.kappa)) @ (weight * amps.t)
    return out / math.sqrt(2.0 * math.pi)


def detection_loss(step: AbsorbingStepParams, packet: DiscretizedPacket) -> float:
    """Never-absorbed fraction: the reflected norm at late times."""
    amps = step_amplitudes(step, packet.k)
    return float(np.sum(packet.w * np.abs(packet.psi) ** 2 * np.abs(amps.r) ** 2))


def predicted_time_integrals(
    step: AbsorbingStepParams, packet: DiscretizedPacket
) -> dict:
    """Closed-form values the time integrals must reproduce."""
    detected = 1.0 - detection_loss(step, packet)
    return {
        "Pi": detected,
        "Pi_ON": 1.0,
        "Pi_J": 1.0,
        "Pi_K": 1.0,
        "survival": 1.0 - detected,
    }
