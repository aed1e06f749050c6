"""Arrival-time densities as quadratic forms over the momentum grid.

Every distribution this package produces has the shape

    P(t) = sum_{j,l} conj(b_j) K[j,l] b_l exp(i (w_j - w_l) t)

with w_j = hbar k_j^2 / 2m the free phase frequencies and
b_j = w_quad_j psi(k_j) sqrt(hbar k_j / 2 pi m) the flux-scaled packet
amplitudes.  The kernel K decides which distribution:

    ones                        ideal free-arrival density (unit integral)
    emission kernel M           first-photon emission rate of the laser model
    M scaled by 1/sqrt(d_j d_l) detection-renormalized arrival density
    M scaled by (1/d_j+1/d_l)/2 arithmetic-mean renormalization (flux-like)

where d_j = 1 - |r1(k_j)|^2 is the per-momentum detection probability.
M is Hermitian positive semidefinite with diagonal exactly d_j, so the
renormalized density integrates to one.  The renormalizations are
implemented on the amplitude side (b_j -> b_j / sqrt(d_j) and the
mixed-base form), never by materializing rescaled matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import SingularReweightingError
from .packets import DiscretizedPacket
from .params import LaserAtomParams
from .scattering import ScatteringAmplitudes, scattering_amplitudes

# below this, 1/sqrt(d) overflows badly and the reweighting is garbage
_DETECTION_FLOOR = 1e-300


def phase_frequencies(k: np.ndarray, mass: float, hbar: float) -> np.ndarray:
    """Free dispersion w(k) = hbar k^2 / 2m in rad/s."""
    return 0.5 * hbar * np.asarray(k) ** 2 / mass


def flux_scaled_base(packet: DiscretizedPacket, mass: float, hbar: float) -> np.ndarray:
    """Quadrature-weighted amplitudes b_j = w_j psi_j sqrt(hbar k_j / 2 pi m)."""
    return packet.w * packet.psi * np.sqrt(hbar * packet.k / (2.0 * math.pi * mass))


def emission_kernel(
    params: LaserAtomParams,
    amps: ScatteringAmplitudes,
    col_amps: ScatteringAmplitudes | None = None,
) -> np.ndarray:
    """Flux-normalized first-photon kernel on the grid of amps.

    M[j,l] = gamma m / (hbar sqrt(k_j k_l)) *
             2 pi integral dx conj(phi2_kj(x)) phi2_kl(x)

    evaluated in closed form from the piecewise-exponential stationary
    states (the 2 pi cancels the continuum normalization of the two
    states).  Hermitian, positive semidefinite, M[j,j] = 1 - |r1_j|^2.

    With col_amps given, returns the rectangular block M[j,l] between
    two different wavenumber sets (used by the frequency-domain path);
    Hermiticity then applies to the pair of blocks, not to this one.

    Every denominator below is i (conj(z_j) - z_l) whose real part is
    Im z_j + Im z_l > 0, so no confluent special case is ever needed:
    the branch conditions keep Im q and Im k_pm strictly positive for
    any gamma > 0.
    """
    b = amps if col_amps is None else col_amps
    # x < 0: excited wave r2 e^{-iqx}; integral_-inf^0 gives the same
    # 1/(i (conj q_j - q_l)) shape as the x > 0 pieces
    t = np.conj(amps.r2)[:, None] * b.r2[None, :] / (
        1j * (np.conj(amps.q)[:, None] - b.q[None, :])
    )
    for ga, ka in ((amps.g_plus, amps.k_plus), (amps.g_minus, amps.k_minus)):
        for gb, kb in ((b.g_plus, b.k_plus), (b.g_minus, b.k_minus)):
            t = t + np.conj(ga)[:, None] * gb[None, :] / (
                1j * (np.conj(ka)[:, None] - kb[None, :])
            )
    scale = params.gamma * params.mass / (params.hbar * np.sqrt(np.outer(amps.k, b.k)))
    return scale * t


def detection_weights(
    params: LaserAtomParams, amps: ScatteringAmplitudes
) -> np.ndarray:
    """Per-momentum detection probabilities d_j, validated for reweighting.

    Raises SingularReweightingError when renormalizing makes no sense:
    with the drive off nothing is ever emitted (the kernel vanishes
    identically), and nodes with d below the floating-point floor mean
    the packet support touches k = 0.
    """
    if params.omega == 0.0:
        raise SingularReweightingError(
            "no photon is ever emitted at omega = 0; the renormalized "
            "distribution does not exist"
        )
    d = amps.detection_probability
    if np.any(d < _DETECTION_FLOOR):
        raise SingularReweightingError(
            "detection probability underflows on the grid (packet support "
            "reaches k ~ 0 where everything is reflected)"
        )
    return d


def reweighted_amplitudes(
    packet: DiscretizedPacket, params: LaserAtomParams, amps: ScatteringAmplitudes
) -> np.ndarray:
    """The renormalized momentum amplitude psi(k_j) / sqrt(d_j).

    Deliberately NOT renormalized to unit norm: the reweighting itself
    carries the normalization of the renormalized arrival density.
    This is the 'distorted packet' view of the renormalization.
    """
    return packet.psi / np.sqrt(detection_weights(params, amps))


def quadratic_form_series(
    times: np.ndarray,
    base: np.ndarray,
    omega: np.ndarray,
    kernel: np.ndarray,
    chunk_size: int = 512,
) -> np.ndarray:
    """sum_jl conj(b_j e^{-i w_j t}) K[j,l] b_l e^{-i w_l t} per time.

    Returns the real part; for Hermitian kernels the form is real up to
    roundoff anyway.  Chunked over times so the work is one zgemm per
    chunk.
    """
    times = np.asarray(times, dtype=float)
    out = np.empty(times.size, dtype=float)
    for start in range(0, times.size, chunk_size):
        t = times[start : start + chunk_size]
        c = base[:, None] * np.exp(-1j * np.outer(omega, t))
        g = kernel @ c
        out[start : start + t.size] = np.einsum("ji,ji->i", np.conj(c), g).real
    return out


def rank_one_series(times: np.ndarray, base: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """|sum_j b_j e^{-i w_j t}|^2, the all-ones-kernel special case."""
    times = np.asarray(times, dtype=float)
    s = np.exp(-1j * np.outer(times, omega)) @ base
    return np.abs(s) ** 2


def free_flux_series(
    packet: DiscretizedPacket, times: np.ndarray, mass: float, hbar: float
) -> np.ndarray:
    """Probability flux of the freely moving packet through x = 0.

    J(t) = (hbar / 2 pi m) Re[ conj(psi(0,t)) * (-i d/dx psi)(0,t) ],
    evaluated directly from the momentum samples.  Not positive in
    general; backflow shows up as negative lobes.
    """
    times = np.asarray(times, dtype=float)
    omega = phase_frequencies(packet.k, mass, hbar)
    e = np.exp(-1j * np.outer(times, omega))
    p = e @ (packet.w * packet.psi)
    q = e @ (packet.w * packet.psi * packet.k)
    return (hbar / (2.0 * math.pi * mass)) * (np.conj(p) * q).real


def survival_series(times: np.ndarray, emission: np.ndarray) -> np.ndarray:
    """Remaining norm N(t) = 1 - integral_0^t of the emission rate.

    Trapezoid accumulation on the given grid; the only norm loss in the
    model is photon emission.
    """
    from scipy.integrate import cumulative_trapezoid

    return 1.0 - cumulative_trapezoid(emission, times, initial=0.0)


@dataclass(frozen=True)
class ArrivalCurves:
    """Bundle of arrival-time densities on a common time grid."""

    times: np.ndarray
    columns: dict  # name -> ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def names(self) -> list:
        return list(self.columns)


KNOWN_OUTPUTS = ("Pi", "Pi_ON", "Pi_J", "Pi_K", "J")


def compute_curves(
    params: LaserAtomParams,
    packet: DiscretizedPacket,
    times: np.ndarray,
    outputs: Iterable[str] = ("Pi", "Pi_ON", "Pi_K", "J"),
    chunk_size: int = 512,
) -> ArrivalCurves:
    """Laser-model arrival densities, named by CSV column convention.

        Pi     photon emission rate (integral = detection probability)
        Pi_ON  renormalized arrival density, geometric mean (integral 1)
        Pi_J   renormalized arrival density, arithmetic mean (integral 1,
               not positive definite; tends to the flux for strong decay)
        Pi_K   ideal free-arrival density
        J      free probability flux at the beam edge

    Pi, Pi_ON and Pi_J share one emission kernel; per time chunk the
    cost is two kernel matvec blocks regardless of how many of the
    three are requested.
    """
    outputs = list(outputs)
    unknown = set(outputs) - set(KNOWN_OUTPUTS)
    if unknown:
        raise ValueError(f"unknown outputs: {sorted(unknown)}")
    times = np.asarray(times, dtype=float)
    omega = phase_frequencies(packet.k, params.mass, params.hbar)
    base = flux_scaled_base(packet, params.mass, params.hbar)
    cols: dict[str, np.ndarray] = {}

    kernel_outputs = [n for n in outputs if n in ("Pi", "Pi_ON", "Pi_J")]
    if kernel_outputs:
        amps = scattering_amplitudes(params, packet.k)
        kernel = emission_kernel(params, amps)
        inv_d = None
        if "Pi_ON" in outputs or "Pi_J" in outputs:
            inv_d = 1.0 / detection_weights(params, amps)
        for name in kernel_outputs:
            cols[name] = np.empty(times.size, dtype=float)
        for start in range(0, times.size, chunk_size):
            t = times[start : start + chunk_size]
            sl = slice(start, start + t.size)
            c = base[:, None] * np.exp(-1j * np.outer(omega, t))
            if "Pi" in outputs or "Pi_J" in outputs:
                g = kernel @ c
                if "Pi" in outputs:
                    cols["Pi"][sl] = np.einsum("ji,ji->i", np.conj(c), g).real
                if "Pi_J" in outputs:
                    # Re[(b/d)^dag M b]: the two one-sided reweightings
                    # average into the arithmetic-mean kernel
                    cols["Pi_J"][sl] = np.einsum(
                        "ji,ji->i", np.conj(inv_d[:, None] * c), g
                    ).real
            if "Pi_ON" in outputs:
                c_on = c * (np.sqrt(inv_d))[:, None]
                g_on = kernel @ c_on
                cols["Pi_ON"][sl] = np.einsum("ji,ji->i", np.conj(c_on), g_on).real
    if "Pi_K" in outputs:
        cols["Pi_K"] = rank_one_series(times, base, omega)
    if "J" in outputs:
        cols["J"] = free_flux_series(packet, times, params.mass, params.hbar)

    return ArrivalCurves(times=times, columns={n: cols[n] for n in outputs})


def detection_loss(
    params: LaserAtomParams, packet: DiscretizedPacket
) -> float:
    """Survival probability N(infinity): the reflected fraction.

    Equals 1 minus the time integral of the emission rate.
    """
    from .scattering import survival_probability

    amps = scattering_amplitudes(params, packet.k)
    return survival_probability(params, packet.w, packet.psi, amps)


def predicted_time_integrals(
    params: LaserAtomParams, packet: DiscretizedPacket
) -> dict:
    """Closed-form values the time integrals must reproduce.

    integral Pi dt    = sum w |psi|^2 d        (detection probability)
    integral Pi_ON dt = 1
    integral Pi_J dt  = 1
    integral Pi_K dt  = 1
    survival N(inf)   = sum w |psi|^2 |r1|^2 = 1 - integral Pi dt
    """
    amps = scattering_amplitudes(params, packet.k)
    p = packet.w * np.abs(packet.psi) ** 2
    detected = float(np.sum(p * amps.detection_probability))
    return {
        "Pi": detected,
        "Pi_ON": 1.0,
        "Pi_J": 1.0,
        "Pi_K": 1.0,
        "survival": 1.0 - detected,
    }
