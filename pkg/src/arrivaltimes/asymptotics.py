"""Limiting regimes of the laser model and convergence diagnostics.

Two limits matter.  Strong decay (gamma large at fixed omega/gamma)
turns the beam edge into a hard wall with a universal reflection
correction governed by three constants that depend only on the damping
discriminant alpha.  Strong drive (omega >> gamma) makes the arrival
density an exponentially lagged copy of the ideal free one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .kernels import (
    compute_curves,
    flux_scaled_base,
    phase_frequencies,
    quadratic_form_series,
    rank_one_series,
)
from .packets import DiscretizedPacket
from .params import HBAR, MASS_CESIUM, LaserAtomParams
from .scattering import scattering_amplitudes


@dataclass(frozen=True)
class OverdampedConstants:
    """Strong-decay reflection constants as functions of alpha alone."""

    alpha: complex
    c1: complex
    c2: complex
    c3: complex


def overdamped_constants(alpha: complex) -> OverdampedConstants:
    """Closed forms of the three strong-decay constants.

    Written via the branch amplitudes a_p = sqrt((1-alpha)/2) and
    a_m = sqrt((1+alpha)/2) of the scaled wavenumbers at zero incident
    momentum.  Finite for 0 < |alpha| < 1; degenerate at alpha = 0
    (critical damping) and alpha = +-1 (drive off).
    """
    a = complex(alpha)
    if abs(a) < 1e-12 or abs(a - 1.0) < 1e-12 or abs(a + 1.0) < 1e-12:
        raise ValidationError(
            f"overdamped constants degenerate at alpha = {alpha}"
        )
    a_p = cmath.sqrt((1.0 - a) / 2.0)
    a_m = cmath.sqrt((1.0 + a) / 2.0)
    s = a + a_m - a_p
    c1 = (a + a_m**3 - a_p**3) / (a_p * a_m * s)
    c2 = 2.0 * (a_m - a_p) / s
    c3 = 2.0 * a_p * a_m * s
    return OverdampedConstants(alpha=a, c1=c1, c2=c2, c3=c3)


def fit_overdamped_constants(
    omega_over_gamma: float,
    k: float = 2e7,
    gamma_values: Sequence[float] = (3.33e17, 1.332e18),
    mass: float = MASS_CESIUM,
    hbar: float = HBAR,
) -> tuple[complex, complex]:
    """Estimate c1 and c2 from the exact reflection amplitudes.

    In the strong-decay family gamma -> infinity at fixed omega/gamma,

        r1 = -1 + 2 k c1 / s + O((k/s)^2),   s = sqrt(i m gamma / hbar)
        r2 = -i k c2 / s + O((k/s)^2)

    so (r1 + 1) s / 2k and i r2 s / k estimate the constants; a two-point
    Richardson step in 1/|s| removes the next order.  Defaults put
    k/|s| ~ 1e-7, far into the asymptotic regime.
    """
    ests = []
    for gamma in gamma_values:
        params = LaserAtomParams(
            gamma=gamma, omega=omega_over_gamma * gamma, mass=mass, hbar=hbar
        )
        amps = scattering_amplitudes(params, np.array([k]))
        s = cmath.sqrt(1j * mass * gamma / hbar)
        c1_est = complex((amps.r1[0] + 1.0) * s / (2.0 * k))
        c2_est = complex(1j * amps.r2[0] * s / k)
        ests.append((c1_est, c2_est, 1.0 / abs(s)))
    (a1, b1, h1), (a2, b2, h2) = ests[:2]
    c1_fit = (a2 * h1 - a1 * h2) / (h1 - h2)
    c2_fit = (b2 * h1 - b1 * h2) / (h1 - h2)
    return c1_fit, c2_fit


def strong_decay_closure(omega_over_gamma: float) -> float:
    """Norm-closure identity of the strong-decay interface state.

    The x-integral of the squared interface solution (reflected
    evanescent part on x<0 plus the two transmitted branches on x>0),
    multiplied by the renormalization prefactor sqrt(2 m gamma/hbar) /
    (4 c1), must equal exactly 1; returned so tests can assert it.
    Dimensionless: evaluated in scaled units where m = gamma = hbar = 1.
    """
    r = omega_over_gamma
    alpha = cmath.sqrt(1.0 - 4.0 * r * r)
    c = overdamped_constants(alpha)
    q = cmath.sqrt(1j)  # scaled sqrt(i m gamma / hbar)
    k_p = q * cmath.sqrt((1.0 - alpha) / 2.0)
    k_m = q * cmath.sqrt((1.0 + alpha) / 2.0)
    u_p = 1.0 + cmath.sqrt((1.0 + alpha) / 2.0)  # coefficient on e^{i k_p x}
    u_m = 1.0 + cmath.sqrt((1.0 - alpha) / 2.0)  # coefficient on e^{i k_m x}
    neg = abs(c.c2) ** 2 / (2.0 * q.imag)
    pos = (
        abs(u_p) ** 2 / (2.0 * k_p.imag)
        + abs(u_m) ** 2 / (2.0 * k_m.imag)
        + 2.0 * (u_p * u_m.conjugate() / (k_p - k_m.conjugate())).imag
    )
    pos *= 16.0 * r * r / abs(c.c3) ** 2
    value = (neg + pos) * math.sqrt(2.0) / (4.0 * c.c1)
    # imaginary part is zero up to roundoff for any valid alpha
    return float(value.real)


def strong_drive_amplitudes(
    params: LaserAtomParams, k: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Leading-order reflection amplitudes for omega >> gamma.

    r1 ~ -1 + (1 - i) k sqrt(hbar / m omega)
    r2 ~    -(1 + i) k sqrt(hbar / m omega)

    The detection probability follows as 1 - |r1|^2 ~ 2 k sqrt(hbar/m omega).
    Caller owns regime validity (k << sqrt(m omega / hbar), gamma << omega).
    """
    k = np.asarray(k, dtype=float)
    eps = k * math.sqrt(params.hbar / (params.mass * params.omega))
    return -1.0 + (1.0 - 1.0j) * eps, -(1.0 + 1.0j) * eps


def delay_kernel(params: LaserAtomParams, k: np.ndarray) -> np.ndarray:
    """Kernel of the strong-drive emission-lag model.

    A strongly driven atom spends half its time excited, so once inside
    the beam it emits at rate gamma/2; smearing the ideal free-arrival
    density with (gamma/2) exp(-(gamma/2) t) multiplies the (j,l)
    frequency component by gamma / (gamma + i hbar (k_j^2 - k_l^2)/m).
    Hermitian, ones on the diagonal (so the time integral stays 1).
    """
    k = np.asarray(k, dtype=float)
    nu = 0.5 * params.hbar * (k[:, None] ** 2 - k[None, :] ** 2) / params.mass
    return params.gamma / (params.gamma + 2j * nu)


def delay_kernel_series(
    params: LaserAtomParams,
    packet: DiscretizedPacket,
    times: np.ndarray,
    chunk_size: int = 512,
) -> np.ndarray:
    """Strong-drive approximation to the renormalized arrival density."""
    omega = phase_frequencies(packet.k, params.mass, params.hbar)
    base = flux_scaled_base(packet, params.mass, params.hbar)
    return quadratic_form_series(
        times, base, omega, delay_kernel(params, packet.k), chunk_size
    )


@dataclass(frozen=True)
class ConvergenceRow:
    gamma_multiplier: float
    sup_dist: float
    l1_dist: float


def convergence_report(
    base_params: LaserAtomParams,
    packet: DiscretizedPacket,
    times: np.ndarray,
    gamma_multipliers: Sequence[float],
    mode: str = "fixed-omega-over-gamma",
) -> list[ConvergenceRow]:
    """Distance table along a family of scaled decay rates.

    mode 'fixed-omega-over-gamma' scales omega with gamma: the hard
    wall limit, in which the renormalized density Pi_ON converges to
    the ideal free density; rows report its sup and L1 distance from
    the ideal curve.

    mode 'fixed-v0' scales omega with sqrt(gamma), keeping the
    equivalent absorbing-step strength hbar omega^2 / (2 gamma) fixed:
    rows report the distance of the raw emission rate Pi from the
    one-channel absorbing-step Pi the family converges to.
    """
    times = np.asarray(times, dtype=float)
    if mode == "fixed-omega-over-gamma":
        base = flux_scaled_base(packet, base_params.mass, base_params.hbar)
        omega_ph = phase_frequencies(packet.k, base_params.mass, base_params.hbar)
        reference = rank_one_series(times, base, omega_ph)
        column = "Pi_ON"
    elif mode == "fixed-v0":
        from . import cpot

        step = base_params.to_one_channel()
        reference = cpot.compute_curves(step, packet, times, outputs=("Pi",))["Pi"]
        column = "Pi"
    else:
        raise ValidationError(f"unknown scaling mode {mode!r}")
    ref_peak = float(np.max(reference))
    ref_int = float(np.trapezoid(reference, times))
    rows = []
    for s in gamma_multipliers:
        if mode == "fixed-omega-over-gamma":
            omega = base_params.omega * s
        else:
            omega = base_params.omega * math.sqrt(s)
        params = LaserAtomParams(
            gamma=base_params.gamma * s,
            omega=omega,
            mass=base_params.mass,
            hbar=base_params.hbar,
        )
        curves = compute_curves(params, packet, times, outputs=(column,))
        diff = curves[column] - reference
        rows.append(
            ConvergenceRow(
                gamma_multiplier=float(s),
                sup_dist=float(np.max(np.abs(diff)) / ref_peak),
                l1_dist=float(np.trapezoid(np.abs(diff), times) / ref_int),
            )
        )
    return rows
