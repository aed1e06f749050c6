"""Frequency-domain tools: emission-lag removal and direct spectra.

The detected arrival density is, to leading order in the packet's
energy spread, the ideal free-arrival density convolved with a causal
emission response W(t) whose Fourier transform is the reciprocal of a
cubic polynomial in i nu.  Removing the lag is therefore exact
polynomial division in frequency, equivalently a third-order
differential operator in time: no regularization is involved, and the
operation is well posed whenever the record is long enough that the
density has decayed at both ends.

Transform convention: f~(nu) = integral e^{-i nu t} f(t) dt.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft
from scipy.signal import windows

from .errors import NumericalDegeneracyError, ValidationError, WraparoundError
from .kernels import detection_weights, emission_kernel
from .packets import GaussianPacket, MomentumGrid, discretize
from .params import LaserAtomParams
from .scattering import scattering_amplitudes


def transfer_coefficients(params: LaserAtomParams) -> tuple[float, float, float]:
    """Coefficients (c1, c2, c3) of the inverse emission transfer.

    1 / W~(nu) = 1 + c1 (i nu) + c2 (i nu)^2 + c3 (i nu)^3

    Undefined with the drive off (nothing is ever emitted).
    """
    if params.omega == 0.0:
        raise ValidationError("emission transfer undefined for omega = 0")
    g = params.gamma
    w2 = params.omega**2
    return (g / w2 + 2.0 / g, 3.0 / w2, 2.0 / (g * w2))


def inverse_transfer(params: LaserAtomParams, nu: np.ndarray) -> np.ndarray:
    """1 / W~ evaluated on an array of angular frequencies."""
    c1, c2, c3 = transfer_coefficients(params)
    z = 1j * np.asarray(nu, dtype=float)
    return 1.0 + z * (c1 + z * (c2 + z * c3))


def emission_response(params: LaserAtomParams, t: np.ndarray) -> np.ndarray:
    """Causal emission response W(t) in closed form.

    The cubic 1/W~ has simple roots -gamma/2 and -(gamma/2)(1 -+ alpha),
    all in the left half plane, so W is a sum of three decaying
    exponentials with residues 1/P'(z_i).  W(0) = W'(0) = 0 and
    the response integrates to 1.  Degenerate at critical damping
    (omega = gamma/2) where the roots collide.
    """
    c1, c2, c3 = transfer_coefficients(params)
    a = params.alpha
    g = params.gamma
    if abs(a) < 1e-6 or abs(abs(a) - 1.0) < 1e-12:
        raise NumericalDegeneracyError(
            f"emission response has confluent poles near alpha = {a:.3g}"
        )
    poles = np.array(
        [-0.5 * g, -0.5 * g * (1.0 - a), -0.5 * g * (1.0 + a)], dtype=complex
    )
    dp = c1 + 2.0 * c2 * poles + 3.0 * c3 * poles**2
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    alive = t >= 0.0
    for z, r in zip(poles, dp):
        out[alive] += np.exp(z * t[alive]) / r
    # conjugate pole pairing (or all-real poles) makes W real
    return out.real


@dataclass(frozen=True)
class DeconvolutionResult:
    """Lag-removed density plus numerical hygiene indicators.

    amplification is the largest |1/W~| applied to any retained
    frequency; max_imag_residual is the largest spurious imaginary
    part relative to the output peak (roundoff indicator, the exact
    operation is purely real).
    """

    times: np.ndarray
    density: np.ndarray
    amplification: float
    max_imag_residual: float


def deconvolve(
    params: LaserAtomParams,
    times: np.ndarray,
    density: np.ndarray,
    pad_factor: int = 4,
    window_fraction: float = 0.0,
    decay_tol: float = 1e-10,
    amplification_limit: float = 1e6,
) -> DeconvolutionResult:
    """Remove the emission lag from a sampled arrival density.

    Requires a uniform time grid and a record whose density has decayed
    below decay_tol times its peak at both ends; the spectral
    differentiation underlying the inverse filter otherwise wraps tail
    mass around the record.  window_fraction > 0 additionally tapers
    that fraction of the record at each end with a raised cosine before
    transforming.
    """
    times = np.asarray(times, dtype=float)
    y = np.asarray(density, dtype=float)
    if times.ndim != 1 or times.shape != y.shape or times.size < 16:
        raise ValidationError("need matching 1-d arrays of at least 16 samples")
    steps = np.diff(times)
    dt = float(np.mean(steps))
    if dt <= 0.0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ValidationError("time grid must be uniform and increasing")
    peak = float(np.max(np.abs(y)))
    if peak == 0.0:
        raise ValidationError("density is identically zero")
    edge = max(abs(float(y[0])), abs(float(y[-1])))
    if edge > decay_tol * peak:
        raise WraparoundError(
            f"density has not decayed at the record ends "
            f"(edge/peak = {edge / peak:.3g}, need <= {decay_tol:g}); "
            "extend the time grid before deconvolving"
        )
    if not 0.0 <= window_fraction <= 0.5:
        raise ValidationError("window_fraction must lie in [0, 0.5]")
    if window_fraction > 0.0:
        y = y * windows.tukey(y.size, alpha=2.0 * window_fraction)
    n = y.size
    m = scipy.fft.next_fast_len(int(pad_factor) * n)
    spectrum = np.fft.fft(y, m)
    nu = 2.0 * math.pi * np.fft.fftfreq(m, d=dt)
    gain = inverse_transfer(params, nu)
    amplification = float(np.max(np.abs(gain)))
    if amplification > amplification_limit:
        warnings.warn(
            f"inverse transfer amplifies by {amplification:.3g} at the grid's "
            "Nyquist frequency; the record is sampled too finely for its "
            "noise level",
            RuntimeWarning,
            stacklevel=2,
        )
    recovered = np.fft.ifft(spectrum * gain)[:n]
    out_peak = float(np.max(np.abs(recovered.real)))
    residual = float(np.max(np.abs(recovered.imag)) / max(out_peak, 1e-300))
    return DeconvolutionResult(
        times=times,
        density=recovered.real,
        amplification=amplification,
        max_imag_residual=residual,
    )


def pi_on_spectrum(
    params: LaserAtomParams,
    packets: Sequence[GaussianPacket],
    nu: np.ndarray,
    n_nodes: int = 768,
    support_sigmas: float = 8.0,
) -> np.ndarray:
    """Spectrum of the renormalized arrival density, without time series.

    A frequency shift nu pairs each incident wavenumber k with the
    partner k' = sqrt(k^2 - 2 m nu / hbar), and the infinite time
    integral collapses the double momentum quadrature to one weighted
    sum of kernel entries between the two wavenumber sets:

        Pi_ON~(nu) = sum_j w_j conj(psi_j) psi(k'_j)
                     sqrt(k_j / k'_j) (d_j d'_j)^{-1/2} M(k_j, k'_j)

    Nodes whose partner leaves the positive-momentum half line are
    dropped; their packet amplitude is negligible whenever the shift is
    small against the packet's kinetic scale.  Pi_ON~(0) = 1 exactly,
    and negative shifts follow from conjugate symmetry of the spectrum
    of a real density.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    grid = MomentumGrid.for_packets(
        packets, n_nodes=n_nodes, support_sigmas=support_sigmas
    )
    disc = discretize(packets, grid, params.mass, params.hbar)
    amps = scattering_amplitudes(params, grid.nodes)
    det = detection_weights(params, amps)
    rescale = 1.0 / math.sqrt(disc.raw_norm)
    out = np.empty(nu.shape, dtype=complex)
    for i, shift in enumerate(nu):
        s = abs(float(shift))
        kp_sq = grid.nodes**2 - 2.0 * params.mass * s / params.hbar
        keep = kp_sq > 0.0
        kp = np.sqrt(kp_sq[keep])
        rows = amps.take(keep)
        cols = scattering_amplitudes(params, kp)
        pairs = np.diagonal(emission_kernel(params, rows, col_amps=cols))
        psi_col = np.zeros(kp.shape, dtype=complex)
        for p in packets:
            psi_col += p.weight * p.amplitude(kp, params.mass, params.hbar)
        psi_col *= rescale
        val = np.sum(
            disc.w[keep]
            * np.conj(disc.psi[keep])
            * psi_col
            * np.sqrt(rows.k / kp)
            / np.sqrt(det[keep] * detection_weights(params, cols))
            * pairs
        )
        out[i] = np.conj(val) if shift < 0.0 else val
    return out
