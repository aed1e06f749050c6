"""Stationary scattering states of the half-space laser model.

An atom in its ground state comes in from the left with momentum
hbar k > 0.  For x > 0 it is driven with Rabi frequency omega while the
excited state decays at rate gamma, described by a non-Hermitian
Hamiltonian acting on (ground, excited) spinors.  The scattering
solution for x <= 0 is

    phi_1 = e^{ikx} + r1 e^{-ikx}          (ground)
    phi_2 = r2 e^{-iqx}                    (excited, evanescent)

and for x >= 0 a superposition of the two dressed branches

    phi_a = c_plus  * e^{i k_plus x} * v_plus[a]
          + c_minus * e^{i k_minus x} * v_minus[a]

with internal eigenvectors v_pm = (1, 2 lambda_pm / omega).  All four
complex wavenumbers q, k_plus, k_minus carry positive imaginary part,
so everything transmitted decays and the only outgoing flux is the
reflected ground-state wave.

Amplitudes are computed in scaled units u = k / kappa0 with
kappa0 = sqrt(m gamma / hbar), which keeps every intermediate O(1)
over the full parameter range.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDegeneracyError
from .params import LaserAtomParams

# Relative floor for the matching determinant.  It only degenerates at
# critical damping (omega = gamma/2), where the dressed branches merge.
_DET_FLOOR = 1e-13


def sqrt_upper_half(z: np.ndarray | complex) -> np.ndarray:
    """Square root with Im >= 0; real results take the Re >= 0 sign.

    This is the physical branch for evanescent/outgoing waves written
    as e^{i kappa x} on x > 0.
    """
    s = np.sqrt(np.asarray(z, dtype=complex))
    s = np.where(s.imag < 0.0, -s, s)
    s = np.where((s.imag == 0.0) & (s.real < 0.0), -s, s)
    return s


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Matching coefficients for an array of incident wavenumbers.

    g_plus / g_minus are the excited-state amplitudes of the two
    transmitted branches (the eigenvector factor 2 lambda_pm / omega is
    already folded in, so phi_2(x>0) = g_plus e^{i k_plus x} + ...).
    lambda_plus / lambda_minus are the internal eigenfrequencies in
    rad/s and denominator is the (scaled, dimensionless) determinant of
    the matching system, kept for diagnostics.
    """

    k: np.ndarray
    q: np.ndarray
    k_plus: np.ndarray
    k_minus: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    g_plus: np.ndarray
    g_minus: np.ndarray
    lambda_plus: complex
    lambda_minus: complex
    denominator: np.ndarray

    @property
    def detection_probability(self) -> np.ndarray:
        """Probability 1 - |r1|^2 that an atom of momentum hbar k ever
        emits a photon (equivalently, is not reflected)."""
        return 1.0 - np.abs(self.r1) ** 2

    def take(self, idx: np.ndarray) -> "ScatteringAmplitudes":
        """Subset on the node axis; scalar fields carry over."""
        return dataclasses.replace(
            self,
            k=self.k[idx],
            q=self.q[idx],
            k_plus=self.k_plus[idx],
            k_minus=self.k_minus[idx],
            r1=self.r1[idx],
            r2=self.r2[idx],
            c_plus=self.c_plus[idx],
            c_minus=self.c_minus[idx],
            g_plus=self.g_plus[idx],
            g_minus=self.g_minus[idx],
            denominator=self.denominator[idx],
        )


def eigensystem(params: LaserAtomParams) -> tuple[complex, complex, np.ndarray]:
    """Eigenfrequencies and eigenvectors of the driven internal state.

    Returns (lambda_plus, lambda_minus, vectors) with vectors[:, i] the
    eigenvector belonging to branch i, normalized to first component 1
    where possible.  For omega = 0 the channels decouple and the
    eigenvectors are the channel basis itself (the generic form
    (1, 2 lambda / omega) is 0/0 there).
    """
    lam_p, lam_m = params.internal_eigenvalues
    if params.omega == 0.0:
        vecs = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
    else:
        vecs = np.array(
            [
                [1.0, 1.0],
                [2.0 * lam_p / params.omega, 2.0 * lam_m / params.omega],
            ],
            dtype=complex,
        )
    return lam_p, lam_m, vecs


def scattering_amplitudes(params: LaserAtomParams, k: np.ndarray) -> ScatteringAmplitudes:
    """Solve the matching problem for incident wavenumbers k > 0.

    Vectorized over k.  Raises NumericalDegeneracyError if the matching
    determinant underflows, which can only happen next to the critical
    point omega = gamma/2.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k <= 0.0):
        from .errors import ValidationError

        raise ValidationError("incident wavenumbers must be positive")

    kap0 = params.kappa0
    u = k / kap0
    alpha = params.alpha
    ratio = params.omega / params.gamma

    # internal eigenvalues over gamma
    lam_p = 0.25j * (-1.0 + alpha)
    lam_m = 0.25j * (-1.0 - alpha)

    q = sqrt_upper_half(u * u + 1.0j)
    k_p = sqrt_upper_half(u * u - 2.0 * lam_p)
    k_m = sqrt_upper_half(u * u - 2.0 * lam_m)

    det = lam_p * (q + k_p) * (u + k_m) - lam_m * (q + k_m) * (u + k_p)
    # scale of the two cancelling terms, for a relative underflow test
    scale = np.abs(lam_p * (q + k_p) * (u + k_m)) + np.abs(lam_m * (q + k_m) * (u + k_p))
    if params.omega > 0.0 and np.any(np.abs(det) <= _DET_FLOOR * scale):
        raise NumericalDegeneracyError(
            "matching determinant lost all precision (parameters are "
            "numerically at the critical point omega = gamma/2)"
        )

    r1 = (lam_p * (q + k_p) * (u - k_m) - lam_m * (q + k_m) * (u - k_p)) / det
    r2 = u * (k_m - k_p) * ratio / det
    c_p = -2.0 * u * (q + k_m) * lam_m / det
    c_m = 2.0 * u * (q + k_p) * lam_p / det
    # excited-state branch amplitudes c_pm * 2 lam_pm / ratio, written
    # with ratio in the numerator so omega = 0 needs no special case
    g_p = u * ratio * (q + k_m) / det
    g_m = -u * ratio * (q + k_p) / det

    return ScatteringAmplitudes(
        k=k, q=q * kap0, k_plus=k_p * kap0, k_minus=k_m * kap0,
        r1=r1, r2=r2, c_plus=c_p, c_minus=c_m, g_plus=g_p, g_minus=g_m,
        lambda_plus=lam_p * params.gamma, lambda_minus=lam_m * params.gamma,
        denominator=det,
    )


def stationary_state(
    amps: ScatteringAmplitudes, index: int, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate one stationary state on a position grid.

    Returns (phi_1, phi_2) in the continuum normalization, i.e. the
    incident wave is e^{ikx} / sqrt(2 pi).
    """
    x = np.asarray(x, dtype=float)
    k = amps.k[index]
    q = amps.q[index]
    kp = amps.k_plus[index]
    km = amps.k_minus[index]
    left = x <= 0.0

    phi1 = np.where(
        left,
        np.exp(1j * k * x) + amps.r1[index] * np.exp(-1j * k * x),
        amps.c_plus[index] * np.exp(1j * kp * x) + amps.c_minus[index] * np.exp(1j * km * x),
    )
    phi2 = np.where(
        left,
        amps.r2[index] * np.exp(-1j * q * x),
        amps.g_plus[index] * np.exp(1j * kp * x) + amps.g_minus[index] * np.exp(1j * km * x),
    )
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    return norm * phi1, norm * phi2


def matching_residual(amps: ScatteringAmplitudes) -> np.ndarray:
    """Max relative residual of the four continuity conditions at x = 0.

    A self-check: exact coefficients give ~1e-15.  Vectorized over the
    stored wavenumbers.
    """
    k = amps.k
    e1 = np.abs(1.0 + amps.r1 - (amps.c_plus + amps.c_minus))
    e2 = np.abs(amps.r2 - (amps.g_plus + amps.g_minus))
    e3 = np.abs(
        k * (1.0 - amps.r1) - (amps.k_plus * amps.c_plus + amps.k_minus * amps.c_minus)
    ) / k
    e4 = np.abs(
        -amps.q * amps.r2 - (amps.k_plus * amps.g_plus + amps.k_minus * amps.g_minus)
    ) / np.abs(amps.q)
    return np.max(np.stack([e1, e2, e3, e4]), axis=0)


def survival_probability(params: LaserAtomParams, weights: np.ndarray,
                         psi: np.ndarray, amps: ScatteringAmplitudes) -> float:
    """Asymptotic survival probability N(infinity) of the atom.

    For omega > 0 everything that is not reflected gets absorbed, so
    N(inf) = sum w |psi|^2 |r1|^2.  With the drive off nothing is ever
    emitted and the whole packet survives.
    """
    if params.omega == 0.0:
        return 1.0
    return float(np.sum(weights * np.abs(psi) ** 2 * np.abs(amps.r1) ** 2))


def critical_coupling_distance(params: LaserAtomParams) -> float:
    """|omega/gamma - 1/2|, how far the drive sits from critical damping."""
    return abs(params.omega / params.gamma - 0.5)


def internal_decay_rates(params: LaserAtomParams) -> tuple[float, float]:
    """(slow, fast) probability decay rates of the driven internal state.

    Useful for sizing burn-in windows and time steps: the slow branch
    sets how long an atom parked inside the beam takes to emit.
    """
    lam_p, lam_m = params.internal_eigenvalues
    rates = sorted((-2.0 * lam_p.imag, -2.0 * lam_m.imag))
    return rates[0], rates[1]
