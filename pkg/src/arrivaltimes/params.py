"""Physical constants, model parameters, and unit helpers.

Everything internal is SI: wavenumbers in rad/m, rates in 1/s, times in
seconds.  Scenario files may use lab-friendly units (cm/s, um, us); the
conversion helpers here are the single place where those factors live.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s
ATOMIC_MASS = 1.66053906660e-27  # kg

# Cs-133 D2 line: natural linewidth and atomic mass.
GAMMA_CESIUM = 33.3e6  # 1/s
MASS_CESIUM = 132.905451933 * ATOMIC_MASS  # kg


def wavenumber_from_velocity(v_m_per_s: float, mass: float = MASS_CESIUM) -> float:
    """Mean wavenumber k = m v / hbar for a packet with mean velocity v."""
    return mass * v_m_per_s / HBAR


def sigma_k_from_velocity_spread(dv_m_per_s: float, mass: float = MASS_CESIUM) -> float:
    return mass * dv_m_per_s / HBAR


def sigma_k_from_position_spread(dx_m: float) -> float:
    """Momentum width of a minimum-uncertainty Gaussian with spatial width dx."""
    return 1.0 / (2.0 * dx_m)


@dataclass(frozen=True)
class LaserAtomParams:
    """Two-level atom crossing into a half-space laser field.

    gamma: spontaneous-emission rate of the excited state (1/s).
    omega: on-resonance Rabi frequency of the driving field (1/s).
    mass:  atomic mass (kg).
    """

    gamma: float
    omega: float
    mass: float = MASS_CESIUM
    hbar: float = HBAR

    def __post_init__(self) -> None:
        from .errors import ValidationError

        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValidationError(f"gamma must be positive and finite, got {self.gamma}")
        if self.omega < 0.0 or not math.isfinite(self.omega):
            raise ValidationError(f"omega must be >= 0 and finite, got {self.omega}")
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValidationError(f"mass must be positive and finite, got {self.mass}")
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ValidationError(f"hbar must be positive and finite, got {self.hbar}")

    @property
    def alpha(self) -> complex:
        """Damping discriminant sqrt(1 - 4 omega^2/gamma^2), principal branch.

        Real in the overdamped regime (omega < gamma/2), purely imaginary
        in the underdamped one.  Vanishes at critical damping, where the
        internal eigenvalue pair becomes defective.
        """
        return cmath.sqrt(1.0 - 4.0 * (self.omega / self.gamma) ** 2)

    @property
    def kappa0(self) -> float:
        """Wavenumber scale sqrt(m gamma / hbar) of the decay region."""
        return math.sqrt(self.mass * self.gamma / self.hbar)

    @property
    def internal_eigenvalues(self) -> tuple[complex, complex]:
        """Complex eigenfrequencies (lambda_plus, lambda_minus) of the driven
        internal state, in rad/s.  Amplitudes evolve as exp(-i lambda t), and
        Im(lambda) <= 0 so both branches decay; lambda_plus is the slow one.
        """
        a = self.alpha
        lam_p = 0.25j * self.gamma * (-1.0 + a)
        lam_m = 0.25j * self.gamma * (-1.0 - a)
        return lam_p, lam_m

    def to_one_channel(self) -> "AbsorbingStepParams":
        """Adiabatic reduction to a single channel with an imaginary step.

        Valid for gamma >> omega: the excited state follows the ground
        state instantly and the net effect is absorption at rate
        omega^2/gamma, i.e. a potential -i V0 with V0 = hbar omega^2 / (2 gamma).
        """
        v0 = self.hbar * self.omega**2 / (2.0 * self.gamma)
        return AbsorbingStepParams(v0=v0, mass=self.mass, hbar=self.hbar)


@dataclass(frozen=True)
class AbsorbingStepParams:
    """One-channel comparison model: V(x) = -i V0 for x > 0, else 0."""

    v0: float
    mass: float = MASS_CESIUM
    hbar: float = HBAR

    def __post_init__(self) -> None:
        from .errors import ValidationError

        if not (self.v0 > 0.0 and math.isfinite(self.v0)):
            raise ValidationError(f"v0 must be positive and finite, got {self.v0}")
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValidationError(f"mass must be positive and finite, got {self.mass}")
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ValidationError(f"hbar must be positive and finite, got {self.hbar}")

    @property
    def absorption_rate(self) -> float:
        """Local decay rate 2 V0 / hbar of the norm inside the step."""
        return 2.0 * self.v0 / self.hbar
