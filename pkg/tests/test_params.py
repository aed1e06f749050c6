import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arrivaltimes import (
    GAMMA_CESIUM,
    HBAR,
    MASS_CESIUM,
    AbsorbingStepParams,
    LaserAtomParams,
    ValidationError,
    sigma_k_from_position_spread,
    sigma_k_from_velocity_spread,
    wavenumber_from_velocity,
)


def test_unit_helpers_roundtrip():
    k = wavenumber_from_velocity(0.02)
    assert k == pytest.approx(MASS_CESIUM * 0.02 / HBAR)
    assert sigma_k_from_velocity_spread(0.0048) == pytest.approx(
        MASS_CESIUM * 0.0048 / HBAR
    )
    # minimum uncertainty: sigma_k sigma_x = 1/2
    assert sigma_k_from_position_spread(0.106e-6) * 0.106e-6 == pytest.approx(0.5)


def test_alpha_regimes():
    over = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.33 * GAMMA_CESIUM)
    assert over.alpha.imag == 0.0
    assert 0.0 < over.alpha.real < 1.0
    under = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.66 * GAMMA_CESIUM)
    assert under.alpha.real == pytest.approx(0.0, abs=1e-15)
    assert under.alpha.imag > 0.0
    off = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.0)
    assert off.alpha == 1.0


def test_internal_eigenvalues_decay_and_order():
    p = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.2 * GAMMA_CESIUM)
    lam_p, lam_m = p.internal_eigenvalues
    assert lam_p.imag < 0.0 and lam_m.imag < 0.0
    # lambda_plus is the slow branch
    assert abs(lam_p.imag) < abs(lam_m.imag)
    # trace: lam_p + lam_m = -i gamma / 2
    assert lam_p + lam_m == pytest.approx(-0.5j * p.gamma)
    # determinant: lam_p * lam_m = -omega^2 / 4... in rad/s^2
    assert lam_p * lam_m == pytest.approx(complex(-0.25 * p.omega**2), rel=1e-12)


def test_kappa0_scale():
    p = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.1 * GAMMA_CESIUM)
    assert p.kappa0 == pytest.approx(math.sqrt(p.mass * p.gamma / p.hbar))


def test_to_one_channel_strength():
    p = LaserAtomParams(gamma=10 * GAMMA_CESIUM, omega=0.15 * 10 * GAMMA_CESIUM)
    step = p.to_one_channel()
    assert step.v0 == pytest.approx(p.hbar * p.omega**2 / (2.0 * p.gamma))
    assert step.absorption_rate == pytest.approx(p.omega**2 / p.gamma)
    # invariant of the strong-decay family (s gamma, sqrt(s) omega)
    scaled = LaserAtomParams(gamma=100 * p.gamma, omega=10 * p.omega)
    assert scaled.to_one_channel().v0 == pytest.approx(step.v0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gamma=0.0, omega=1.0),
        dict(gamma=-1.0, omega=1.0),
        dict(gamma=math.inf, omega=1.0),
        dict(gamma=1.0, omega=-1.0),
        dict(gamma=1.0, omega=math.nan),
        dict(gamma=1.0, omega=1.0, mass=0.0),
        dict(gamma=1.0, omega=1.0, hbar=-1.0),
    ],
)
def test_laser_params_validation(kwargs):
    with pytest.raises(ValidationError):
        LaserAtomParams(**kwargs)


@pytest.mark.parametrize("v0", [0.0, -1e-30, math.inf])
def test_step_params_validation(v0):
    with pytest.raises(ValidationError):
        AbsorbingStepParams(v0=v0)


@settings(max_examples=200, deadline=None)
@given(
    gamma=st.floats(1e5, 1e12),
    ratio=st.floats(1e-3, 20.0),
)
def test_eigenvalue_identities_hold_everywhere(gamma, ratio):
    p = LaserAtomParams(gamma=gamma, omega=ratio * gamma)
    lam_p, lam_m = p.internal_eigenvalues
    # both branches decay for any drive
    assert lam_p.imag <= 0.0 and lam_m.imag < 0.0
    assert complex(lam_p + lam_m) == pytest.approx(-0.5j * gamma, rel=1e-12)
    prod = lam_p * lam_m
    assert prod.real == pytest.approx(-0.25 * p.omega**2, rel=1e-9)
    assert abs(prod.imag) <= 1e-9 * abs(prod.real) + 1e-30
