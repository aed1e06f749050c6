import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from arrivaltimes import (
    GAMMA_CESIUM,
    GaussianPacket,
    LaserAtomParams,
    MomentumGrid,
    ValidationError,
    sigma_k_from_position_spread,
    wavenumber_from_velocity,
)
from arrivaltimes.asymptotics import (
    delay_kernel,
    delay_kernel_series,
    fit_overdamped_constants,
    overdamped_constants,
    strong_decay_closure,
    strong_drive_amplitudes,
)
from arrivaltimes.kernels import compute_curves
from arrivaltimes.packets import discretize
from arrivaltimes.scattering import scattering_amplitudes


def test_overdamped_constants_generic_point():
    # generic overdamped point, all three constants real and positive
    c = overdamped_constants(0.7513)
    for value in (c.c1, c.c2, c.c3):
        assert value.real > 0.0
        assert abs(value.imag) < 1e-14 * value.real
    ap = math.sqrt((1.0 - c.alpha.real) / 2.0)
    am = math.sqrt((1.0 + c.alpha.real) / 2.0)
    s = c.alpha.real + am - ap
    assert c.c3.real == pytest.approx(2.0 * ap * am * s, rel=1e-13)


@pytest.mark.parametrize("ratio", [0.1, 0.33, 0.45])
def test_fitted_constants_match_closed_forms(ratio):
    alpha = math.sqrt(1.0 - 4.0 * ratio**2)
    exact = overdamped_constants(alpha)
    c1_fit, c2_fit = fit_overdamped_constants(ratio)
    assert c1_fit == pytest.approx(exact.c1.real, rel=1e-4)
    assert c2_fit == pytest.approx(exact.c2.real, rel=1e-4)


def test_closure_identity():
    for ratio in (0.05, 0.1, 0.33, 0.45, 0.49):
        assert strong_decay_closure(ratio) == pytest.approx(1.0, abs=1e-10)


def test_strong_drive_amplitudes_limit():
    # at very strong drive the laser edge acts as a hard wall
    params = LaserAtomParams(gamma=GAMMA_CESIUM, omega=500.0 * GAMMA_CESIUM)
    k = np.array([wavenumber_from_velocity(0.02)])
    amps = scattering_amplitudes(params, k)
    pred_r1, pred_r2 = strong_drive_amplitudes(params, k)
    assert abs(amps.r1[0] - pred_r1[0]) < 1e-3
    assert abs(amps.r2[0] - pred_r2[0]) < 1e-3
    eps = k[0] * math.sqrt(params.hbar / (params.mass * params.omega))
    assert abs(amps.r1[0] + 1.0) == pytest.approx(math.sqrt(2.0) * eps, rel=0.05)


def test_delay_kernel_values():
    params = LaserAtomParams(gamma=GAMMA_CESIUM, omega=500.0 * GAMMA_CESIUM)
    k = np.array([1.0e7, 2.0e7, 3.0e7])
    kern = delay_kernel(params, k)
    assert kern.shape == (3, 3)
    npt.assert_allclose(np.diag(kern), 1.0, rtol=1e-14)
    nu = 0.5 * params.hbar * (k[0] ** 2 - k[1] ** 2) / params.mass
    expected = params.gamma / (params.gamma + 2j * nu)
    assert kern[0, 1] == pytest.approx(expected, rel=1e-13)
    # Hermitian pair
    assert kern[1, 0] == pytest.approx(np.conj(expected), rel=1e-13)


def delay_kernel_deviation(ratio):
    params = LaserAtomParams(gamma=GAMMA_CESIUM, omega=ratio * GAMMA_CESIUM)
    packet = GaussianPacket(
        k_mean=wavenumber_from_velocity(0.03),
        sigma_k=sigma_k_from_position_spread(0.2e-6),
        t_focus=40e-6,
    )
    grid = MomentumGrid.for_packets([packet], n_nodes=256)
    disc = discretize([packet], grid, params.mass, params.hbar)
    times = np.linspace(0.0, 100e-6, 501)
    approx = delay_kernel_series(params, disc, times)
    direct = compute_curves(params, disc, times, outputs=("Pi_ON",))["Pi_ON"]
    return np.abs(approx - direct).max() / direct.max()


def test_delay_kernel_series_specific_to_strong_drive():
    strong = delay_kernel_deviation(500.0)
    weak = delay_kernel_deviation(0.66)
    assert strong < 1e-2
    # sanity: the approximation genuinely needs the strong drive
    assert weak > 10.0 * strong


def test_overdamped_constants_reject_degenerate_alpha():
    for alpha in (0.0, 1.0, -1.0):
        with pytest.raises(ValidationError):
            overdamped_constants(alpha)


@settings(max_examples=200, deadline=None)
@given(ratio=st.floats(0.01, 0.499))
def test_closure_identity_random(ratio):
    assert strong_decay_closure(ratio) == pytest.approx(1.0, abs=1e-8)
