import math

import numpy as np
import numpy.testing as npt
import pytest

from arrivaltimes import (
    GAMMA_CESIUM,
    GaussianPacket,
    LaserAtomParams,
    NumericalDegeneracyError,
    ValidationError,
    WraparoundError,
    sigma_k_from_position_spread,
    wavenumber_from_velocity,
)
from arrivaltimes.deconv import (
    deconvolve,
    emission_response,
    inverse_transfer,
    pi_on_spectrum,
    transfer_coefficients,
)

PARAMS = LaserAtomParams(gamma=10 * GAMMA_CESIUM, omega=0.33 * 10 * GAMMA_CESIUM)


def test_transfer_coefficients_closed_form():
    g, w = PARAMS.gamma, PARAMS.omega
    c1, c2, c3 = transfer_coefficients(PARAMS)
    assert c1 == pytest.approx(g / w**2 + 2.0 / g, rel=1e-14)
    assert c2 == pytest.approx(3.0 / w**2, rel=1e-14)
    assert c3 == pytest.approx(2.0 / (g * w**2), rel=1e-14)
    with pytest.raises(ValidationError):
        transfer_coefficients(LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.0))


def test_inverse_transfer_at_zero_shift():
    assert inverse_transfer(PARAMS, np.array([0.0]))[0] == 1.0 + 0.0j


def test_emission_response_is_causal_smooth_and_normalized():
    g = PARAMS.gamma
    t = np.linspace(-2.0 / g, 400.0 / g, 400001)
    w = emission_response(PARAMS, t)
    assert np.all(w[t < 0.0] == 0.0)
    dt = t[1] - t[0]
    # W(0) = W'(0) = 0: the response turns on smoothly
    i0 = np.searchsorted(t, 0.0)
    assert abs(w[i0]) < 1e-6 * w.max()
    assert abs(w[i0 + 1] - w[i0]) / dt < 1e-2 * w.max() * g
    c1, c2, _ = transfer_coefficients(PARAMS)
    assert np.trapezoid(w, t) == pytest.approx(1.0, rel=1e-8)
    assert np.trapezoid(t * w, t) == pytest.approx(c1, rel=1e-6)
    assert np.trapezoid(t**2 * w, t) == pytest.approx(
        2.0 * (c1**2 - c2), rel=1e-6
    )


def test_response_transform_inverts_the_cubic():
    # partial fractions: W~(nu) * (1 + c1 i nu + c2 (i nu)^2 + c3 (i nu)^3) = 1
    from arrivaltimes.deconv import transfer_coefficients as tc

    c1, c2, c3 = tc(PARAMS)
    a = PARAMS.alpha
    g = PARAMS.gamma
    poles = np.array([-0.5 * g, -0.5 * g * (1.0 - a), -0.5 * g * (1.0 + a)])
    dp = c1 + 2.0 * c2 * poles + 3.0 * c3 * poles**2
    nu = np.array([0.0, 0.3 * g, -2.0 * g, 17.0 * g])
    w_hat = np.sum(1.0 / (dp[None, :] * (1j * nu[:, None] - poles[None, :])), axis=1)
    npt.assert_allclose(w_hat * inverse_transfer(PARAMS, nu), 1.0, rtol=1e-12)


def test_emission_response_degenerate_at_critical_damping():
    crit = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.5 * GAMMA_CESIUM)
    with pytest.raises(NumericalDegeneracyError):
        emission_response(crit, np.array([0.0, 1e-9]))


def pulse_and_grid(n=6000, t_max=12e-6, center=4e-6, width=0.5e-6):
    times = np.linspace(0.0, t_max, n)
    pulse = np.exp(-0.5 * ((times - center) / width) ** 2)
    return times, pulse


def test_deconvolve_inverts_spectral_forward_filter():
    # forward-filter with the analytic transform on the padded grid,
    # then undo it; everything should match to roundoff
    import scipy.fft

    times, pulse = pulse_and_grid()
    dt = times[1] - times[0]
    m = scipy.fft.next_fast_len(4 * times.size)
    nu = 2.0 * math.pi * np.fft.fftfreq(m, d=dt)
    blurred = np.fft.ifft(np.fft.fft(pulse, m) / inverse_transfer(PARAMS, nu))[
        : times.size
    ].real
    result = deconvolve(PARAMS, times, blurred, pad_factor=4)
    assert result.max_imag_residual < 1e-10
    npt.assert_allclose(result.density, pulse, rtol=0, atol=1e-9 * pulse.max())


def test_deconvolve_inverts_time_domain_convolution():
    # forward route by direct quadrature of the convolution integral:
    # checks the direction and normalization of the response, not just
    # that the fft inverts itself
    times, pulse = pulse_and_grid()
    dt = times[1] - times[0]
    w = emission_response(PARAMS, times - times[0])
    blurred = np.convolve(pulse, w)[: times.size] * dt
    result = deconvolve(PARAMS, times, blurred, pad_factor=4)
    dev = np.abs(result.density - pulse).max() / pulse.max()
    assert dev < 5e-3


def test_deconvolve_rejects_undecayed_record():
    times, pulse = pulse_and_grid(center=11.5e-6)
    with pytest.raises(WraparoundError):
        deconvolve(PARAMS, times, pulse)


def test_deconvolve_input_validation():
    times, pulse = pulse_and_grid()
    bad = times.copy()
    bad[100] += 1e-9
    with pytest.raises(ValidationError):
        deconvolve(PARAMS, bad, pulse)
    with pytest.raises(ValidationError):
        deconvolve(PARAMS, times[:8], pulse[:8])
    with pytest.raises(ValidationError):
        deconvolve(PARAMS, times, pulse, window_fraction=0.7)
    with pytest.raises(ValidationError):
        deconvolve(PARAMS, times, np.zeros_like(pulse))


def test_deconvolve_warns_on_extreme_amplification():
    times, pulse = pulse_and_grid(n=200000, t_max=12e-6, width=0.5e-6)
    with pytest.warns(RuntimeWarning):
        deconvolve(PARAMS, times, pulse, amplification_limit=10.0)


def slow_packet():
    return GaussianPacket(
        k_mean=wavenumber_from_velocity(0.08),
        sigma_k=sigma_k_from_position_spread(0.3e-6),
        t_focus=12e-6,
    )


def test_pi_on_spectrum_at_zero_is_unity():
    val = pi_on_spectrum(PARAMS, [slow_packet()], np.array([0.0]), n_nodes=256)
    assert val[0].real == pytest.approx(1.0, rel=1e-10)
    assert abs(val[0].imag) < 1e-12


def test_pi_on_spectrum_conjugate_symmetry():
    nu = np.array([2e5, -2e5])
    val = pi_on_spectrum(PARAMS, [slow_packet()], nu, n_nodes=256)
    assert val[1] == pytest.approx(np.conj(val[0]), rel=1e-14)


def test_pi_on_spectrum_matches_time_series_transform():
    from arrivaltimes.kernels import compute_curves
    from arrivaltimes.packets import MomentumGrid, discretize

    packet = slow_packet()
    params = PARAMS
    grid = MomentumGrid.for_packets([packet], n_nodes=256)
    disc = discretize([packet], grid, params.mass, params.hbar)
    times = np.linspace(-15e-6, 45e-6, 6001)
    direct = compute_curves(params, disc, times, outputs=("Pi_ON",))["Pi_ON"]
    nu = np.array([0.5e5, 2e5, 6e5])
    by_series = np.array(
        [np.trapezoid(direct * np.exp(-1j * s * times), times) for s in nu]
    )
    by_spectrum = pi_on_spectrum(params, [packet], nu, n_nodes=256)
    npt.assert_allclose(by_spectrum, by_series, rtol=1e-3)
