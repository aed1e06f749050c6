import json
import math
import pathlib

import numpy as np
import pytest

from arrivaltimes import (
    GAMMA_CESIUM,
    MASS_CESIUM,
    ValidationError,
    sigma_k_from_position_spread,
    wavenumber_from_velocity,
)
from arrivaltimes.scenario import load_scenario, metadata, scenario_from_mapping

SCENARIO_DIR = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def base_mapping(**overrides):
    raw = {
        "name": "unit",
        "model": "two-channel",
        "gamma_over_gamma_cs": 10.0,
        "omega_over_gamma": 0.33,
        "packets": [{"v_mean_cm_s": 0.9, "dx_um": 0.106, "t_focus_us": 150.0}],
        "time_grid": {"start_us": 0.0, "stop_us": 320.0, "n": 101},
        "momentum_grid": {"n_nodes": 64},
        "outputs": ["Pi", "Pi_ON"],
    }
    raw.update(overrides)
    return raw


def test_bundled_scenarios_load():
    for name in ("fig1", "fig2", "fig3"):
        sc = load_scenario(SCENARIO_DIR / f"{name}.scenario")
        assert sc.name == name
        assert sc.params is not None
        assert sc.times.size >= 1000
        assert len(sc.packets) >= 1


def test_fig2_resolves_to_expected_parameters():
    sc = load_scenario(SCENARIO_DIR / "fig2.scenario")
    assert sc.params.gamma == pytest.approx(10.0 * GAMMA_CESIUM)
    assert sc.params.omega == pytest.approx(3.3 * GAMMA_CESIUM)
    p = sc.packets[0]
    assert p.k_mean == pytest.approx(wavenumber_from_velocity(0.009))
    assert p.sigma_k == pytest.approx(sigma_k_from_position_spread(0.106e-6))
    assert p.t_focus == pytest.approx(150e-6)
    assert sc.times[0] == 0.0 and sc.times[-1] == pytest.approx(320e-6)
    assert sc.mass == MASS_CESIUM


def test_fig3_has_two_packet_superposition():
    sc = load_scenario(SCENARIO_DIR / "fig3.scenario")
    assert len(sc.packets) == 2
    # equal weights; discretize() normalizes the superposition to unit mass
    assert sc.packets[0].weight == sc.packets[1].weight > 0.0
    assert sc.packets[0].k_mean > 2.0 * sc.packets[1].k_mean
    assert sc.deconvolve is True
    assert "Pi_id" in sc.outputs and "Pi_ON" in sc.outputs


def test_unknown_keys_rejected_everywhere():
    with pytest.raises(ValidationError, match="scenario"):
        scenario_from_mapping(base_mapping(typo=1))
    bad_packet = base_mapping()
    bad_packet["packets"][0]["speed"] = 2.0
    with pytest.raises(ValidationError, match="packets"):
        scenario_from_mapping(bad_packet)
    bad_time = base_mapping(time_grid={"start_us": 0.0, "stop_us": 1.0, "n": 5, "dt": 1})
    with pytest.raises(ValidationError, match="time_grid"):
        scenario_from_mapping(bad_time)


def test_exactly_one_velocity_spec():
    doubled = base_mapping()
    doubled["packets"][0]["k_mean"] = 1e7
    with pytest.raises(ValidationError, match="only one"):
        scenario_from_mapping(doubled)
    missing = base_mapping(packets=[{"dx_um": 0.1}])
    with pytest.raises(ValidationError, match="required"):
        scenario_from_mapping(missing)


def test_model_parameter_rules():
    with pytest.raises(ValidationError, match="v0"):
        scenario_from_mapping(base_mapping(v0=1e-30))
    derived = scenario_from_mapping(base_mapping(model="complex-potential"))
    assert derived.v0_source == "derived"
    expected = derived.params.hbar * derived.params.omega**2 / (2 * derived.params.gamma)
    assert derived.step.v0 == pytest.approx(expected)
    direct = scenario_from_mapping(
        {
            "model": "complex-potential",
            "v0": 1e-30,
            "packets": [{"v_mean_cm_s": 0.9, "dx_um": 0.106}],
            "time_grid": {"start_us": 0.0, "stop_us": 10.0, "n": 11},
            "outputs": ["Pi"],
        }
    )
    assert direct.v0_source == "direct"
    assert direct.params is None
    with pytest.raises(ValidationError, match="not both"):
        scenario_from_mapping(
            base_mapping(model="complex-potential", v0=1e-30)
        )


def test_deconvolution_needs_two_channel_rates():
    ok = scenario_from_mapping(base_mapping(outputs=["Pi_ON", "Pi_id"]))
    assert ok.deconvolve is True
    with pytest.raises(ValidationError, match="Pi_ON"):
        scenario_from_mapping(base_mapping(outputs=["Pi", "Pi_id"]))
    with pytest.raises(ValidationError):
        scenario_from_mapping(
            {
                "model": "complex-potential",
                "v0": 1e-30,
                "packets": [{"v_mean_cm_s": 0.9, "dx_um": 0.106}],
                "time_grid": {"start_us": 0.0, "stop_us": 10.0, "n": 11},
                "outputs": ["Pi_ON", "Pi_id"],
            }
        )


def test_time_and_output_validation():
    with pytest.raises(ValidationError, match="exceed"):
        scenario_from_mapping(
            base_mapping(time_grid={"start_us": 5.0, "stop_us": 5.0, "n": 10})
        )
    with pytest.raises(ValidationError, match="integer"):
        scenario_from_mapping(
            base_mapping(time_grid={"start_us": 0.0, "stop_us": 5.0, "n": 10.5})
        )
    with pytest.raises(ValidationError, match="unknown output"):
        scenario_from_mapping(base_mapping(outputs=["Pi", "Sigma"]))
    with pytest.raises(ValidationError, match="duplicates"):
        scenario_from_mapping(base_mapping(outputs=["Pi", "Pi"]))
    with pytest.raises(ValidationError, match="n_nodes"):
        scenario_from_mapping(base_mapping(momentum_grid={"n_nodes": 8}))


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ValidationError, match="cannot read"):
        load_scenario(tmp_path / "missing.scenario")
    bad = tmp_path / "bad.scenario"
    bad.write_text("{not json")
    with pytest.raises(ValidationError):
        load_scenario(bad)


def test_metadata_round_trips_to_json():
    sc = scenario_from_mapping(base_mapping())
    meta = metadata(sc)
    text = json.dumps(meta, sort_keys=True)
    back = json.loads(text)
    assert back["scenario_name"] == "unit"
    assert back["model"] == "two-channel"
    assert "checks" in back
    assert back["gamma_per_s"] == pytest.approx(10.0 * GAMMA_CESIUM)
