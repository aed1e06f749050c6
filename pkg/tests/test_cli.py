import json

import numpy as np
import pytest

import arrivaltimes.cli as cli


def write_scenario(path, **overrides):
    raw = {
        "name": "tiny",
        "model": "two-channel",
        "gamma_over_gamma_cs": 1.0,
        "omega_over_gamma": 0.66,
        "packets": [{"v_mean_cm_s": 8.0, "dx_um": 0.3, "t_focus_us": 16.0}],
        "time_grid": {"start_us": -20.0, "stop_us": 60.0, "n": 401},
        "momentum_grid": {"n_nodes": 96},
        "outputs": ["Pi", "Pi_ON", "Pi_K", "J"],
    }
    raw.update(overrides)
    path.write_text(json.dumps(raw, indent=2))
    return path


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().lstrip("# ").split(",")
        data = np.loadtxt(fh, delimiter=",")
    return header, data


def test_run_writes_deterministic_outputs(tmp_path):
    scenario = write_scenario(tmp_path / "tiny.scenario")
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cli.main(["run", str(scenario), "--out", str(out_a)]) == 0
    assert cli.main(["run", str(scenario), "--out", str(out_b)]) == 0
    for name in ("tiny.csv", "tiny.meta.json", "tiny_plot.py"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    header, data = read_csv(out_a / "tiny.csv")
    assert header == ["t_s", "Pi", "Pi_ON", "Pi_K", "J"]
    assert data.shape == (401, 5)
    # time column in seconds, densities nonnegative where they must be
    assert data[0, 0] == pytest.approx(-20e-6)
    # nonnegative up to quadrature roundoff far out in the tails
    assert data[:, 1].min() > -1e-12 * data[:, 1].max()
    assert data[:, 2].min() > -1e-12 * data[:, 2].max()
    meta = json.loads((out_a / "tiny.meta.json").read_text())
    assert meta["checks"]["kernel_hermiticity_residual"] < 1e-12
    assert meta["checks"]["grid_integral_Pi_ON"] == pytest.approx(1.0, rel=1e-3)


def test_run_with_deconvolution(tmp_path):
    scenario = write_scenario(
        tmp_path / "tiny.scenario",
        outputs=["Pi_ON", "Pi_id", "Pi_K"],
    )
    out = tmp_path / "out"
    assert cli.main(["run", str(scenario), "--out", str(out)]) == 0
    header, data = read_csv(out / "tiny.csv")
    assert header == ["t_s", "Pi_ON", "Pi_id", "Pi_K"]
    meta = json.loads((out / "tiny.meta.json").read_text())
    assert meta["checks"]["deconvolution_max_imag_residual"] < 1e-8
    # removing the emission lag moves the density toward the free one
    pi_on, pi_id, pi_k = data[:, 1], data[:, 2], data[:, 3]
    assert np.abs(pi_id - pi_k).max() < np.abs(pi_on - pi_k).max()


def test_run_model_override(tmp_path):
    scenario = write_scenario(tmp_path / "tiny.scenario")
    out = tmp_path / "out"
    assert (
        cli.main(
            ["run", str(scenario), "--model", "complex-potential", "--out", str(out)]
        )
        == 0
    )
    meta = json.loads((out / "tiny.meta.json").read_text())
    assert meta["model"] == "complex-potential"
    assert meta["v0_source"] == "derived"


def test_converge_reports_shrinking_distance(tmp_path):
    scenario = write_scenario(
        tmp_path / "tiny.scenario",
        time_grid={"start_us": -20.0, "stop_us": 60.0, "n": 201},
    )
    out = tmp_path / "out"
    rc = cli.main(
        [
            "converge",
            str(scenario),
            "--mode",
            "fixed-omega-over-gamma",
            "--gamma-multipliers",
            "1,4",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    header, data = read_csv(out / "tiny_converge_fixed-omega-over-gamma.csv")
    assert header == ["gamma_multiplier", "sup_dist", "l1_dist"]
    assert data.shape == (2, 3)
    assert data[1, 2] < data[0, 2]


def test_coeffs_prints_transfer_polynomial(capsys):
    assert cli.main(["coeffs", "--omega-over-gamma", "0.33"]) == 0
    out = capsys.readouterr().out
    assert "inverse transfer polynomial" in out
    assert "overdamped reflection constants" in out
    from arrivaltimes import GAMMA_CESIUM, LaserAtomParams
    from arrivaltimes.deconv import transfer_coefficients

    c1, _, _ = transfer_coefficients(
        LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.33 * GAMMA_CESIUM)
    )
    assert f"{c1:.12e}" in out


def test_validation_failure_exit_code(tmp_path, capsys):
    scenario = write_scenario(tmp_path / "bad.scenario", typo=True)
    assert cli.main(["run", str(scenario), "--out", str(tmp_path)]) == cli.EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "typo" in err


def test_degenerate_parameters_exit_code(tmp_path, capsys):
    scenario = write_scenario(tmp_path / "crit.scenario", omega_over_gamma=0.5)
    assert cli.main(["run", str(scenario), "--out", str(tmp_path)]) == cli.EXIT_DEGENERACY
    err = capsys.readouterr().err
    assert "critical" in err.lower() or "degenerate" in err.lower()


def test_oracle_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "grid_solver_comparison", lambda *a, **k: (1.0, 0.0))
    assert cli.main(["oracle", "--pairs", "4"]) == cli.EXIT_ORACLE
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_oracle_quick_dense_check_passes(monkeypatch, capsys):
    # keep the grid solver out of it: the dense quadrature check alone
    monkeypatch.setattr(cli, "_oracle_configs", lambda full: [])
    assert cli.main(["oracle", "--pairs", "6"]) == 0
    out = capsys.readouterr().out
    assert "pass" in out
