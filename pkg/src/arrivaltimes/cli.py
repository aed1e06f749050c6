"""Command-line entry point: scenario runner and verification drivers.

Subcommands:
    run       load a scenario file, compute the requested curves, write
              CSV + metadata sidecar + a plot script
    converge  rate-scaling study (delegates to convergence_report)
    oracle    independent cross-checks: dense x-quadrature vs analytic
              kernel entries, grid solver vs spectral curves
    coeffs    print scattering amplitudes and deconvolution transfer
              coefficients for given parameters

Exit codes: 0 success, 2 validation error, 3 numerical degeneracy,
4 oracle mismatch.

Thread count is applied via the BLAS environment variables, so it must
happen before numpy loads; all heavy imports in this module are local
to the handlers for that reason.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERACY = 3
EXIT_ORACLE = 4

_CSV_FMT = "%.11e"  # 12 significant digits


def _apply_threads(n: int | None) -> None:
    if n is None:
        return
    if "numpy" in sys.modules:
        # Too late to change BLAS pools reliably; be honest about it.
        print("warning: numpy already loaded, --threads ignored", file=sys.stderr)
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


def _format_row(values) -> str:
    return ",".join(_CSV_FMT % v for v in values)


def _write_csv(path: Path, header: list, columns: list) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(_format_row(row))
    path.write_text("\n".join(lines) + "\n")


_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Plot {name}: arrival-time distribution curves vs t in microseconds."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

path = Path(__file__).with_name("{csv_name}")
with path.open() as fh:
    reader = csv.reader(fh)
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader]
cols = {{name: [row[i] for row in rows] for i, name in enumerate(header)}}

t_us = [t * 1e6 for t in cols["t_s"]]
styles = {{"Pi": "-", "Pi_ON": "-", "Pi_K": "--", "J": ":", "Pi_J": "-.", "Pi_id": "-"}}
fig, ax = plt.subplots(figsize=(6.0, 4.0))
for name in header[1:]:
    ax.plot(t_us, cols[name], styles.get(name, "-"), label=name)
ax.set_xlabel("t (us)")
ax.set_ylabel("arrival-time density (1/s)")
ax.legend(frameon=False)
ax.set_title("{name}")
fig.tight_layout()
fig.savefig(path.with_suffix(".png"), dpi=160)
print("wrote", path.with_suffix(".png"))
'''


def _hint(exc) -> str:
    from .errors import SingularReweightingError, WraparoundError

    if isinstance(exc, SingularReweightingError):
        return (
            "hint: some momentum nodes have vanishing detection probability; "
            "drop Pi_ON/Pi_J from outputs, or reduce momentum_grid.support_sigmas "
            "so the packet support stays clear of zero-detection wavenumbers"
        )
    if isinstance(exc, WraparoundError):
        return (
            "hint: the measured density must decay at both record ends before "
            "deconvolution; widen time_grid, or set window_fraction > 0 to "
            "taper the record, or raise pad_factor"
        )
    return ""


def _cmd_run(args) -> int:
    import numpy as np

    from . import kernels
    from .deconv import deconvolve
    from .packets import MomentumGrid, discretize
    from .scenario import load_scenario, metadata

    scenario = load_scenario(args.scenario)
    overrides = {}
    if args.model is not None:
        overrides["model"] = args.model
    if args.deconvolve:
        overrides["deconvolve"] = True
    if args.pad_factor is not None:
        overrides["pad_factor"] = args.pad_factor
    if args.window is not None:
        overrides["window_fraction"] = args.window
    if overrides:
        from .scenario import scenario_from_mapping

        raw = dict(scenario.source)
        raw.update(overrides)
        scenario = scenario_from_mapping(raw, name=scenario.name)

    grid = MomentumGrid.for_packets(
        scenario.packets, n_nodes=scenario.n_nodes, support_sigmas=scenario.support_sigmas
    )
    packet = discretize(scenario.packets, grid, scenario.mass, scenario.hbar)

    wanted = [name for name in scenario.outputs if name != "Pi_id"]
    if scenario.deconvolve and "Pi_ON" not in wanted:
        wanted.append("Pi_ON")

    meta = metadata(scenario)
    checks = meta["checks"]
    checks["packet_raw_norm"] = packet.raw_norm
    checks["packet_negative_momentum_mass"] = packet.negative_mass

    if scenario.model == "two-channel":
        from .kernels import compute_curves, emission_kernel, predicted_time_integrals
        from .scattering import scattering_amplitudes

        curves = compute_curves(scenario.params, packet, scenario.times, outputs=tuple(wanted))
        amps = scattering_amplitudes(scenario.params, packet.k)
        kernel = emission_kernel(scenario.params, amps)
        checks["kernel_hermiticity_residual"] = float(
            np.max(np.abs(kernel - kernel.conj().T))
        )
        predicted = predicted_time_integrals(scenario.params, packet)
    else:
        from .cpot import compute_curves, absorption_kernel, predicted_time_integrals, step_amplitudes

        curves = compute_curves(scenario.step, packet, scenario.times, outputs=tuple(wanted))
        kernel = absorption_kernel(scenario.step, step_amplitudes(scenario.step, packet.k))
        checks["kernel_hermiticity_residual"] = float(
            np.max(np.abs(kernel - kernel.conj().T))
        )
        predicted = predicted_time_integrals(scenario.step, packet)

    series = {name: curves[name] for name in wanted}
    for name, value in predicted.items():
        checks[f"predicted_integral_{name}"] = float(value)
    for name in wanted:
        checks[f"grid_integral_{name}"] = float(np.trapezoid(series[name], scenario.times))

    if scenario.deconvolve:
        result = deconvolve(
            scenario.params,
            scenario.times,
            series["Pi_ON"],
            pad_factor=scenario.pad_factor,
            window_fraction=scenario.window_fraction,
        )
        series["Pi_id"] = result.density
        checks["deconvolution_amplification"] = float(result.amplification)
        checks["deconvolution_max_imag_residual"] = float(result.max_imag_residual)
        checks["grid_integral_Pi_id"] = float(np.trapezoid(result.density, scenario.times))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{scenario.name}.csv"
    header = ["t_s"] + list(scenario.outputs)
    columns = [scenario.times] + [series[name] for name in scenario.outputs]
    _write_csv(csv_path, header, columns)
    (out_dir / f"{scenario.name}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n"
    )
    plot_path = out_dir / f"{scenario.name}_plot.py"
    plot_path.write_text(_PLOT_TEMPLATE.format(name=scenario.name, csv_name=csv_path.name))
    print(f"wrote {csv_path}, {csv_path.with_suffix('.meta.json').name}, {plot_path.name}")
    return EXIT_OK


def _cmd_converge(args) -> int:
    from .asymptotics import convergence_report
    from .packets import MomentumGrid, discretize
    from .scenario import load_scenario

    scenario = load_scenario(args.scenario)
    if scenario.params is None:
        from .errors import ValidationError

        raise ValidationError("convergence studies need two-channel parameters")
    multipliers = [float(v) for v in args.gamma_multipliers.split(",") if v.strip()]
    if not multipliers:
        from .errors import ValidationError

        raise ValidationError("--gamma-multipliers must list at least one value")

    grid = MomentumGrid.for_packets(
        scenario.packets, n_nodes=scenario.n_nodes, support_sigmas=scenario.support_sigmas
    )
    packet = discretize(scenario.packets, grid, scenario.mass, scenario.hbar)
    rows = convergence_report(
        scenario.params, packet, scenario.times, multipliers, mode=args.mode
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{scenario.name}_converge_{args.mode}.csv"
    _write_csv(
        csv_path,
        ["gamma_multiplier", "sup_dist", "l1_dist"],
        [
            [row.gamma_multiplier for row in rows],
            [row.sup_dist for row in rows],
            [row.l1_dist for row in rows],
        ],
    )
    print(f"wrote {csv_path}")
    for row in rows:
        print(f"  gamma x {row.gamma_multiplier:g}: sup {row.sup_dist:.3e}  L1 {row.l1_dist:.3e}")
    return EXIT_OK


def _oracle_configs(full: bool):
    """Cross-check configurations: (label, params, packets, times, grid solver)."""
    from .oracle import GridSolverConfig
    from .packets import GaussianPacket
    from .params import (
        GAMMA_CESIUM,
        LaserAtomParams,
        sigma_k_from_position_spread,
        sigma_k_from_velocity_spread,
        wavenumber_from_velocity,
    )

    if not full:
        params = LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.66 * GAMMA_CESIUM)
        packet = GaussianPacket(
            k_mean=wavenumber_from_velocity(0.08),
            sigma_k=sigma_k_from_velocity_spread(0.008),
            x0=0.0,
            t_focus=12e-6,
        )
        cfg = GridSolverConfig(x_min=-2.2e-6, x_max=0.12e-6, n_x=14001, dt=1e-9)
        return [("quick", params, [packet], (0.0, 30e-6, 301), cfg, 384, 1e-4, "free")]

    fig1 = (
        "fig1",
        LaserAtomParams(gamma=GAMMA_CESIUM, omega=0.66 * GAMMA_CESIUM),
        [
            GaussianPacket(
                k_mean=wavenumber_from_velocity(0.02),
                sigma_k=sigma_k_from_velocity_spread(0.0048),
                x0=0.0,
                t_focus=100e-6,
            )
        ],
        (0.0, 250e-6, 2501),
        GridSolverConfig(x_min=-9.0e-6, x_max=0.15e-6, n_x=55125, dt=1e-9, t_start=-25e-6),
        768,
        2e-5,
        "free",
    )
    fig2 = (
        "fig2",
        LaserAtomParams(gamma=10 * GAMMA_CESIUM, omega=3.3 * GAMMA_CESIUM),
        [
            GaussianPacket(
                k_mean=wavenumber_from_velocity(0.009),
                sigma_k=sigma_k_from_position_spread(0.106e-6),
                x0=0.0,
                t_focus=150e-6,
            )
        ],
        (0.0, 320e-6, 3201),
        GridSolverConfig(
            x_min=-5.0e-6,
            x_max=0.1e-6,
            n_x=51001,
            dt=1e-9,
            t_start=-25e-6,
            left_taper=0.5e-6,
        ),
        512,
        1e-4,
        "dressed",
    )
    return [fig1, fig2]


def grid_solver_comparison(
    params, packets, time_spec, cfg, n_nodes, init_mass_tol, initial_state="free"
):
    """Spectral emission curve vs Richardson-extrapolated grid solver.

    Runs the solver twice (coarse step, half step in both x and t) and
    combines the pair to cancel the leading second-order error.
    Returns (sup deviation relative to the curve peak, seconds).
    """
    import time as _time
    import warnings

    import numpy as np

    from . import kernels, oracle
    from .packets import MomentumGrid, discretize

    t0 = _time.time()
    times = np.linspace(*time_spec)
    grid = MomentumGrid.for_packets(packets, n_nodes=n_nodes)
    packet = discretize(packets, grid, params.mass, params.hbar)
    spectral = kernels.compute_curves(params, packet, times, outputs=("Pi",))["Pi"]

    from dataclasses import replace

    runs = []
    for divide in (2, 1):
        sub_cfg = replace(cfg, n_x=(cfg.n_x - 1) // divide + 1, dt=cfg.dt * divide)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            runs.append(
                oracle.evolve_conditional(
                    params,
                    packet,
                    sub_cfg,
                    times,
                    init_mass_tol=init_mass_tol,
                    initial_state=initial_state,
                ).emission
            )
    extrapolated = (4.0 * runs[1] - runs[0]) / 3.0
    dev = float(np.max(np.abs(extrapolated - spectral)) / np.max(spectral))
    return dev, _time.time() - t0


def _cmd_oracle(args) -> int:
    import numpy as np

    from .errors import OracleMismatchError
    from .oracle import dense_overlap_check
    from .kernels import emission_kernel
    from .params import GAMMA_CESIUM, LaserAtomParams
    from .scattering import scattering_amplitudes

    rows = []
    failed = False

    # dense x-quadrature vs closed-form kernel entries, both damping regimes
    rng = np.random.default_rng(20260818)
    worst = 0.0
    for omega_ratio in (0.33, 0.66):
        params = LaserAtomParams(gamma=GAMMA_CESIUM, omega=omega_ratio * GAMMA_CESIUM)
        for _ in range(args.pairs // 2):
            k_pair = rng.uniform(0.005, 3.0, size=2) * params.kappa0
            amps = scattering_amplitudes(params, k_pair)
            analytic = emission_kernel(params, amps)[0, 1]
            dense = dense_overlap_check(params, k_pair[0], k_pair[1])
            worst = max(worst, abs(dense - analytic) / abs(analytic))
    ok = worst < 1e-8
    failed |= not ok
    rows.append(("dense x-quadrature vs kernel", worst, 1e-8, ok))

    for label, p, pkts, tspec, cfg, n_nodes, tol, init in _oracle_configs(args.full):
        dev, secs = grid_solver_comparison(p, pkts, tspec, cfg, n_nodes, tol, init)
        ok = dev < 1e-3
        failed |= not ok
        rows.append((f"grid solver vs spectral [{label}] ({secs:.0f}s)", dev, 1e-3, ok))

    width = max(len(r[0]) for r in rows) + 2
    for label, dev, tol, ok in rows:
        status = "pass" if ok else "FAIL"
        print(f"{label:<{width}} max dev {dev:.3e}  tol {tol:.0e}  {status}")
    if failed:
        raise OracleMismatchError("independent cross-checks disagree beyond tolerance")
    return EXIT_OK


def _cmd_coeffs(args) -> int:
    from .asymptotics import overdamped_constants
    from .deconv import transfer_coefficients
    from .params import GAMMA_CESIUM, LaserAtomParams
    from .scattering import scattering_amplitudes

    gamma = args.gamma if args.gamma is not None else GAMMA_CESIUM
    omega = args.omega if args.omega is not None else args.omega_over_gamma * gamma
    params = LaserAtomParams(gamma=gamma, omega=omega)

    print(f"gamma = {params.gamma:.6e} 1/s, omega = {params.omega:.6e} 1/s")
    print(f"alpha = {params.alpha:.6g}")
    print(f"kappa0 = {params.kappa0:.6e} rad/m")
    c1, c2, c3 = transfer_coefficients(params)
    print(f"inverse transfer polynomial: c1 = {c1:.12e} s, c2 = {c2:.12e} s^2, c3 = {c3:.12e} s^3")
    if abs(params.alpha.imag) == 0.0 and 0.0 < params.alpha.real < 1.0:
        consts = overdamped_constants(params.alpha.real)
        print(
            "overdamped reflection constants: "
            f"C1 = {consts.c1:.12g}, C2 = {consts.c2:.12g}, C3 = {consts.c3:.12g}"
        )
    if args.k is not None:
        amps = scattering_amplitudes(params, [args.k])
        print(f"k = {args.k:.6e} rad/m:")
        print(f"  R1 = {complex(amps.r1[0]):.12g}")
        print(f"  R2 = {complex(amps.r2[0]):.12g}")
        print(f"  C+ = {complex(amps.c_plus[0]):.12g}, C- = {complex(amps.c_minus[0]):.12g}")
        print(f"  G+ = {complex(amps.g_plus[0]):.12g}, G- = {complex(amps.g_minus[0]):.12g}")
        print(f"  detection probability = {float(amps.detection_probability[0]):.12g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arrivaltimes",
        description="Quantum arrival-time distributions for laser-induced fluorescence",
    )
    parser.add_argument("--threads", type=int, default=None, help="BLAS thread count")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="path to a .scenario JSON file")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--model", choices=("two-channel", "complex-potential"), default=None)
    run.add_argument("--deconvolve", action="store_true", help="force Pi_id computation")
    run.add_argument("--pad-factor", type=int, default=None)
    run.add_argument("--window", type=float, default=None, help="taper fraction in [0, 0.5]")
    run.set_defaults(handler=_cmd_run)

    conv = sub.add_parser("converge", help="rate-scaling convergence study")
    conv.add_argument("scenario")
    conv.add_argument("--out", default=".")
    conv.add_argument(
        "--mode",
        choices=("fixed-omega-over-gamma", "fixed-v0"),
        default="fixed-omega-over-gamma",
    )
    conv.add_argument("--gamma-multipliers", default="1,3,10,30")
    conv.set_defaults(handler=_cmd_converge)

    orc = sub.add_parser("oracle", help="independent cross-check suite")
    orc.add_argument("--full", action="store_true", help="scenario-grade grid solver runs (slow)")
    orc.add_argument("--pairs", type=int, default=50, help="random (k, k') quadrature pairs")
    orc.set_defaults(handler=_cmd_oracle)

    coeffs = sub.add_parser("coeffs", help="print model coefficients")
    coeffs.add_argument("--gamma", type=float, default=None)
    coeffs.add_argument("--omega", type=float, default=None)
    coeffs.add_argument("--omega-over-gamma", type=float, default=0.33)
    coeffs.add_argument("--k", type=float, default=None, help="also print amplitudes at this wavenumber")
    coeffs.set_defaults(handler=_cmd_coeffs)
    return parser


def main(argv=None) -> int:
    # Peek at --threads before anything imports numpy.
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--threads" in argv:
        idx = argv.index("--threads")
        if idx + 1 < len(argv):
            try:
                _apply_threads(int(argv[idx + 1]))
            except ValueError:
                pass

    parser = build_parser()
    args = parser.parse_args(argv)

    from .errors import (
        NumericalDegeneracyError,
        OracleMismatchError,
        ValidationError,
        WraparoundError,
    )

    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        hint = _hint(exc)
        if hint:
            print(hint, file=sys.stderr)
        return EXIT_VALIDATION
    except OracleMismatchError as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (NumericalDegeneracyError, WraparoundError) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        hint = _hint(exc)
        if hint:
            print(hint, file=sys.stderr)
        return EXIT_DEGENERACY


if __name__ == "__main__":
    sys.exit(main())
