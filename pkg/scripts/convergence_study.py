"""Distance-to-limit tables for the scaled-decay families.

Runs the overdamped scenario through both scaling modes and writes one
CSV per mode.

Usage: python3 scripts/convergence_study.py [outdir]
"""
import pathlib
import sys

from arrivaltimes.cli import main

HERE = pathlib.Path(__file__).resolve().parent.parent


def run(outdir: str) -> int:
    scenario = str(HERE / "scenarios" / "fig2.scenario")
    rc = 0
    for mode in ("fixed-omega-over-gamma", "fixed-v0"):
        print(f"== {mode}")
        rc |= main(
            [
                "converge",
                scenario,
                "--mode",
                mode,
                "--gamma-multipliers",
                "1,3,10,30",
                "--out",
                outdir,
            ]
        )
    return rc


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "out"))
