"""Regenerate the three bundled scenarios (CSV + metadata + plot stub).

Usage: python3 scripts/run_figures.py [outdir]
"""
import pathlib
import sys

from arrivaltimes.cli import main

HERE = pathlib.Path(__file__).resolve().parent.parent


def run(outdir: str) -> int:
    rc = 0
    for name in ("fig1", "fig2", "fig3"):
        scenario = HERE / "scenarios" / f"{name}.scenario"
        print(f"== {scenario.name}")
        rc |= main(["run", str(scenario), "--out", outdir])
    return rc


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "out"))
