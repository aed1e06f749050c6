"""Cross-check the spectral engine against the independent grid solver.

The quick form takes ~1 minute; --full reruns the bundled scenarios at
acceptance resolution and takes ~30 minutes.

Usage: python3 scripts/oracle_check.py [--full]
"""
import sys

from arrivaltimes.cli import main

if __name__ == "__main__":
    args = ["oracle"]
    if "--full" in sys.argv[1:]:
        args.append("--full")
    sys.exit(main(args))
