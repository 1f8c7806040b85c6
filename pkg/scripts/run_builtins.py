"""Run every built-in scenario and write its trace CSV under out/.

Usage: python scripts/run_builtins.py [--outdir DIR] [--decimate M]
"""

from __future__ import annotations

import argparse
import pathlib

from paramodel.cli import main as cli_main
from paramodel.config_io import builtin_names


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out")
    parser.add_argument("--decimate", type=int, default=100)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in builtin_names():
        code = cli_main(
            [
                "run",
                "--builtin",
                name,
                "--out",
                str(outdir / f"{name}_trace.csv"),
                "--decimate",
                str(args.decimate),
            ]
        )
        worst = max(worst, code)
        print()
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
