"""Regenerate the golden trace CSVs committed under tests/golden/.

The determinism regression test compares freshly produced traces byte for
byte against these files, so they must only ever be regenerated after a
deliberate change to the simulation arithmetic.

Usage: python scripts/regen_goldens.py
"""

from __future__ import annotations

import pathlib

from paramodel import builtin_problem, builtin_scenarios, train_online, write_trace
from paramodel.linsolve import as_records, solve_linear

GOLDEN_DIR = pathlib.Path(__file__).resolve().parents[1] / "tests" / "golden"
DECIMATION = 100


def main() -> int:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, scenario in builtin_scenarios().items():
        path = GOLDEN_DIR / f"{name}_trace.csv"
        write_trace(train_online(scenario), str(path), DECIMATION)
        print(f"wrote {path}")
    problem = builtin_problem()
    x_trace, y_trace = solve_linear(problem)
    path = GOLDEN_DIR / "linsolve3_trace.csv"
    write_trace(as_records(problem, x_trace, y_trace), str(path), DECIMATION)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
