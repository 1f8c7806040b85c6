"""Measure settling behavior of the built-in training runs.

Prints, for every built-in scenario, the first iteration from which the
tracking band |y - y_ref| < tol holds through to the next event (or the
end of the run), plus the re-settling time after each event.  The fig4
initial-settling iteration is the source of the frozen regression budget
used by the test suite (budget = 2 x settling iteration).

Usage: python scripts/settling_report.py [--tol X]
"""

from __future__ import annotations

import argparse

from paramodel import builtin_scenarios, train_online


def violations(scenario, tol):
    out = []
    for rec in train_online(scenario):
        if abs(rec.y - rec.y_ref) >= tol:
            out.append(rec.k)
    return out


def segment_settling(scenario, viols):
    """(segment start, iterations to settle, settled) per event segment."""
    starts = [1] + sorted({e.at for e in scenario.events if e.at > 0})
    bounds = starts[1:] + [scenario.horizon + 1]
    rows = []
    for k0, k1 in zip(starts, bounds):
        seg = [v for v in viols if k0 <= v < k1]
        settled_at = (seg[-1] + 1) if seg else k0
        rows.append((k0, settled_at - k0, settled_at < k1))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tol", type=float, default=0.01)
    args = parser.parse_args()

    budget_source = None
    for name, scenario in builtin_scenarios().items():
        viols = violations(scenario, args.tol)
        print(f"{name}: horizon {scenario.horizon}, band tol {args.tol}")
        for k0, settle, ok in segment_settling(scenario, viols):
            status = "" if ok else "  [did not settle in segment]"
            if k0 == 1:
                print(f"  initial            settles from iteration {k0 + settle}{status}")
                if name == "fig4":
                    budget_source = k0 + settle
            else:
                print(f"  event at k={k0:<6d} re-settles after {settle} iterations{status}")
        print()
    if budget_source is not None:
        print(f"fig4 settles from iteration {budget_source}")
        print(f"frozen regression budget (2x): {2 * budget_source} iterations")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
