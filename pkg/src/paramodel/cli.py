"""Command-line entry point.

    paramodel run --builtin fig4
    paramodel run myrun.yaml --kp 0.8 --out trace.csv
    paramodel list

Exit codes: 0 converged, 1 did not converge within tolerance,
2 configuration error, 3 divergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import config_io, linsolve, trainer
from .errors import (
    DivergenceError,
    InvalidEvent,
    InvalidParams,
    ParseError,
    ValidationError,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_IO = 4

BUILTIN_BLURBS = {
    "fig4": "train: constant data (0.2, 0.6) -> 0.55, skip weight w7 disabled",
    "fig5": "train: inputs change to (0.15, 0.7) at k1, reference to 0.6 at k2",
    "fig6": "train: hidden weight w4 dropped at k1",
    "fig7": "train: data change at k1, w7 dropped at k2, reference 0.6 at k3",
    "linsolve3": "linsolve: 3x3 system solved by three staggered controllers",
}

GAIN_FLAGS = ("kp", "ki", "k_alpha", "k_beta", "dt")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramodel",
        description="Tracking-control runs: online network-weight tuning and "
        "a distributed linear-system solver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a configured run")
    run.add_argument("config_path", nargs="?", help="YAML run configuration file")
    src = run.add_mutually_exclusive_group()
    src.add_argument("--config", help="YAML run configuration file")
    src.add_argument("--builtin", help="name of a built-in run (see 'list')")
    run.add_argument("--out", help="trace CSV path (overrides config 'output')")
    run.add_argument("--decimate", type=int, help="record every M-th iteration")
    run.add_argument("--tol", type=float, help="convergence tolerance")
    run.add_argument("--horizon", type=int, help="iteration count")
    run.add_argument("--tau", type=float, help="filter time constant (s)")
    run.add_argument("--rho", type=float, help="gain stagger ratio in (0, 1]")
    for g in GAIN_FLAGS:
        run.add_argument(f"--{g.replace('_', '-')}", type=float, help=f"override gain {g}")

    sub.add_parser("list", help="list built-in runs")
    return parser


def _load_config_dict(args) -> dict:
    sources = [s for s in (args.config_path, args.config, args.builtin) if s is not None]
    if len(sources) != 1:
        raise ValidationError(
            "exactly one of a config path or --builtin is required", key="run"
        )
    if args.builtin:
        return config_io.builtin_config_dict(args.builtin)
    path = args.config_path or args.config
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    import yaml

    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as err:
        line = err.problem_mark.line + 1 if err.problem_mark else None
        raise ParseError(str(err.problem or err), line=line) from None
    except yaml.YAMLError as err:
        raise ParseError(str(err)) from None
    if not isinstance(raw, dict):
        raise ParseError("top level must be a mapping")
    return config_io.expand_builtin(raw)


def _apply_overrides(d: dict, args) -> dict:
    """Edit the config dict in place exactly as a user editing the file would."""
    root = "scenario" if "scenario" in d else "problem" if "problem" in d else None
    gain_overrides = {g: getattr(args, g) for g in GAIN_FLAGS if getattr(args, g) is not None}
    structural = {
        "horizon": args.horizon,
        "tau": args.tau,
        "stagger_rho": args.rho,
    }
    structural = {k: v for k, v in structural.items() if v is not None}
    if (gain_overrides or structural) and root is None:
        raise ValidationError("gain/horizon overrides need a scenario or problem section")
    if gain_overrides:
        section = d[root]
        if "gains" not in section:
            if "controllers" in section:
                raise ValidationError(
                    "cannot override individual gains on a config with an "
                    "explicit controllers list; edit the file instead",
                    key=f"{root}.controllers",
                )
            section["gains"] = {}
        section["gains"].update(gain_overrides)
    for k, v in structural.items():
        d[root][k] = v
    if args.out is not None:
        d["output"] = args.out
    if args.decimate is not None:
        d["decimation"] = args.decimate
    if args.tol is not None:
        d["tolerance"] = args.tol
    return d


def _settled_from(violations: list[int], horizon: int) -> int | None:
    """First iteration from which the tolerance band holds through the end."""
    if not violations:
        return 1
    last = violations[-1]
    return None if last >= horizon else last + 1


def _run_train(config: config_io.RunConfig, label: str) -> int:
    s = config.scenario
    tol = config.tolerance
    print(f"run: {label} (train, horizon {s.horizon}, dt {s.base_params.dt!r})")
    violations: list[int] = []
    rows = []
    last = None
    for rec in trainer.train_online(s):
        if abs(rec.y - rec.y_ref) >= tol:
            violations.append(rec.k)
        if rec.k % config.decimation == 0:
            rows.append(rec)
        last = rec
    final_err = abs(last.y - last.y_ref)
    settled = _settled_from(violations, s.horizon)
    print(f"final |y - y_ref| = {final_err:.3e} (tolerance {tol!r})")
    if settled is None:
        print("did not settle within the horizon")
    else:
        print(f"settled from iteration {settled} of {s.horizon}")
    if config.output:
        config_io.write_trace(rows, config.output, config.decimation)
        print(f"trace: {config.output} ({len(rows)} rows, decimation {config.decimation})")
    converged = settled is not None
    print(f"converged: {'yes' if converged else 'no'}")
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _run_linsolve(config: config_io.RunConfig, label: str) -> int:
    p = config.problem
    tol = config.tolerance
    print(f"run: {label} (linsolve, horizon {p.horizon}, dt {p.controllers[0].dt!r})")
    x_trace, y_trace = linsolve.solve_linear(p)
    n = len(p.b)
    violations = [
        k
        for k, y in enumerate(y_trace, start=1)
        if max(abs(y[j] - p.b[j]) for j in range(n)) >= tol
    ]
    final_res = linsolve.residual(p, y_trace[-1])
    settled = _settled_from(violations, p.horizon)
    print(f"final max |y_j - b_j| = {final_res:.3e} (tolerance {tol!r})")
    if settled is None:
        print("did not settle within the horizon")
    else:
        print(f"settled from iteration {settled} of {p.horizon}")
    print("x =", [f"{v:.6f}" for v in x_trace[-1]])
    if config.output:
        rows = [
            r
            for r in linsolve.as_records(p, x_trace, y_trace)
            if r.k % config.decimation == 0
        ]
        config_io.write_trace(rows, config.output, config.decimation)
        print(f"trace: {config.output} ({len(rows)} rows, decimation {config.decimation})")
    converged = final_res < tol
    print(f"converged: {'yes' if converged else 'no'}")
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def cmd_run(args) -> int:
    try:
        d = _load_config_dict(args)
        d = _apply_overrides(d, args)
        config = config_io.config_from_dict(d)
    except OSError as err:
        print(f"IoError: {err}", file=sys.stderr)
        return EXIT_IO
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, InvalidParams, InvalidEvent) as err:
        print(f"ValidationError: {err}", file=sys.stderr)
        return EXIT_CONFIG
    label = args.builtin or args.config_path or args.config
    try:
        if config.mode == "train":
            return _run_train(config, label)
        return _run_linsolve(config, label)
    except DivergenceError as err:
        print(f"divergence: {err}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as err:
        print(f"IoError: {err}", file=sys.stderr)
        return EXIT_IO


def cmd_list() -> int:
    for name in config_io.builtin_names():
        print(f"{name:10s} {BUILTIN_BLURBS[name]}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return cmd_list()
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
