"""Solving A x = b as a distributed tracking problem.

Each unknown x_j is driven by its own controller that steers the measured
row value y_j = (A x)_j toward the reference b_j, treating the coupling
through the other variables as a disturbance.  The controllers are
staggered: gains decrease geometrically with the variable index so each
loop stabilizes at a distinct speed.  When every y_j is held close to
b_j, x is close to the solution of the system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .controller import ControllerParams, ControllerState, controller_new, controller_step
from .dynamics import FirstOrderFilter, filter_step
from .errors import DivergenceError, ValidationError

__all__ = [
    "LinearTrackingProblem",
    "LinsolveRecord",
    "as_records",
    "builtin_problem",
    "matvec",
    "residual",
    "solve_linear",
    "stagger_params",
]

DEFAULT_DT = 1e-5
DEFAULT_TAU = 1e-5

# 3x3 demo system used by the built-in "linsolve3" run.
DEMO_A = ((3.0, 0.5, 8.0), (4.0, 7.0, 4.5), (1.0, 9.0, 3.0))
DEMO_B = (7.95, 6.30, 3.80)


@dataclass(frozen=True)
class LinearTrackingProblem:
    """Square system plus one controller/filter pair per unknown."""

    a: tuple[tuple[float, ...], ...]
    b: tuple[float, ...]
    controllers: tuple[ControllerParams, ...]
    filters: tuple[FirstOrderFilter, ...]
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(tuple(float(v) for v in row) for row in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "controllers", tuple(self.controllers))
        object.__setattr__(self, "filters", tuple(self.filters))
        n = len(self.b)
        if n == 0:
            raise ValidationError("system must have at least one variable")
        if len(self.a) != n or any(len(row) != n for row in self.a):
            raise ValidationError(f"matrix must be square {n}x{n} to match b")
        if len(self.controllers) != n:
            raise ValidationError(f"need {n} controller parameter sets, got {len(self.controllers)}")
        if len(self.filters) != n:
            raise ValidationError(f"need {n} filters, got {len(self.filters)}")
        if self.horizon < 1:
            raise ValidationError(f"horizon must be >= 1, got {self.horizon}")


@dataclass(frozen=True, slots=True)
class LinsolveRecord:
    """One recorded iteration: measured row values, references, unknowns."""

    k: int
    y: tuple[float, ...]
    b: tuple[float, ...]
    x: tuple[float, ...]


def stagger_params(base: ControllerParams, n: int, rho: float) -> list[ControllerParams]:
    """Geometrically staggered gain sets: kp and ki shrink by rho per index.

    k_alpha and k_beta are shared by all instances; rho = 1 degenerates to
    n identical copies of the base gains.
    """
    if n < 1:
        raise ValidationError(f"need at least one controller, got n={n}")
    if not (0.0 < rho <= 1.0):
        raise ValidationError(f"stagger ratio must be in (0, 1], got {rho}")
    return [
        ControllerParams(
            kp=base.kp * rho**j,
            ki=base.ki * rho**j,
            k_alpha=base.k_alpha,
            k_beta=base.k_beta,
            dt=base.dt,
            init_decay=base.init_decay,
        )
        for j in range(n)
    ]


def matvec(a, x) -> tuple[float, ...]:
    """Row-major dense product A x (kept as the single product path so the
    recorded y and any recomputation agree bit-exactly)."""
    return tuple(sum(row[c] * x[c] for c in range(len(x))) for row in a)


def solve_linear(
    problem: LinearTrackingProblem,
) -> tuple[list[tuple[float, ...]], list[tuple[float, ...]]]:
    """Run the distributed tracking loop; return (x trace, y trace).

    Iteration k measures y from the previous x, steps every controller
    against (b_j, y_j) synchronously, filters the raw controls into the
    new x, and records the pair (x_k, y_k = A x_k).  Raises
    DivergenceError with the iteration index if any value goes non-finite.
    """
    n = len(problem.b)
    states: list[ControllerState] = [controller_new(p) for p in problem.controllers]
    filters = list(problem.filters)
    x = [f.state for f in filters]
    y = matvec(problem.a, x)
    x_trace: list[tuple[float, ...]] = []
    y_trace: list[tuple[float, ...]] = []
    for k in range(1, problem.horizon + 1):
        try:
            for j in range(n):
                states[j], u = controller_step(states[j], problem.controllers[j], problem.b[j], y[j])
                filters[j] = filter_step(filters[j], u, problem.controllers[j].dt)
                x[j] = filters[j].state
        except DivergenceError as err:
            if err.iteration is None:
                raise DivergenceError(str(err), iteration=k) from None
            raise
        y = matvec(problem.a, x)
        if not all(math.isfinite(v) for v in y):
            raise DivergenceError(f"measured output became non-finite: {y}", iteration=k)
        x_trace.append(tuple(x))
        y_trace.append(y)
    return x_trace, y_trace


def as_records(problem: LinearTrackingProblem, x_trace, y_trace) -> list[LinsolveRecord]:
    """Zip solver traces into per-iteration records for CSV output."""
    return [
        LinsolveRecord(k=k, y=y, b=problem.b, x=x)
        for k, (x, y) in enumerate(zip(x_trace, y_trace), start=1)
    ]


def residual(problem: LinearTrackingProblem, y: tuple[float, ...]) -> float:
    """Largest componentwise tracking error |y_j - b_j|."""
    return max(abs(y[j] - problem.b[j]) for j in range(len(problem.b)))


def builtin_problem(horizon: int = 50_000) -> LinearTrackingProblem:
    """The 3x3 demo system with tuned staggered gains.

    The initialization decay is slower here (k_beta = 4) than in the
    network-training runs because the references are an order of magnitude
    larger: the series psi needs a correspondingly larger plateau to hold
    its sign over the whole run.
    """
    base = ControllerParams(kp=1.0, ki=0.01, k_alpha=166.5, k_beta=4.0, dt=DEFAULT_DT)
    controllers = tuple(stagger_params(base, n=3, rho=0.5))
    filters = tuple(FirstOrderFilter(tau=DEFAULT_TAU, state=0.0) for _ in range(3))
    return LinearTrackingProblem(
        a=DEMO_A, b=DEMO_B, controllers=controllers, filters=filters, horizon=horizon
    )
