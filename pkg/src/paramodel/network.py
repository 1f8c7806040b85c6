"""Small feedforward tanh network with indexed weights and an edge mask.

The network is the plant under control: a directed acyclic graph whose
non-input nodes apply tanh to the weighted sum of their enabled incoming
edges.  Every edge carries an index into a shared weight vector, weights
saturate at +-w_max, and edges can be disabled through a boolean mask
(dropout-style topology events) without losing their stored weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DimensionMismatch, IndexOutOfRange, ValidationError

__all__ = [
    "Edge",
    "FeedforwardNet",
    "TrainingSample",
    "default_topology",
    "forward",
    "set_mask",
    "set_weight",
]


@dataclass(frozen=True, slots=True)
class Edge:
    """One directed connection: source node, target node, weight index."""

    src: str
    dst: str
    weight: int


@dataclass(frozen=True, slots=True)
class TrainingSample:
    """Input vector and target output the tuning loop tracks."""

    x: tuple[float, ...]
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if not all(math.isfinite(v) for v in self.x) or not math.isfinite(self.y):
            raise ValidationError("training sample values must be finite")


@dataclass(frozen=True)
class FeedforwardNet:
    """Immutable network description plus a cached evaluation plan.

    ``inputs`` fixes the order in which an input vector is bound to input
    nodes.  ``weights`` and ``mask`` are indexed by edge weight index; a
    masked-off edge contributes exactly zero regardless of its weight.
    """

    inputs: tuple[str, ...]
    hidden: tuple[str, ...]
    output: str
    edges: tuple[Edge, ...]
    weights: tuple[float, ...]
    mask: tuple[bool, ...]
    w_max: float = 1.0
    # eval plan: per non-input node in topological order,
    # (value slot, [(source value slot, weight index), ...])
    _plan: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "hidden", tuple(self.hidden))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "mask", tuple(bool(m) for m in self.mask))
        if not (self.w_max > 0.0 and math.isfinite(self.w_max)):
            raise ValidationError(f"w_max must be finite and positive, got {self.w_max}")
        # stored weights always satisfy the bound (saturating clamp)
        object.__setattr__(
            self,
            "weights",
            tuple(_clamp(float(w), self.w_max) for w in self.weights),
        )
        object.__setattr__(self, "_plan", self._build_plan())

    @property
    def weight_count(self) -> int:
        return len(self.weights)

    @property
    def input_count(self) -> int:
        return len(self.inputs)

    def _build_plan(self) -> tuple:
        nodes = list(self.inputs) + list(self.hidden) + [self.output]
        if len(set(nodes)) != len(nodes):
            raise ValidationError("node ids must be unique across inputs/hidden/output")
        if len(self.mask) != len(self.weights):
            raise ValidationError("mask and weights must have the same length")
        slot = {name: i for i, name in enumerate(nodes)}
        incoming: dict[str, list[tuple[int, int]]] = {n: [] for n in nodes}
        for e in self.edges:
            if e.src not in slot:
                raise ValidationError(f"edge source {e.src!r} is not a declared node")
            if e.dst not in slot:
                raise ValidationError(f"edge target {e.dst!r} is not a declared node")
            if e.dst in self.inputs:
                raise ValidationError(f"edge target {e.dst!r} is an input node")
            if not 0 <= e.weight < len(self.weights):
                raise ValidationError(
                    f"edge {e.src}->{e.dst}: weight index {e.weight} out of range"
                )
            incoming[e.dst].append((slot[e.src], e.weight))
        # Kahn's algorithm over the non-input nodes; cycle -> error
        order: list[str] = []
        deps = {
            n: {self.edges[i].src for i in range(len(self.edges)) if self.edges[i].dst == n}
            for n in nodes
        }
        ready = [n for n in nodes if n in self.inputs or not deps[n]]
        done: set[str] = set()
        while ready:
            n = ready.pop(0)
            done.add(n)
            if n not in self.inputs:
                order.append(n)
            for m in nodes:
                if m not in done and m not in ready and deps[m] <= done:
                    ready.append(m)
        if len(done) != len(nodes):
            raise ValidationError("network graph has a cycle")
        return tuple((slot[n], tuple(incoming[n])) for n in order)

    def eval_with(self, weights: Sequence[float], mask: Sequence[bool], x: Sequence[float]) -> float:
        """Forward pass using explicit weight/mask vectors.

        This is the single evaluation path: ``forward`` and the training
        loop both come through here, so masked-vs-zeroed comparisons stay
        bit-exact.
        """
        values = [0.0] * (len(self.inputs) + len(self.hidden) + 1)
        for i, v in enumerate(x):
            values[i] = v
        for node_slot, terms in self._plan:
            acc = 0.0
            for src_slot, w_idx in terms:
                if mask[w_idx]:
                    acc += weights[w_idx] * values[src_slot]
            values[node_slot] = math.tanh(acc)
        # the output node always occupies the last slot
        return values[-1]


def default_topology() -> FeedforwardNet:
    """Three tanh nodes, two inputs, seven weights.

    w0..w3 connect the inputs to two hidden nodes, w4/w5 connect the
    hidden nodes to the output, and w6 is an input-to-output skip edge.
    All weights start at zero with every edge enabled and w_max = 1.
    """
    edges = (
        Edge("x1", "h1", 0),
        Edge("x2", "h1", 1),
        Edge("x1", "h2", 2),
        Edge("x2", "h2", 3),
        Edge("h1", "y", 4),
        Edge("h2", "y", 5),
        Edge("x1", "y", 6),
    )
    return FeedforwardNet(
        inputs=("x1", "x2"),
        hidden=("h1", "h2"),
        output="y",
        edges=edges,
        weights=(0.0,) * 7,
        mask=(True,) * 7,
        w_max=1.0,
    )


def forward(net: FeedforwardNet, x: Sequence[float]) -> float:
    """Evaluate the network on input vector x; output is in (-1, 1)."""
    if len(x) != net.input_count:
        raise DimensionMismatch(
            f"expected {net.input_count} inputs, got {len(x)}"
        )
    return net.eval_with(net.weights, net.mask, x)


def set_weight(net: FeedforwardNet, index: int, value: float) -> FeedforwardNet:
    """Return a copy of the net with weight ``index`` set (clamped to +-w_max)."""
    if not 0 <= index < net.weight_count:
        raise IndexOutOfRange(f"weight index {index} out of range [0, {net.weight_count})")
    w = list(net.weights)
    w[index] = _clamp(float(value), net.w_max)
    return replace(net, weights=tuple(w))


def set_mask(net: FeedforwardNet, index: int, enabled: bool) -> FeedforwardNet:
    """Return a copy of the net with edge weight ``index`` enabled/disabled."""
    if not 0 <= index < net.weight_count:
        raise IndexOutOfRange(f"weight index {index} out of range [0, {net.weight_count})")
    m = list(net.mask)
    m[index] = bool(enabled)
    return replace(net, mask=tuple(m))


def _clamp(value: float, bound: float) -> float:
    if value > bound:
        return bound
    if value < -bound:
        return -bound
    return value
