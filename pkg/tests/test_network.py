"""Feedforward net: topology, forward pass, masks, clamping, symmetry."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from paramodel import (
    DimensionMismatch,
    Edge,
    FeedforwardNet,
    IndexOutOfRange,
    TrainingSample,
    ValidationError,
    default_topology,
    forward,
    set_mask,
    set_weight,
)

weights7 = st.lists(
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False), min_size=7, max_size=7
)
inputs2 = st.tuples(
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
)


def with_weights(net, ws):
    for i, w in enumerate(ws):
        net = set_weight(net, i, w)
    return net


def test_default_topology_shape():
    net = default_topology()
    assert net.weight_count == 7
    assert net.input_count == 2
    assert len(net.hidden) + 1 == 3  # three tanh nodes in total
    assert net.weights == (0.0,) * 7
    assert net.mask == (True,) * 7
    assert net.w_max == 1.0


def test_forward_all_zero():
    assert forward(default_topology(), (0.3, -0.9)) == 0.0


def test_forward_zero_hidden_activation():
    # only the hidden->output weight set: hidden activations are tanh(0) = 0
    net = set_weight(default_topology(), 4, 1.0)
    assert forward(net, (0.7, 0.2)) == 0.0


def test_forward_hand_value():
    # single path x1 -> h1 -> y with unit weights: tanh(tanh(0.5))
    net = with_weights(default_topology(), [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0])
    got = forward(net, (0.5, 123.0))
    assert got == math.tanh(math.tanh(0.5))
    assert got == pytest.approx(0.4318081805950961, abs=1e-15)


def test_forward_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        forward(default_topology(), (0.5,))


def test_set_weight_clamps():
    net = set_weight(default_topology(), 0, 1.7)
    assert net.weights[0] == 1.0
    net = set_weight(net, 0, -5.0)
    assert net.weights[0] == -1.0
    net = set_weight(net, 0, 0.25)
    assert net.weights[0] == 0.25


def test_constructor_clamps():
    net = default_topology()
    clamped = FeedforwardNet(
        inputs=net.inputs,
        hidden=net.hidden,
        output=net.output,
        edges=net.edges,
        weights=(1.7, -3.0, 0.5, 0.0, 0.0, 0.0, 0.0),
        mask=(True,) * 7,
    )
    assert clamped.weights[:3] == (1.0, -1.0, 0.5)


def test_index_out_of_range():
    net = default_topology()
    with pytest.raises(IndexOutOfRange):
        set_weight(net, 7, 0.1)
    with pytest.raises(IndexOutOfRange):
        set_mask(net, -1, False)


@given(ws=weights7, x=inputs2)
def test_mask_off_equals_zero_weight(ws, x):
    net = with_weights(default_topology(), ws)
    for i in range(7):
        masked = set_mask(net, i, False)
        zeroed = set_weight(net, i, 0.0)
        assert forward(masked, x) == forward(zeroed, x)


@given(ws=weights7, x=inputs2)
def test_mask_involution(ws, x):
    net = with_weights(default_topology(), ws)
    toggled = set_mask(set_mask(net, 6, False), 6, True)
    assert forward(toggled, x) == forward(net, x)
    assert toggled == net


@given(ws=weights7, x=inputs2)
def test_output_bound(ws, x):
    y = forward(with_weights(default_topology(), ws), x)
    assert -1.0 < y < 1.0


@given(ws=weights7, x=inputs2)
def test_odd_symmetry(ws, x):
    # with the skip edge off, every node sum is odd in the inputs, and
    # libm tanh is exactly odd, so negating the inputs negates the output
    ws = list(ws[:6]) + [0.0]
    net = with_weights(default_topology(), ws)
    assert forward(net, x) == -forward(net, (-x[0], -x[1]))


def test_acyclicity_enforced():
    with pytest.raises(ValidationError):
        FeedforwardNet(
            inputs=("a",),
            hidden=("h1", "h2"),
            output="y",
            edges=(Edge("h1", "h2", 0), Edge("h2", "h1", 1), Edge("h1", "y", 2)),
            weights=(0.0, 0.0, 0.0),
            mask=(True, True, True),
        )


def test_edge_validation():
    with pytest.raises(ValidationError):  # unknown node
        FeedforwardNet(
            inputs=("a",), hidden=(), output="y",
            edges=(Edge("nope", "y", 0),), weights=(0.0,), mask=(True,),
        )
    with pytest.raises(ValidationError):  # edge into an input
        FeedforwardNet(
            inputs=("a",), hidden=("h",), output="y",
            edges=(Edge("h", "a", 0),), weights=(0.0,), mask=(True,),
        )
    with pytest.raises(ValidationError):  # weight index out of range
        FeedforwardNet(
            inputs=("a",), hidden=(), output="y",
            edges=(Edge("a", "y", 3),), weights=(0.0,), mask=(True,),
        )
    with pytest.raises(ValidationError):  # duplicate node ids
        FeedforwardNet(
            inputs=("a", "a"), hidden=(), output="y",
            edges=(), weights=(), mask=(),
        )
    with pytest.raises(ValidationError):  # mask/weights length mismatch
        FeedforwardNet(
            inputs=("a",), hidden=(), output="y",
            edges=(Edge("a", "y", 0),), weights=(0.0,), mask=(True, True),
        )


def test_disconnected_hidden_node_is_fine():
    # a hidden node nobody feeds evaluates to tanh(0); the output slot is
    # still the one returned
    net = FeedforwardNet(
        inputs=("a",),
        hidden=("h", "orphan"),
        output="y",
        edges=(Edge("a", "h", 0), Edge("h", "y", 1)),
        weights=(1.0, 1.0),
        mask=(True, True),
    )
    assert forward(net, (0.5,)) == math.tanh(math.tanh(0.5))


def test_training_sample_validation():
    s = TrainingSample(x=(0.2, 0.6), y=0.55)
    assert s.x == (0.2, 0.6)
    with pytest.raises(ValidationError):
        TrainingSample(x=(math.nan, 0.0), y=0.5)
    with pytest.raises(ValidationError):
        TrainingSample(x=(0.0,), y=math.inf)
