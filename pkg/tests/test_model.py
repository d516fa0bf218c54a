import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snnrep.gadgets import build_primitive
from snnrep.model import (
    INFINITE,
    ZERO,
    MemoryMode,
    ModelError,
    Network,
    SparseLayer,
    compose,
    deserialize,
    pad_with_skip,
    parallel,
    serialize,
    skip_network,
    stats,
)
from snnrep.simulator import simulate_network
from strategies import input_tuples, networks


def dense_net(*mats):
    layers = []
    for M in mats:
        ents = [(o, i, w) for o, row in enumerate(M) for i, w in enumerate(row)]
        layers.append(SparseLayer(len(M), len(M[0]), tuple(ents)))
    return Network(tuple(layers))


def test_memory_parse():
    assert MemoryMode.parse("inf") == INFINITE
    assert MemoryMode.parse("zero") == ZERO
    assert MemoryMode.parse("h=3/2") == MemoryMode.finite(Fraction(3, 2))
    for bad in ("h=-1", "h=0/0", "warm"):
        with pytest.raises(ModelError):
            MemoryMode.parse(bad)


def test_layer_drops_zero_weights_and_rejects_duplicates():
    assert SparseLayer(1, 2, ((0, 0, 0), (0, 1, 3))).entries == ((0, 1, Fraction(3)),)
    with pytest.raises(ModelError):
        SparseLayer(1, 2, ((0, 0, 1), (0, 0, 2)))
    with pytest.raises(ModelError):
        SparseLayer(1, 2, ((0, 2, 1),))


def test_network_checks_layer_dimensions():
    with pytest.raises(ModelError):
        Network((SparseLayer(3, 2), SparseLayer(1, 2)))


def test_compose_concatenates():
    f = dense_net([[2, 0], [0, 2], [1, 1]])
    g = dense_net([[1, 1, 1]])
    h = compose(f, g)
    assert h.widths == (2, 3, 1)
    assert h.depth == 2
    with pytest.raises(ModelError):
        compose(g, f)


def test_parallel_is_block_diagonal():
    one = dense_net([[2]])
    both = parallel(one, one)
    assert both.widths == (2, 2)
    assert both.layers[0].dense() == [[2, 0], [0, 2]]
    with pytest.raises(ModelError):
        parallel(one, skip_network(1, 2))


def test_pad_with_skip():
    net = dense_net([[2]])
    assert pad_with_skip(net, 0) is net
    padded = pad_with_skip(net, 2)
    assert padded.depth == 3
    assert simulate_network(padded, [(1, 5)]) == simulate_network(net, [(1, 5)])


def test_stats_counts():
    st1 = stats(Network((SparseLayer(1, 2, ((0, 0, 2), (0, 1, -2))),)))
    assert (st1.nonzero_weights, st1.negative_weights) == (2, 1)
    assert stats(Network((SparseLayer(1, 1),))).nonzero_weights == 0
    # AND with two inputs: widths (2, 2, 1) and five weights
    st2 = stats(build_primitive("AND", 2))
    assert (st2.widths, st2.nonzero_weights) == ((2, 2, 1), 5)
    assert st2.total_neurons == 5


def test_serialize_round_trip_and_memory():
    net = dense_net([[2, Fraction(-1, 3)]]).with_memory(MemoryMode.finite(Fraction(1, 10)))
    doc = json.loads(serialize(net))
    assert doc["memory"] == {"finite": "1/10"}
    assert deserialize(serialize(net)) == net
    inf = json.loads(serialize(net.with_memory(INFINITE)))
    assert inf["memory"] == "infinite"


def test_deserialize_duplicate_entry_is_an_error():
    doc = {"memory": "infinite", "layers": [{"rows": 1, "cols": 1, "entries": [[0, 0, "1"], [0, 0, "2"]]}]}
    with pytest.raises(ModelError, match="duplicate"):
        deserialize(json.dumps(doc))


def test_deserialize_reports_bad_json_position():
    with pytest.raises(ModelError, match="line 1"):
        deserialize("{not json")


@given(networks())
def test_serialize_round_trip_random(net):
    assert deserialize(serialize(net)) == net
    assert serialize(deserialize(serialize(net))) == serialize(net)


@given(st.data())
def test_compose_adds_depth_and_weights(data):
    f = data.draw(networks())
    g = data.draw(networks(d=f.n_outputs))
    h = compose(f, g)
    assert h.depth == f.depth + g.depth
    assert stats(h).nonzero_weights == stats(f).nonzero_weights + stats(g).nonzero_weights


@given(st.data())
def test_compose_is_associative(data):
    f = data.draw(networks(max_depth=2))
    g = data.draw(networks(d=f.n_outputs, max_depth=2))
    k = data.draw(networks(d=g.n_outputs, max_depth=2))
    assert compose(compose(f, g), k).layers == compose(f, compose(g, k)).layers


@given(st.data())
def test_padding_preserves_function(data):
    net = data.draw(networks(max_depth=2))
    ins = data.draw(input_tuples(net.n_inputs))
    assert simulate_network(pad_with_skip(net, 2), ins) == simulate_network(net, ins)
