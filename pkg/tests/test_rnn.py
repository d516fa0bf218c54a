import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snnrep.model import INFINITE, ZERO, MemoryMode, Network, SparseLayer
from snnrep.rnn import (
    BinaryStream,
    GridError,
    StateSpaceNet,
    check_equivalence,
    decay_constant,
    decode_grid,
    encode_grid,
    simulate_rnn,
    snn_to_rnn,
)
from snnrep.simulator import grid_decay, simulate_network
from snnrep.spikes import SpikeTrain
from strategies import networks

H1 = MemoryMode.finite(1)


def unit(w, memory=INFINITE):
    return Network((SparseLayer(1, 1, ((0, 0, Fraction(w)),)),), memory)


def stream(*bits):
    return BinaryStream(tuple((b,) for b in bits))


def bits(s):
    return tuple(v[0] for v in s.steps)


def test_single_unit_matrices():
    rnn = snn_to_rnn(unit(2))
    (b,) = rnn.blocks
    assert b.W == ((2,), (2,))
    assert b.V == ((0, 1), (0, 1))
    assert b.U == ((1, 0),)
    assert rnn.decay == 1


def test_decay_constants():
    assert decay_constant(ZERO, 1) == 0
    assert decay_constant(INFINITE, Fraction(1, 3)) == 1
    c = decay_constant(H1, 1)
    assert abs(float(c) - 0.36787944117144233) < 1e-16
    assert snn_to_rnn(unit(2, ZERO)).blocks[0].V == ((0, 0), (0, 0))


def test_two_layers_two_blocks():
    net = Network((SparseLayer(2, 1, ((0, 0, Fraction(2)), (1, 0, Fraction(1)))), SparseLayer(1, 2, ((0, 0, Fraction(1)), (0, 1, Fraction(1))))))
    rnn = snn_to_rnn(net)
    assert [(b.p_in, b.p_out) for b in rnn.blocks] == [(1, 2), (2, 1)]
    assert len(rnn.blocks[0].V) == 4


def test_unit_streams():
    # w = 1 reaches the threshold only after an increment on top of a carried 1
    assert bits(simulate_rnn(snn_to_rnn(unit(1, H1)), stream(1, 1, 1))) == (0, 1, 0)
    assert bits(simulate_rnn(snn_to_rnn(unit(2)), stream(1, 0, 1))) == (1, 0, 1)
    assert bits(simulate_rnn(snn_to_rnn(unit(2)), stream(0, 0, 0))) == (0, 0, 0)
    with pytest.raises(GridError, match="width"):
        simulate_rnn(snn_to_rnn(unit(2)), BinaryStream(((1, 0),)))


def test_encode_decode():
    s = encode_grid([[1, 3]], steps=4)
    assert bits(s) == (1, 0, 1, 0)
    tr = [SpikeTrain([Fraction(1, 2), 2]), SpikeTrain([Fraction(3, 2)])]
    assert decode_grid(encode_grid(tr, Fraction(1, 2))) == tr
    with pytest.raises(GridError, match="not a multiple"):
        encode_grid([[Fraction(3, 2)]])
    with pytest.raises(GridError, match="beyond"):
        encode_grid([[5]], steps=3)
    assert BinaryStream.from_text(s.to_text()) == s
    with pytest.raises(GridError):
        BinaryStream.from_text("01\n2\n")


def test_ramps_equal_potential_trace():
    net = Network(
        (
            SparseLayer(2, 2, ((0, 0, Fraction(1, 2)), (0, 1, Fraction(1, 3)), (1, 1, Fraction(3, 4)))),
            SparseLayer(1, 2, ((0, 0, Fraction(2, 3)), (0, 1, Fraction(1, 2)))),
        ),
        H1,
    )
    ins = [SpikeTrain([1, 2, 3, 5, 6]), SpikeTrain([2, 4, 5, 6, 7])]
    rnn = snn_to_rnn(net)
    _, ramps = simulate_rnn(rnn, encode_grid(ins), keep_ramps=True)
    _, traces = simulate_network(net, ins, decay=grid_decay(1, rnn.decay), trace=True)
    seen = 0
    for li, layer in enumerate(traces):
        for ni, rows in enumerate(layer):
            for row in rows:
                k = int(row.time)
                p = Fraction(row.potential)
                assert ramps[li][k - 1][ni] == (p if p <= 1 else 0)
                seen += 1
    assert seen > 10


def test_json_round_trip():
    rnn = snn_to_rnn(unit(Fraction(3, 2), H1), Fraction(1, 4))
    doc = json.loads(rnn.dumps())
    assert StateSpaceNet.from_json(doc) == rnn
    assert doc["delta"] == "1/4"


@given(
    networks(d=2, max_depth=3, max_width=3),
    st.sampled_from([INFINITE, H1, MemoryMode.finite(Fraction(1, 2)), ZERO]),
    st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), max_size=12),
)
def test_rnn_matches_event_simulator(net, memory, steps):
    net = net.with_memory(memory)
    ins = [[t for t, v in enumerate(steps, start=1) if v[j]] for j in range(2)]
    report = check_equivalence(net, ins, steps=len(steps))
    assert report["equal"], report
