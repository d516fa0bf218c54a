"""Hypothesis strategies over exact spike trains, monotone maps and small networks."""

from fractions import Fraction

from hypothesis import strategies as st

from snnrep.model import Network, SparseLayer
from snnrep.spikes import MonotoneMap, SpikeTrain

rationals = st.builds(Fraction, st.integers(1, 40), st.integers(1, 6))


@st.composite
def trains(draw, max_size=8):
    ts = draw(st.sets(rationals, max_size=max_size))
    return SpikeTrain(sorted(ts))


@st.composite
def input_tuples(draw, d, max_size=8):
    return tuple(draw(trains(max_size)) for _ in range(d))


@st.composite
def monotone_maps(draw):
    xs = sorted(draw(st.sets(rationals, max_size=4)))
    slopes = draw(st.lists(rationals, min_size=len(xs), max_size=len(xs)))
    pts, y, prev = [], Fraction(0), Fraction(0)
    for x, s in zip(xs, slopes):
        y += (x - prev) * s
        pts.append((x, y))
        prev = x
    return MonotoneMap(pts, draw(rationals))


@st.composite
def networks(draw, d=None, max_depth=3, max_width=4, wmax=3, memory=None):
    d = d if d is not None else draw(st.integers(1, max_width))
    depth = draw(st.integers(1, max_depth))
    widths = [d] + [draw(st.integers(1, max_width)) for _ in range(depth)]
    layers = []
    for k in range(depth):
        ents = []
        for o in range(widths[k + 1]):
            for i in range(widths[k]):
                w = draw(st.integers(-wmax, wmax))
                if w:
                    ents.append((o, i, Fraction(w)))
        layers.append(SparseLayer(widths[k + 1], widths[k], tuple(ents)))
    net = Network(tuple(layers))
    return net.with_memory(memory) if memory is not None else net
