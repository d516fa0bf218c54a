"""Parametric network constructions for the named spike-train functions.

Constructions are written against :class:`Builder`, a small layered-graph
DSL: every neuron lives on a layer, and when a neuron reads from sources on
earlier layers they are lifted with cached weight-2 skip chains.  That keeps
the proof-style wiring ("attach SKIP connections until the depth is
synchronized") implicit.  The ``g_*`` functions take and return builder
nodes so they compose; the ``build_*`` functions wrap them into a
:class:`~snnrep.model.Network` with port metadata.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional, Sequence

from .model import INFINITE, MemoryMode, ModelError, Network, SparseLayer, stats
from .oracle import FiniteSpec, MarkovianSpec, PeriodicSpec, all_patterns

TWO = Fraction(2)


class GadgetError(ValueError):
    pass


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def ceil_log4(n: int) -> int:
    return (ceil_log2(n) + 1) // 2


class Builder:
    """Layered network under construction; layer 0 holds the inputs."""

    def __init__(self, n_inputs: int):
        self.layer_of: list = []
        self.inc: list = []
        self.by_layer: list = [[]]
        self._lifted: dict = {}
        self._origin: dict = {}
        self.inputs = [self._new(0, {}) for _ in range(n_inputs)]

    def _new(self, layer: int, inc: dict) -> int:
        nid = len(self.layer_of)
        self.layer_of.append(layer)
        self.inc.append(inc)
        while len(self.by_layer) <= layer:
            self.by_layer.append([])
        self.by_layer[layer].append(nid)
        return nid

    def layer(self, node: int) -> int:
        return self.layer_of[node]

    def depth(self, nodes: Iterable[int]) -> int:
        return max(self.layer_of[n] for n in nodes)

    def lift(self, node: int, layer: int) -> int:
        """The node's train made available on ``layer`` via a skip chain."""
        node = self._origin.get(node, node)
        cur = self.layer_of[node]
        if cur > layer:
            raise GadgetError(f"cannot lift a layer-{cur} node down to layer {layer}")
        if cur == layer:
            return node
        key = (node, layer)
        got = self._lifted.get(key)
        if got is None:
            prev = self.lift(node, layer - 1)
            got = self._new(layer, {prev: TWO})
            self._lifted[key] = got
            self._origin[got] = node
        return got

    def sync(self, nodes: Sequence[int], layer: Optional[int] = None) -> list:
        target = self.depth(nodes) if layer is None else layer
        return [self.lift(n, target) for n in nodes]

    def neuron(self, srcs, layer: Optional[int] = None) -> int:
        """New neuron; ``srcs`` is a dict or a list of (node, weight) pairs (weights add up)."""
        pairs = list(srcs.items()) if isinstance(srcs, dict) else list(srcs)
        if layer is None:
            if not pairs:
                raise GadgetError("a neuron without inputs needs an explicit layer")
            layer = max(self.layer_of[s] for s, _ in pairs) + 1
        inc: dict = {}
        for s, w in pairs:
            s = self.lift(s, layer - 1)
            inc[s] = inc.get(s, Fraction(0)) + Fraction(w)
        return self._new(layer, {s: w for s, w in inc.items() if w != 0})

    def embed(self, net: Network, sources: Sequence[int]) -> list:
        if len(sources) != net.n_inputs:
            raise GadgetError(f"network takes {net.n_inputs} inputs, got {len(sources)}")
        prev = self.sync(sources)
        base = self.layer_of[prev[0]] if prev else 0
        for k, lay in enumerate(net.layers, start=1):
            rows = [dict() for _ in range(lay.rows)]
            for o, i, w in lay.entries:
                rows[o][prev[i]] = w
            prev = [self._new(base + k, r) for r in rows]
        return prev

    def build(self, outputs: Sequence[int], memory: MemoryMode = INFINITE, **meta) -> Network:
        L = max(1, self.depth(outputs)) if outputs else 1
        outs = [self.lift(o, L) for o in outputs]
        pos = [dict() for _ in range(L + 1)]
        pos[0] = {n: k for k, n in enumerate(self.inputs)}
        layers = []
        for l in range(1, L + 1):
            nodes = self.by_layer[l] if l < L else outs
            ents = []
            for r, n in enumerate(nodes):
                if l < L:
                    pos[l][n] = r
                for s, w in self.inc[n].items():
                    ents.append((r, pos[l - 1][s], w))
            layers.append(SparseLayer(len(nodes), len(self.inputs) if l == 1 else len(pos[l - 1]), tuple(ents)))
        return Network(tuple(layers), memory, meta)


# ---------------------------------------------------------------------------
# memoryless primitives


def g_skip(b: Builder, x: int, depth: int = 1) -> int:
    return b.lift(x, b.layer(x) + depth)


def g_or(b: Builder, xs: Sequence[int]) -> int:
    return b.neuron({x: TWO for x in b.sync(xs)})


def g_and(b: Builder, xs: Sequence[int]) -> int:
    xs = b.sync(xs)
    d = len(xs)
    n1 = b.neuron([(xs[0], 2)])
    n2 = b.neuron([(xs[0], 2 * d - 2)] + [(x, -2) for x in xs[1:]], layer=b.layer(n1))
    return b.neuron([(n1, 2), (n2, -2)])


def g_minus(b: Builder, x: int, y: int) -> int:
    x, y = b.sync([x, y])
    return b.neuron([(x, 2), (y, -2)])


def g_xor(b: Builder, x: int, y: int) -> int:
    return g_or(b, [g_minus(b, x, y), g_minus(b, y, x)])


def g_is_equal(b: Builder, i: int, j: int, d: int) -> int:
    i, j, d = b.sync([i, j, d])
    neither = g_and(b, [g_minus(b, d, i), g_minus(b, d, j)])
    both = g_and(b, [i, j, d])
    return g_or(b, [neither, both])


def g_translate(b: Builder, t: int, s: int, c: int) -> int:
    t, s, c = b.sync([t, s, c])
    return b.neuron([(t, 1), (s, 1), (c, -1)])


# ---------------------------------------------------------------------------
# periodic and finite blocks


def g_even(b: Builder, x: int) -> int:
    """Single weight-1 neuron: fires on every second input spike."""
    return b.neuron([(x, 1)])


def g_odd_even(b: Builder, x: int) -> tuple:
    n1 = b.neuron([(x, 2)])
    n2 = b.neuron([(x, 1)])
    return b.neuron([(n1, 2), (n2, -2)]), b.neuron([(n2, 2)])


def g_odd(b: Builder, x: int) -> int:
    n1 = b.neuron([(x, 2)])
    n2 = b.neuron([(x, 1)])
    return b.neuron([(n1, 2), (n2, -2)])


def g_clock(b: Builder, x: int, m: int) -> list:
    """Outputs O_1..O_m with O_j = spikes whose index is j mod m."""
    if not is_power_of_two(m):
        raise GadgetError(f"CLOCK needs a power of two, got {m}")
    outs = [x]
    while len(outs) < m:
        pairs = [g_odd_even(b, o) for o in outs]
        outs = [p[0] for p in pairs] + [p[1] for p in pairs]
    return outs


def g_spike1(b: Builder, x: int) -> int:
    o = g_clock(b, x, 4)
    n0 = b.neuron([(oi, 2) for oi in o])
    ns = [b.neuron([(o[i], 1), (o[(i + 1) % 4], 1), (o[(i + 2) % 4], -1)]) for i in range(4)]
    return b.neuron([(n0, 2)] + [(n, -2) for n in ns])


def g_single_input(b: Builder, x: int, spec, trace: Optional[list] = None) -> int:
    """Six-block construction for a finite or periodic single-input spec."""
    periodic = isinstance(spec, PeriodicSpec)
    m, out = spec.m, spec.out
    log = trace if trace is not None else []
    if periodic and m == 1:
        log.append("output")
        return b.neuron([(x, 2)] if 1 in out else [], layer=b.layer(x) + 1)
    if periodic and 4 ** ceil_log4(m) != m:
        raise GadgetError(f"periodic construction needs a power of 4, got m={m}")
    mbar = 4 ** ceil_log4(m)
    a = isqrt(mbar)
    v11 = x
    for _ in range(ceil_log2(mbar) // 2):
        v11 = g_odd(b, v11)
    v12 = b.lift(x, b.layer(v11))
    log.append("coarse-split")
    v2 = g_clock(b, v11, a) + g_clock(b, v12, a)
    log.append("fine-split")
    if periodic:
        v3 = [g_skip(b, v) for v in v2]
        log.append("periodic-block:SKIP")
    else:
        v3 = [g_spike1(b, v) for v in v2[:a]]
        v3 += b.sync(v2[a:], b.layer(v3[0]))
        log.append("finite-block:SPIKE_1")
    l4 = b.layer(v3[0]) + 1
    v4 = []
    for j in range(1, a + 1):
        srcs = [(v3[i - 1], 2) for i in range(1, a + 1) if (i - 1) * a + j in out]
        v4.append(b.neuron(srcs, layer=l4))
    v4 += b.sync(v3[a:], l4)
    log.append("representation-block")
    v5 = [g_ceil1(b, v4[j], v4[a + j]) for j in range(a)]
    log.append("delay-block")
    o = g_or(b, v5)
    log.append("output")
    return o


def g_spike(b: Builder, x: int, m: int) -> int:
    if m < 1:
        raise GadgetError("SPIKE needs m >= 1")
    if m == 1:
        return g_spike1(b, x)
    return g_single_input(b, x, FiniteSpec(m, frozenset({m})))


def g_represent(b: Builder, x: int, r: Sequence[int]) -> int:
    r = tuple(r)
    if not r or any(v not in (0, 1) for v in r):
        raise GadgetError(f"REPRESENT needs a nonempty bit vector, got {r}")
    return g_single_input(b, x, FiniteSpec(len(r), frozenset(k for k in range(1, len(r) + 1) if r[k - 1])))


# ---------------------------------------------------------------------------
# Boolean heads and memory


def g_boolean(b: Builder, xs: Sequence[int], table: Iterable) -> int:
    """Four-layer sum-of-products head; ``table`` lists the accepted nonzero bit vectors."""
    xs = b.sync(xs)
    d = len(xs)
    rows = sorted({tuple(int(v) for v in y) for y in table})
    for y in rows:
        if len(y) != d:
            raise GadgetError(f"table entry {y} has length {len(y)}, expected {d}")
        if not any(y):
            raise GadgetError("the all-zero vector cannot be accepted")
    copies = [b.neuron([(x, 2)]) for x in xs]
    uni = b.neuron([(x, 2) for x in xs])
    plus = [b.neuron([(c, 2)]) for c in copies]
    minus = [b.neuron([(uni, 2), (c, -2)]) for c in copies]
    uni2 = b.neuron([(uni, 2)])
    l3 = b.layer(uni2) + 1
    pats = []
    for y in rows:
        srcs = [((plus if y[i] else minus)[i], 2) for i in range(d)] + [(uni2, 2 - 2 * d)]
        pats.append(b.neuron(srcs, layer=l3))
    return b.neuron([(p, 2) for p in pats], layer=l3 + 1)


def g_memory(b: Builder, xs: Sequence[int], m: int) -> list:
    """Outputs (i, j) in lexicographic order: input i delayed by j-1 union events."""
    if m < 1:
        raise GadgetError("MEMORY needs m >= 1")
    xs = b.sync(xs)
    if m == 1:
        return [g_skip(b, x) for x in xs]
    mbar = 2 ** (ceil_log2(m) + 2)
    copies = [b.neuron([(x, 2)]) for x in xs]
    uni = b.neuron([(x, 2) for x in xs])
    clk = g_clock(b, uni, mbar)
    ands = [[g_and(b, [c, clk[l]]) for l in range(mbar)] for c in copies]
    out = []
    for i in range(len(xs)):
        for j in range(1, m + 1):
            parts = [g_translate(b, ands[i][l], clk[(l + j - 1) % mbar], clk[(l + j) % mbar]) for l in range(mbar)]
            out.append(parts)
    return [g_or(b, parts) for parts in out]


def markov_table(spec: MarkovianSpec) -> set:
    """Accepted memory-output vectors, indexed (i, j) lexicographically.

    Coordinate (i, j) is input i's bit at the j-th most recent union event;
    windows shorter than m leave the older coordinates at 0.
    """
    d, m = spec.d, spec.m
    table = set()
    for pat in spec.accepted:
        y = [0] * (d * m)
        w = len(pat)
        for j in range(1, w + 1):
            vec = pat[w - j]
            for i in range(d):
                y[i * m + j - 1] = vec[i]
        table.add(tuple(y))
    return table


def g_markov(b: Builder, xs: Sequence[int], spec: MarkovianSpec) -> int:
    if len(xs) != spec.d:
        raise GadgetError(f"spec has {spec.d} inputs, got {len(xs)}")
    return g_boolean(b, g_memory(b, xs, spec.m), markov_table(spec))


def _ceil1_spec() -> MarkovianSpec:
    acc = set()
    for pat in all_patterns(2, 2):
        cur = pat[-1]
        prev = pat[-2] if len(pat) == 2 else None
        if cur[1] and (cur[0] or (prev is not None and prev[0] and not prev[1])):
            acc.add(pat)
    return MarkovianSpec(2, 2, frozenset(acc))


def _ceil_head_spec() -> MarkovianSpec:
    acc = set()
    for pat in all_patterns(4, 2):
        if len(pat) != 2:
            continue
        prev, cur = pat
        if cur[3] and (prev[0] or (prev[1] and cur[2])):
            acc.add(pat)
    return MarkovianSpec(4, 2, frozenset(acc))


CEIL1_SPEC = _ceil1_spec()
CEIL_HEAD_SPEC = _ceil_head_spec()


def g_ceil1(b: Builder, i: int, d: int) -> int:
    return g_markov(b, [i, d], CEIL1_SPEC)


def g_ceil(b: Builder, i: int, d: int, m: int) -> int:
    if m < 1:
        raise GadgetError("CEIL needs m >= 1")
    if m == 1:
        return g_ceil1(b, i, d)
    f1 = b.embed(wrap_with_reset(build_finite("SPIKE", m)), [i, d])[0]
    f2 = b.embed(wrap_with_reset(build_finite("SPIKE", m - 1)), [i, d])[0]
    f3 = g_and(b, [i, d])
    return g_markov(b, [f1, f2, f3, d], CEIL_HEAD_SPEC)


def g_delay(b: Builder, i: int, d: int, m: int) -> int:
    if m < 1:
        raise GadgetError("DELAY needs m >= 1")
    mbar = 2 ** (ceil_log2(m) + 2)
    j = g_or(b, [i, d])
    n = g_clock(b, j, mbar)
    ms = [g_and(b, [n[k], i]) for k in range(mbar)]
    hs = [g_translate(b, ms[k], n[(k + m - 1) % mbar], n[(k + m) % mbar]) for k in range(mbar)]
    return g_or(b, hs)


def g_repeat(b: Builder, i: int, d: int, m: int) -> int:
    return g_or(b, [g_delay(b, i, d, k) for k in range(1, m + 2)])


def g_is_approx_equal(b: Builder, i: int, j: int, d: int, m: int) -> int:
    hs = [g_is_equal(b, g_ceil(b, i, d, k), g_ceil(b, j, d, k), d) for k in range(1, m + 1)]
    return hs[0] if m == 1 else g_and(b, hs)


def g_if_then(b: Builder, i: int, d: int, r: Sequence[int]) -> int:
    r = tuple(r)
    idd = g_ceil1(b, i, d)
    rep = g_represent(b, d, r)
    full = g_represent(b, d, (1,) * len(r))
    return g_spike(b, g_is_equal(b, idd, rep, full), len(r))


# ---------------------------------------------------------------------------
# network-level transforms


def wrap_with_reset(net: Network) -> Network:
    """Append a reset input R that clears every neuron whenever it spikes."""
    L = net.depth
    layers = []
    for k, lay in enumerate(net.layers, start=1):
        r_col = lay.cols
        mass = [Fraction(0)] * lay.rows
        for o, _, w in lay.entries:
            mass[o] += abs(w)
        ents = list(lay.entries) + [(o, r_col, -mass[o] - 1) for o in range(lay.rows)]
        rows = lay.rows
        if k < L:
            ents.append((rows, r_col, TWO))
            rows += 1
        layers.append(SparseLayer(rows, lay.cols + 1, tuple(ents)))
    meta = dict(net.meta)
    ports = dict(meta.get("ports", {}))
    if ports.get("inputs"):
        ports["inputs"] = list(ports["inputs"]) + ["R"]
    meta["ports"] = ports
    meta["reset"] = True
    return Network(tuple(layers), net.memory, meta)


def limit_out_degree(net: Network, q: int) -> Network:
    """Insert skip fan-out trees so that no neuron feeds more than q others."""
    if q < 2:
        raise GadgetError("out-degree limit must be at least 2")
    out_layers = []
    for lay in net.layers:
        consumers = [[] for _ in range(lay.cols)]
        for o, i, w in lay.entries:
            consumers[i].append((o, w))
        need = [max(1, -(-len(c) // q)) for c in consumers]
        levels = 0
        while any(q**levels < n for n in need):
            levels += 1
        if max((len(c) for c in consumers), default=0) <= q:
            levels = 0
        if levels == 0:
            out_layers.append(lay)
            continue
        # index of copy c of input u at the current level
        width = lay.cols
        index = [[u] for u in range(width)]
        for t in range(1, levels + 1):
            ents = []
            new_index = []
            pos = 0
            for u in range(width):
                count = min(q**t, need[u])
                ids = []
                for c in range(count):
                    ents.append((pos, index[u][c // q], TWO))
                    ids.append(pos)
                    pos += 1
                new_index.append(ids)
            prev_rows = sum(len(ix) for ix in index)
            out_layers.append(SparseLayer(pos, prev_rows, tuple(ents)))
            index = new_index
        ents = []
        for u in range(width):
            for k, (o, w) in enumerate(consumers[u]):
                ents.append((o, index[u][k // q], w))
        out_layers.append(SparseLayer(lay.rows, sum(len(ix) for ix in index), tuple(ents)))
    return Network(tuple(out_layers), net.memory, dict(net.meta))


# ---------------------------------------------------------------------------
# public builders

PRIMITIVES = ("SKIP", "OR", "AND", "MINUS", "XOR", "IS_EQUAL", "TRANSLATE")
PERIODIC = ("ODD_EVEN", "CLOCK")
FINITE = ("SPIKE", "REPRESENT")
TEMPORAL = ("CEIL", "IS_APPROX_EQUAL", "DELAY", "REPEAT", "IF_THEN")
ALL_KINDS = PRIMITIVES + PERIODIC + FINITE + TEMPORAL + ("MEMORY",)


def _finish(b: Builder, outs, kind, params, ins, outnames, memory) -> Network:
    return b.build(
        list(outs),
        memory,
        kind=kind,
        params=params,
        ports={"inputs": list(ins), "outputs": list(outnames)},
    )


def build_primitive(kind: str, d: Optional[int] = None, memory: MemoryMode = INFINITE, depth: int = 1) -> Network:
    kind = kind.upper()
    if kind == "SKIP":
        b = Builder(1)
        return _finish(b, [g_skip(b, b.inputs[0], depth)], kind, {"depth": depth}, ["I"], ["O"], memory)
    if kind in ("OR", "AND"):
        d = 2 if d is None else d
        if d < 2:
            raise GadgetError(f"{kind} needs d >= 2, got {d}")
        b = Builder(d)
        o = g_or(b, b.inputs) if kind == "OR" else g_and(b, b.inputs)
        return _finish(b, [o], kind, {"d": d}, [f"I{k}" for k in range(1, d + 1)], ["O"], memory)
    fixed = {"MINUS": 2, "XOR": 2, "IS_EQUAL": 3, "TRANSLATE": 3}
    if kind not in fixed:
        raise GadgetError(f"{kind} is not a primitive")
    if d is not None and d != fixed[kind]:
        raise GadgetError(f"{kind} has fixed arity {fixed[kind]}, got {d}")
    b = Builder(fixed[kind])
    x = b.inputs
    if kind == "MINUS":
        o, ins = g_minus(b, *x), ["I", "J"]
    elif kind == "XOR":
        o, ins = g_xor(b, *x), ["I", "J"]
    elif kind == "IS_EQUAL":
        o, ins = g_is_equal(b, *x), ["I", "J", "D"]
    else:
        o, ins = g_translate(b, *x), ["T", "S", "C"]
    return _finish(b, [o], kind, {}, ins, ["O"], memory)


def build_periodic(kind: str, m: Optional[int] = None, memory: MemoryMode = INFINITE) -> Network:
    kind = kind.upper()
    b = Builder(1)
    if kind == "ODD_EVEN":
        return _finish(b, g_odd_even(b, b.inputs[0]), kind, {}, ["I"], ["ODD", "EVEN"], memory)
    if kind == "CLOCK":
        if m is None or not is_power_of_two(m):
            raise GadgetError(f"CLOCK needs m = 2^q, got {m}")
        outs = g_clock(b, b.inputs[0], m)
        return _finish(b, outs, kind, {"m": m}, ["I"], [f"O{j}" for j in range(1, m + 1)], memory)
    raise GadgetError(f"{kind} is not a periodic gadget")


def build_finite(kind: str, m: Optional[int] = None, r: Optional[Sequence[int]] = None, memory: MemoryMode = INFINITE) -> Network:
    kind = kind.upper()
    b = Builder(1)
    if kind == "SPIKE":
        if m is None or m < 1:
            raise GadgetError(f"SPIKE needs m >= 1, got {m}")
        return _finish(b, [g_spike(b, b.inputs[0], m)], kind, {"m": m}, ["I"], ["O"], memory)
    if kind == "REPRESENT":
        if r is None:
            raise GadgetError("REPRESENT needs a bit vector r")
        r = tuple(int(v) for v in r)
        if m is not None and len(r) != m:
            raise GadgetError(f"r has length {len(r)}, expected {m}")
        o = g_represent(b, b.inputs[0], r)
        return _finish(b, [o], kind, {"m": len(r), "r": list(r)}, ["I"], ["O"], memory)
    raise GadgetError(f"{kind} is not a finite gadget")


def build_temporal(kind: str, m: Optional[int] = None, r: Optional[Sequence[int]] = None, memory: MemoryMode = INFINITE) -> Network:
    kind = kind.upper()
    if kind == "IF_THEN":
        if not r or any(v not in (0, 1) for v in r):
            raise GadgetError("IF_THEN needs a nonempty bit vector r")
        r = tuple(int(v) for v in r)
        b = Builder(2)
        o = g_if_then(b, *b.inputs, r)
        return _finish(b, [o], kind, {"m": len(r), "r": list(r)}, ["I", "D"], ["O"], memory)
    if m is None or m < 1:
        raise GadgetError(f"{kind} needs m >= 1, got {m}")
    if kind == "IS_APPROX_EQUAL":
        b = Builder(3)
        return _finish(b, [g_is_approx_equal(b, *b.inputs, m)], kind, {"m": m}, ["I", "J", "D"], ["O"], memory)
    fns = {"CEIL": g_ceil, "DELAY": g_delay, "REPEAT": g_repeat}
    if kind not in fns:
        raise GadgetError(f"{kind} is not a temporal gadget")
    b = Builder(2)
    return _finish(b, [fns[kind](b, *b.inputs, m)], kind, {"m": m}, ["I", "D"], ["O"], memory)


def build_memory(d: int, m: int, memory: MemoryMode = INFINITE) -> Network:
    if d < 1 or m < 1:
        raise GadgetError("MEMORY needs d, m >= 1")
    b = Builder(d)
    outs = g_memory(b, b.inputs, m)
    names = [f"O{i}_{j}" for i in range(1, d + 1) for j in range(1, m + 1)]
    return _finish(b, outs, "MEMORY", {"d": d, "m": m}, [f"I{i}" for i in range(1, d + 1)], names, memory)


def build_gadget(kind: str, memory: MemoryMode = INFINITE, **params) -> Network:
    """Dispatch on kind; params as accepted by the specific builder."""
    kind = kind.upper()
    if kind in PRIMITIVES:
        return build_primitive(kind, params.get("d"), memory, params.get("depth", 1))
    if kind in PERIODIC:
        return build_periodic(kind, params.get("m"), memory)
    if kind in FINITE:
        return build_finite(kind, params.get("m"), params.get("r"), memory)
    if kind in TEMPORAL:
        return build_temporal(kind, params.get("m"), params.get("r"), memory)
    if kind == "MEMORY":
        return build_memory(params["d"], params["m"], memory)
    raise GadgetError(f"unknown gadget kind {kind!r}")


# closed-form architecture counts; the remaining kinds are measured and frozen in the tests
FORMULAS = {
    "SKIP": "L=depth, widths=(1,...,1), s=depth",
    "OR": "L=1, widths=(d,1), s=d",
    "AND": "L=2, widths=(d,2,1), s=d+3",
    "MINUS": "L=1, widths=(2,1), s=2",
    "XOR": "L=2, widths=(2,2,1), s=6",
    "IS_EQUAL": "L=4, widths=(3,4,3,2,1), s=18",
    "TRANSLATE": "L=1, widths=(3,1), s=3",
    "ODD_EVEN": "L=2, widths=(1,2,2), s=5",
    "CLOCK": "L=2q, widths=(1,2,2,...,2^q,2^q), s=5(2^q-1) for m=2^q",
    "SPIKE": "m=1: L=6, widths=(1,2,2,4,4,5,1), s=36; m>=2: single-input construction",
    "MEMORY": "m=1: L=1, widths=(d,d), s=d",
}


def formula_stats(kind: str, **params):
    """Closed-form (depth, widths, s) where one exists, else None."""
    kind = kind.upper()
    if kind == "SKIP":
        L = params.get("depth", 1)
        return L, (1,) * (L + 1), L
    if kind == "OR":
        d = params["d"]
        return 1, (d, 1), d
    if kind == "AND":
        d = params["d"]
        return 2, (d, 2, 1), d + 3
    fixed = {
        "MINUS": (1, (2, 1), 2),
        "XOR": (2, (2, 2, 1), 6),
        "IS_EQUAL": (4, (3, 4, 3, 2, 1), 18),
        "TRANSLATE": (1, (3, 1), 3),
        "ODD_EVEN": (2, (1, 2, 2), 5),
    }
    if kind in fixed:
        return fixed[kind]
    if kind == "CLOCK":
        m = params["m"]
        q = ceil_log2(m)
        widths = (1,) + tuple(w for k in range(1, q + 1) for w in (2**k, 2**k))
        return 2 * q, widths, 5 * (m - 1)
    if kind == "SPIKE" and params.get("m") == 1:
        return 6, (1, 2, 2, 4, 4, 5, 1), 36
    if kind == "MEMORY" and params.get("m") == 1:
        d = params["d"]
        return 1, (d, d), d
    return None


def reset_stats(st) -> tuple:
    """Expected (widths, s) after wrap_with_reset."""
    L = st.depth
    widths = tuple(w + (1 if 0 < k < L else 0) for k, w in enumerate(st.widths))
    widths = (st.widths[0] + 1,) + widths[1:]
    s = st.nonzero_weights + st.total_neurons - st.widths[0] + L - 1
    return widths, s


def catalog(examples: Optional[list] = None) -> list:
    """One entry per gadget kind with ports, measured stats and the closed form if known."""
    examples = examples or [
        ("SKIP", {"depth": 2}),
        ("OR", {"d": 3}),
        ("AND", {"d": 3}),
        ("MINUS", {}),
        ("XOR", {}),
        ("IS_EQUAL", {}),
        ("TRANSLATE", {}),
        ("ODD_EVEN", {}),
        ("CLOCK", {"m": 4}),
        ("SPIKE", {"m": 1}),
        ("SPIKE", {"m": 3}),
        ("REPRESENT", {"r": [1, 0, 1]}),
        ("CEIL", {"m": 1}),
        ("CEIL", {"m": 2}),
        ("IS_APPROX_EQUAL", {"m": 1}),
        ("DELAY", {"m": 2}),
        ("REPEAT", {"m": 1}),
        ("IF_THEN", {"r": [1, 0]}),
        ("MEMORY", {"d": 2, "m": 2}),
    ]
    out = []
    for kind, params in examples:
        net = build_gadget(kind, **params)
        out.append(
            {
                "kind": kind,
                "params": params,
                "ports": net.meta.get("ports", {}),
                "stats": stats(net).as_dict(),
                "formula": FORMULAS.get(kind, "measured"),
            }
        )
    return out
