"""Synthesis of networks from function specs, with architecture accounting.

Every compiler returns a :class:`CompileReport`.  ``bound_check`` compares
the measured architecture with exact counted formulas derived from the
construction (depth, total neurons including inputs, nonzero weights), and
with the matching lower bounds.
"""

from __future__ import annotations

import decimal
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Optional, Sequence

from . import gadgets as G
from .expressivity import lower_bound_params
from .gadgets import Builder, GadgetError, ceil_log2, ceil_log4, limit_out_degree
from .model import INFINITE, MemoryMode, Network, NetworkStats, SparseLayer, stats
from .oracle import (
    ClassifierSpec,
    CompositionalSpec,
    FiniteSpec,
    MarkovianSpec,
    PeriodicSpec,
    SpecError,
    boolean_spec,
    eval_oracle,
)
from .simulator import simulate_network


class CompileError(ValueError):
    pass


TRACE_VOCABULARY = (
    "coarse-split",
    "fine-split",
    "finite-block:SPIKE_1",
    "periodic-block:SKIP",
    "representation-block",
    "delay-block",
    "memory-block",
    "boolean-head",
    "complement",
    "component",
    "out-degree-limit",
    "fallback",
    "pool",
    "hidden-layer",
    "output",
)


@dataclass
class CompileReport:
    network: Network
    stats: NetworkStats
    bound_check: list = field(default_factory=list)
    construction_trace: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.bound_check)

    def to_json(self) -> dict:
        return {
            "stats": self.stats.as_dict(),
            "bound_check": [_plain(c) for c in self.bound_check],
            "construction_trace": list(self.construction_trace),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _report(net: Network, checks: list, trace: list) -> CompileReport:
    return CompileReport(net, stats(net), checks, trace)


def _arch_check(name: str, expected: dict, st: NetworkStats) -> dict:
    observed = {"depth": st.depth, "neurons": st.total_neurons, "weights": st.nonzero_weights}
    return {"name": name, "expected": expected, "observed": observed, "pass": expected == observed}


def _lower_checks(cls: str, m: int, r: int, d: int, st: NetworkStats) -> list:
    lb = lower_bound_params(cls, m, r, d)
    checks = [
        {
            "name": f"{cls}-weight-lower-bound",
            "expected": {"s_min": lb["s"]},
            "observed": {"s": st.nonzero_weights},
            "pass": st.nonzero_weights >= lb["s"],
        }
    ]
    if st.depth >= 3:
        n = st.total_neurons
        checks.append(
            {
                "name": "neuron-weight-relation",
                "expected": {"neurons_gt_sqrt_2s": f"sqrt({2 * st.nonzero_weights})"},
                "observed": {"neurons": n},
                "pass": n * n > 2 * st.nonzero_weights,
            }
        )
    return checks


def _check_memory(memory: MemoryMode, zero_ok: bool, what: str) -> None:
    if memory.kind == "zero" and not zero_ok:
        raise CompileError(f"unsupported memory: {what} needs h > 0 (h = 0 only works for window/period 1)")


# ---------------------------------------------------------------------------
# counted formulas (inputs are included in the neuron totals)

CEIL1_NEURONS = 163
CEIL1_WEIGHTS = 326
CEIL1_DEPTH = 15


def counts_single_input(kind: str, m: int, r: int) -> dict:
    if kind == "periodic" and m == 1:
        return {"depth": 1, "neurons": 2, "weights": r}
    mbar = 4 ** ceil_log4(m)
    a = math.isqrt(mbar)
    b = ceil_log2(mbar) // 2
    if kind == "finite":
        return {"depth": 4 * b + 23, "neurons": 5 * b + 197 * a - 6, "weights": 6 * b + 380 * a - 10 + r}
    return {"depth": 4 * b + 18, "neurons": 5 * b + 175 * a - 6, "weights": 6 * b + 340 * a - 10 + r}


def counts_boolean(d: int, r: int) -> dict:
    per_pattern = d + (1 if d > 1 else 0)
    return {"depth": 4, "neurons": d + (3 * d + 3 + r), "weights": 5 * d + 1 + r * (per_pattern + 1)}


def counts_memory(d: int, m: int) -> dict:
    if m == 1:
        return {"depth": 1, "neurons": 2 * d, "weights": d}
    mb = 2 ** (ceil_log2(m) + 2)
    c = ceil_log2(mb)
    neurons = (d + 1) + (4 * mb - 4) + 2 * c * d + 3 * d * mb + 2 * mb + d * m * mb + d * m
    weights = 2 * d + 5 * (mb - 1) + 2 * c * d + 5 * d * mb + 2 * mb + 3 * d * m * mb + d * m * mb
    return {"depth": 2 * c + 5, "neurons": d + neurons, "weights": weights}


def _chain(first: dict, second: dict, shared: int) -> dict:
    """Counts of second ∘ first, where ``shared`` neurons appear in both totals."""
    return {
        "depth": first["depth"] + second["depth"],
        "neurons": first["neurons"] + second["neurons"] - shared,
        "weights": first["weights"] + second["weights"],
    }


def counts_markovian(d: int, m: int, r: int) -> dict:
    return _chain(counts_memory(d, m), counts_boolean(d * m, r), d * m)


def counts_classifier(m: int, r: int, complement: bool = False) -> dict:
    # CEIL_1 on (I, D) and a matching skip chain for D
    front = {"depth": CEIL1_DEPTH, "neurons": 2 + CEIL1_NEURONS + CEIL1_DEPTH, "weights": CEIL1_WEIGHTS + CEIL1_DEPTH}
    out = _chain(_chain(front, counts_memory(2, m), 2), counts_boolean(2 * m, r), 2 * m)
    if complement:
        out = {"depth": out["depth"] + 1, "neurons": out["neurons"] + 5, "weights": out["weights"] + 6}
    return out


# ---------------------------------------------------------------------------
# single-input (finite / periodic)


def _single_input_network(spec, memory: MemoryMode, trace: list) -> Network:
    b = Builder(1)
    try:
        o = G.g_single_input(b, b.inputs[0], spec, trace)
    except GadgetError as exc:
        raise CompileError(str(exc)) from None
    return b.build(
        [o],
        memory,
        kind=spec.kind,
        params={"m": spec.m, "out": sorted(spec.out)},
        ports={"inputs": ["I"], "outputs": ["O"]},
    )


def compile_single_input(spec, memory: MemoryMode = INFINITE) -> CompileReport:
    if not isinstance(spec, (FiniteSpec, PeriodicSpec)):
        raise CompileError(f"single-input compiler takes finite or periodic specs, got {type(spec).__name__}")
    periodic = isinstance(spec, PeriodicSpec)
    _check_memory(memory, periodic and spec.m == 1, f"{spec.kind} spec with m={spec.m}")
    if periodic and 4 ** ceil_log4(spec.m) != spec.m:
        raise CompileError(
            f"unsupported period {spec.m}: periodic specs need m = 4^q; "
            f"re-express it with period {4 ** ceil_log4(spec.m)} if {spec.m} divides that"
        )
    trace: list = []
    net = _single_input_network(spec, memory, trace)
    st = stats(net)
    checks = [_arch_check("single-input", counts_single_input(spec.kind, spec.m, spec.r), st)]
    cls = "per" if periodic else "fin"
    checks += _lower_checks(cls, spec.m, spec.r, 1, st)
    return _report(net, checks, trace)


# ---------------------------------------------------------------------------
# Boolean heads and Markovian specs


def _table_from(d: int, table) -> set:
    """Accepted nonzero vectors from a callable, a dict or an iterable of vectors."""
    vecs = list(product((0, 1), repeat=d))
    if callable(table):
        val = {v: bool(table(v)) for v in vecs}
    elif isinstance(table, dict):
        norm = {tuple(int(x) for x in k): v for k, v in table.items()}
        for k in norm:
            if len(k) != d:
                raise CompileError(f"table key {k} is not a {d}-bit vector")
        val = {v: bool(norm.get(v, 0)) for v in vecs}
    else:
        acc = {tuple(int(x) for x in v) for v in table}
        for v in acc:
            if len(v) != d or any(x not in (0, 1) for x in v):
                raise CompileError(f"table entry {v} is not a {d}-bit vector")
        val = {v: v in acc for v in vecs}
    if val[(0,) * d]:
        raise CompileError("Boolean function must map the zero vector to 0")
    return {v for v in vecs if val[v]}


def compile_boolean(d: int, table, memory: MemoryMode = INFINITE) -> CompileReport:
    """Four-layer memoryless head; valid under every memory mode, including h = 0."""
    if d < 1:
        raise CompileError("need d >= 1")
    acc = _table_from(d, table)
    b = Builder(d)
    o = G.g_boolean(b, b.inputs, acc)
    net = b.build(
        [o],
        memory,
        kind="boolean",
        params={"d": d, "table": ["".join(map(str, v)) for v in sorted(acc)]},
        ports={"inputs": [f"I{i}" for i in range(1, d + 1)], "outputs": ["O"]},
    )
    st = stats(net)
    checks = [_arch_check("boolean-head", counts_boolean(d, len(acc)), st)]
    return _report(net, checks, ["boolean-head", "output"])


def boolean_as_spec(d: int, table) -> MarkovianSpec:
    return boolean_spec(d, _table_from(d, table))


def compile_markovian(spec: MarkovianSpec, memory: MemoryMode = INFINITE) -> CompileReport:
    if not isinstance(spec, MarkovianSpec):
        raise CompileError("compile_markovian takes a Markovian spec")
    _check_memory(memory, spec.m == 1, f"Markovian spec with m={spec.m}")
    b = Builder(spec.d)
    o = G.g_markov(b, b.inputs, spec)
    net = b.build(
        [o],
        memory,
        kind="markovian",
        params={"d": spec.d, "m": spec.m, "r": spec.r},
        ports={"inputs": [f"I{i}" for i in range(1, spec.d + 1)], "outputs": ["O"]},
    )
    st = stats(net)
    checks = [_arch_check("markovian", counts_markovian(spec.d, spec.m, spec.r), st)]
    checks += _lower_checks("mm", spec.m, spec.r, spec.d, st)
    return _report(net, checks, ["memory-block", "boolean-head", "output"])


# ---------------------------------------------------------------------------
# classifier


def classifier_table(spec: ClassifierSpec) -> set:
    m = spec.m
    table = set()
    for pat in spec.patterns:
        x1 = tuple(pat[m - j] for j in range(1, m + 1))
        table.add(x1 + (1,) * m)
    return table


def compile_classifier(spec: ClassifierSpec, memory: MemoryMode = INFINITE, complement: Optional[bool] = None) -> CompileReport:
    """Two-input (I, D) classifier; ``complement`` subtracts the rejected patterns instead.

    By default the complement form is used when more than half of the
    2^m patterns are accepted, which keeps the head at most 2^(m-1) wide.
    """
    if not isinstance(spec, ClassifierSpec):
        raise CompileError("compile_classifier takes a classifier spec")
    _check_memory(memory, False, "classifier")
    m = spec.m
    if complement is None:
        complement = spec.r > 2 ** (m - 1)
    if complement:
        every = set(product((0, 1), repeat=m))
        head_spec = ClassifierSpec(m, frozenset(every - set(spec.patterns)))
    else:
        head_spec = spec
    b = Builder(2)
    I, D = b.inputs
    idd = G.g_ceil1(b, I, D)
    mem = G.g_memory(b, [idd, b.lift(D, b.layer(idd))], m)
    o = G.g_boolean(b, mem, classifier_table(head_spec))
    trace = ["delay-block", "memory-block", "boolean-head"]
    if complement:
        o = G.g_minus(b, mem[2 * m - 1], o)
        trace.append("complement")
    trace.append("output")
    net = b.build(
        [o],
        memory,
        kind="classifier",
        params={"m": m, "patterns": sorted("".join(map(str, p)) for p in spec.patterns), "complement": complement},
        ports={"inputs": ["I", "D"], "outputs": ["O"]},
    )
    st = stats(net)
    checks = [_arch_check("classifier", counts_classifier(m, head_spec.r, complement), st)]
    return _report(net, checks, trace)


# ---------------------------------------------------------------------------
# compositions


def _component_network(spec, memory: MemoryMode) -> CompileReport:
    if isinstance(spec, (FiniteSpec, PeriodicSpec)):
        return compile_single_input(spec, memory)
    if isinstance(spec, MarkovianSpec):
        return compile_markovian(spec, memory)
    if isinstance(spec, ClassifierSpec):
        return compile_classifier(spec, memory)
    if isinstance(spec, CompositionalSpec):
        return compile_compositional(spec, memory)
    raise CompileError(f"cannot compile component {type(spec).__name__}")


def compile_compositional(spec: CompositionalSpec, memory: MemoryMode = INFINITE) -> CompileReport:
    if not isinstance(spec, CompositionalSpec):
        raise CompileError("compile_compositional takes a compositional spec")
    b = Builder(spec.n_inputs)
    cur = list(b.inputs)
    trace = []
    checks = []
    for li, layer in enumerate(spec.layers, start=1):
        nxt = []
        for ci, comp in enumerate(layer):
            sub = _component_network(comp.spec, memory)
            for c in sub.bound_check:
                checks.append(dict(c, name=f"layer{li}.component{ci}.{c['name']}"))
            trace.append("component")
            nxt.append(b.embed(sub.network, [cur[i] for i in comp.inputs])[0])
        cur = nxt
    trace.append("output")
    net = b.build(
        cur,
        memory,
        kind="compositional",
        params={"layers": [len(l) for l in spec.layers]},
        ports={"inputs": [f"I{i}" for i in range(1, spec.n_inputs + 1)], "outputs": ["O"]},
    )
    return _report(net, checks, trace)


# ---------------------------------------------------------------------------
# bounded out-degree


def compile_bounded_outdegree(spec, q: int, memory: MemoryMode = INFINITE) -> CompileReport:
    """Single-input construction whose neurons each feed at most q others."""
    if not isinstance(spec, (FiniteSpec, PeriodicSpec)):
        raise CompileError("bounded out-degree compiler takes finite or periodic specs")
    if q < 4:
        raise CompileError(f"out-degree bound must be at least 4, got {q}")
    periodic = isinstance(spec, PeriodicSpec)
    _check_memory(memory, periodic and spec.m == 1, f"{spec.kind} spec with m={spec.m}")
    mbar = 4 ** ceil_log4(spec.m)
    if periodic and mbar != spec.m:
        raise CompileError(f"unsupported period {spec.m}: periodic specs need m = 4^q")
    qq = 1 << (q.bit_length() - 1)
    trace: list = []
    if qq >= 2 * math.isqrt(mbar) or (periodic and spec.m == 1):
        trace.append("fallback")
        base = _single_input_network(spec, memory, trace)
    else:
        base = _bounded_network(spec, qq, mbar, memory, trace)
    net = limit_out_degree(base, q).with_meta(out_degree=q)
    trace.append("out-degree-limit")
    trace.append("output")
    st = stats(net)
    checks = [
        {
            "name": "max-out-degree",
            "expected": {"at_most": q},
            "observed": {"max_out_degree": st.max_out_degree},
            "pass": st.max_out_degree <= q,
        },
        _arch_check("pre-transform", counts_bounded(spec.kind, spec.m, spec.r, q), stats(base)),
    ]
    return _report(net, checks, trace)


def counts_bounded(kind: str, m: int, r: int, q: int) -> dict:
    """Architecture before the fan-out trees are inserted."""
    mbar = 4 ** ceil_log4(m)
    qq = 1 << (q.bit_length() - 1)
    if qq >= 2 * math.isqrt(mbar) or (kind == "periodic" and m == 1):
        return counts_single_input(kind, m, r)
    M = mbar // qq
    lq, lM = ceil_log2(qq), ceil_log2(M)
    block, block_n, block_w = (6, 18, 36) if kind == "finite" else (1, 1, 1)
    l4 = 2 * lq + 2 * lM + block + 1
    lift = (l4 - 1 - 2 * lq) * qq  # U lanes carried from depth 1 + 2 lq up to the representation layer
    neurons = 1 + 3 * lq + (4 * M - 4) + 1 + (4 * qq - 4) + block_n * M + qq + lift + CEIL1_NEURONS * qq + 1
    weights = 4 * lq + 5 * (M - 1) + 1 + 5 * (qq - 1) + block_w * M + r + lift + CEIL1_WEIGHTS * qq + qq
    return {"depth": l4 + CEIL1_DEPTH + 1, "neurons": neurons, "weights": weights}


def _bounded_network(spec, qq: int, mbar: int, memory: MemoryMode, trace: list) -> Network:
    b = Builder(1)
    x = b.inputs[0]
    M = mbar // qq
    v = x
    for _ in range(ceil_log2(qq)):
        v = G.g_odd(b, v)
    v1 = G.g_clock(b, v, M)
    trace.append("coarse-split")
    u = G.g_clock(b, G.g_skip(b, x), qq)
    trace.append("fine-split")
    if isinstance(spec, FiniteSpec):
        v3 = [G.g_spike1(b, t) for t in v1]
        trace.append("finite-block:SPIKE_1")
    else:
        v3 = [G.g_skip(b, t) for t in v1]
        trace.append("periodic-block:SKIP")
    l4 = b.layer(v3[0]) + 1
    v4 = []
    for j in range(1, qq + 1):
        srcs = [(v3[i - 1], 2) for i in range(1, M + 1) if (i - 1) * qq + j in spec.out]
        v4.append(b.neuron(srcs, layer=l4))
    u4 = b.sync(u, l4)
    trace.append("representation-block")
    v5 = [G.g_ceil1(b, v4[j], u4[j]) for j in range(qq)]
    trace.append("delay-block")
    o = G.g_or(b, v5)
    return b.build(
        [o],
        memory,
        kind=spec.kind,
        params={"m": spec.m, "out": sorted(spec.out)},
        ports={"inputs": ["I"], "outputs": ["O"]},
    )


# ---------------------------------------------------------------------------
# few negative weights


def compile_low_negative(m: int, memory: MemoryMode = INFINITE) -> CompileReport:
    """m outputs; on an input with exactly m spikes output j carries only the j-th spike."""
    if m < 1:
        raise CompileError("need m >= 1")
    _check_memory(memory, False, "low-negative construction")
    b = Builder(1)
    x = b.inputs[0]
    trace = []
    if m == 1:
        outs = [G.g_skip(b, x)]
        trace.append("output")
    else:
        outs = [None] * m
        pool, n = x, m
        while n > 1:
            trace.append("pool")
            found = _isolate_pool(b, pool, n)
            for k, node in found.items():
                outs[k - 1] = node
            half = 1 << (ceil_log2(n) - 1)
            pool = G.g_minus(b, pool, G.g_or(b, [found[k] for k in sorted(found)]))
            n = half
        outs[0] = pool
        trace.append("output")
    net = b.build(outs, memory, kind="low-negative", params={"m": m}, ports={"inputs": ["I"], "outputs": [f"O{j}" for j in range(1, m + 1)]})
    st = stats(net)
    limit = 2 * ceil_log2(m)
    checks = [
        {
            "name": "negative-weights",
            "expected": {"at_most": limit},
            "observed": {"negative_weights": st.negative_weights},
            "pass": st.negative_weights <= limit,
        }
    ]
    return _report(net, checks, trace)


def _even_idx(s: frozenset) -> frozenset:
    return frozenset(sorted(s)[1::2])


def _isolate_pool(b: Builder, pool: int, n: int) -> dict:
    """Nodes spiking exactly at pool spike k, for every k in (2^(l-1), n], l = ceil(log2 n).

    Breadth-first search over index sets reachable with positive operations
    (EVEN, and OR with two fixed helper sets) from the even and odd halves.
    """
    l = ceil_log2(n)
    full = frozenset(range(1, n + 1))
    nodes: dict = {}
    ev = G.g_even(b, pool)
    E = _even_idx(full)
    nodes[E] = ev
    odd_node = []

    def odd():
        if not odd_node:
            odd_node.append(G.g_minus(b, pool, ev))
        return odd_node[0]

    O = full - E
    helpers = []
    e1 = full
    for _ in range(l - 1):
        e1 = _even_idx(e1)
    helpers.append(("E1", e1))
    if l >= 2:
        o1 = O
        for _ in range(l - 2):
            o1 = _even_idx(o1)
        helpers.append(("O1", o1))
    targets = {frozenset({k}) for k in range(2 ** (l - 1) + 1, n + 1)}
    # symbolic search first, then materialize only the paths that are used
    parent = {E: None, O: None}
    queue = deque([E, O])
    while queue and not targets <= set(parent):
        s = queue.popleft()
        cand = [(_even_idx(s), ("even", s, None))]
        for name, h in helpers:
            cand.append((_even_idx(s | h), ("even-or", s, name)))
        for t, how in cand:
            if t and t not in parent:
                parent[t] = how
                queue.append(t)
    missing = targets - set(parent)
    if missing:
        raise CompileError(f"cannot isolate spikes {sorted(min(t) for t in missing)} of a size-{n} pool")
    helper_nodes = {}

    def helper(name):
        if name not in helper_nodes:
            if name == "E1":
                node = pool
                for _ in range(l - 1):
                    node = G.g_even(b, node)
            else:
                node = odd()
                for _ in range(l - 2):
                    node = G.g_even(b, node)
            helper_nodes[name] = node
        return helper_nodes[name]

    def make(s):
        if s in nodes:
            return nodes[s]
        if s == O:
            nodes[s] = odd()
            return nodes[s]
        kind, src, name = parent[s]
        base = make(src)
        if kind == "even-or":
            base = G.g_or(b, [base, helper(name)])
        nodes[s] = G.g_even(b, base)
        return nodes[s]

    return {min(t): make(t) for t in sorted(targets, key=min)}


# ---------------------------------------------------------------------------
# shallow construction for a fixed input train


def gap_condition(m: int, gaps: Sequence, h) -> dict:
    """Both sides of dmax - dmin < h ln((1 - q^m) / (1 - q^(m-1))), q = exp(-dmin/h)."""
    gaps = [Fraction(g) for g in gaps]
    if m < 2 or not gaps:
        return {"lhs": "0", "rhs": "inf", "holds": True}
    ctx = decimal.Context(prec=60)
    dmin, dmax = min(gaps), max(gaps)
    hd = _dec(ctx, Fraction(h))
    q = ctx.exp(ctx.minus(ctx.divide(_dec(ctx, dmin), hd)))
    num = ctx.subtract(1, ctx.power(q, m))
    den = ctx.subtract(1, ctx.power(q, m - 1))
    rhs = ctx.multiply(hd, ctx.ln(ctx.divide(num, den))) if den > 0 else decimal.Decimal("Infinity")
    lhs = _dec(ctx, dmax - dmin)
    return {"lhs": str(lhs), "rhs": str(rhs), "holds": lhs < rhs}


def _dec(ctx, x: Fraction):
    return ctx.divide(ctx.create_decimal(x.numerator), ctx.create_decimal(x.denominator))


def shallow_weights(m: int, gaps: Sequence, memory: MemoryMode) -> list:
    """Hidden weights w_1..w_m making hidden neuron k first spike at the k-th input spike."""
    if memory.kind == "infinite":
        return [Fraction(2)] + [Fraction(2, 2 * k - 1) for k in range(2, m + 1)]
    ctx = decimal.Context(prec=80)
    hd = _dec(ctx, Fraction(memory.h))
    # A_k(w) = w * S_k before the first spike, so A_k(w) = 1 at w = 1/S_k
    S = [ctx.create_decimal(1)]
    for k in range(2, m + 1):
        c = ctx.exp(ctx.minus(ctx.divide(_dec(ctx, Fraction(gaps[k - 2])), hd)))
        S.append(ctx.add(1, ctx.multiply(c, S[-1])))
    roots = [ctx.divide(1, s) for s in S]
    ws = [Fraction(2)]
    for k in range(2, m + 1):
        lo, hi = roots[k - 1], roots[k - 2]
        if not lo < hi:
            raise CompileError(f"hidden neuron {k} cannot be separated from neuron {k - 1}")
        ws.append(Fraction(ctx.divide(ctx.add(lo, hi), 2)).limit_denominator(10**30))
        w = ws[-1]
        if not (_dec(ctx, w) * S[k - 1] > 1 and _dec(ctx, w) * S[k - 2] < 1):
            raise CompileError(f"rational weight for hidden neuron {k} lost the separation")
    return ws


def compile_shallow_homogeneous(m: int, out: Iterable[int], gaps: Sequence, memory: MemoryMode = INFINITE) -> CompileReport:
    """One hidden layer (1, m, 1) realizing the output set ``out`` on one input train.

    ``gaps`` are the m-1 inter-spike gaps of the intended input; with
    infinite memory the construction works for every input with m spikes.
    """
    out = frozenset(out)
    if m < 1 or any(not 1 <= k <= m for k in out):
        raise CompileError(f"need m >= 1 and out inside 1..{m}")
    gaps = [Fraction(g) for g in gaps]
    if len(gaps) != m - 1 or any(g <= 0 for g in gaps):
        raise CompileError(f"need {m - 1} positive gaps, got {len(gaps)}")
    _check_memory(memory, False, "shallow construction")
    cond = None
    if memory.kind == "finite":
        cond = gap_condition(m, gaps, memory.h)
        if not cond["holds"]:
            raise CompileError(f"gap condition violated: dmax - dmin = {cond['lhs']} is not below {cond['rhs']}")
    ws = shallow_weights(m, gaps, memory)
    hidden = SparseLayer(m, 1, tuple((k, 0, ws[k]) for k in range(m)))
    outw = SparseLayer(1, m, tuple((0, k, Fraction(2 ** (k + 1)) * (1 if k + 1 in out else -1)) for k in range(m)))
    net = Network((hidden, outw), memory, {"kind": "shallow", "params": {"m": m, "out": sorted(out)}, "ports": {"inputs": ["I"], "outputs": ["O"]}})
    st = stats(net)
    checks = [
        _arch_check("shallow", {"depth": 2, "neurons": m + 2, "weights": 2 * m}, st),
    ]
    if cond is not None:
        checks.append({"name": "gap-condition", "expected": {"rhs": cond["rhs"]}, "observed": {"lhs": cond["lhs"]}, "pass": cond["holds"]})
    return _report(net, checks, ["hidden-layer", "output"])


# ---------------------------------------------------------------------------
# dispatch and verification


def compile_spec(spec, memory: MemoryMode = INFINITE) -> CompileReport:
    return _component_network(spec, memory)


def verify_compiled(net: Network, spec, inputs: Iterable[Sequence], memories: Sequence[MemoryMode] = (INFINITE,), limit: int = 5) -> list:
    """Counterexamples (memory label, inputs, got, want), at most ``limit``."""
    bad = []
    for ins in inputs:
        want = eval_oracle(spec, ins)
        for mem in memories:
            got = simulate_network(net, ins, mem)[0]
            if tuple(got) != tuple(want):
                bad.append((mem.label, ins, got, want))
                if len(bad) >= limit:
                    return bad
    return bad
