"""Event-driven evaluation of the membrane-potential recursion.

For a unit with weights w and input trains I_1..I_d the potential is only
updated at input events t (the union of all input trains)::

    P(t) = ( 1{P(prev) <= 1} * P(prev) * exp(-(t - prev)/h) + sum_{j: t in I_j} w_j )_+

with P(0) = 0, and the unit spikes at t iff P(t) > 1.  Three numeric
backends are available:

``exact``
    Fractions/ints.  Used for h = 0 and h = inf, and whenever the caller
    supplies rational decay factors through a ``decay(prev, t)`` callable.
``decimal``
    Default for finite h.  Decay factors are evaluated with enough decimal
    digits that a contribution exp(-T/h) over the whole horizon T is still
    resolved next to the threshold.
``float``
    Double precision, strict comparisons, no epsilon.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .model import INFINITE, MemoryMode, Network
from .spikes import SpikeTrain, union, _trusted_train as _trusted

DecayFn = Callable[[Fraction, Fraction], object]

_LN10 = math.log(10)

# converted weight rows keyed by (layer id, backend, precision); the layer is
# stored alongside so a recycled id is detected
_ROWS: dict = {}
_INTEGRAL: dict = {}

# Finite(h) runs start at this precision and only escalate when a potential
# lands within GUARD of the threshold, where rounding could flip a decision
FAST_PREC = 60
GUARD_EXP = -45


class _Ambiguous(Exception):
    pass


class Arith:
    """Number system plus decay rule for one simulation run."""

    def __init__(
        self,
        memory: MemoryMode = INFINITE,
        numeric: Optional[str] = None,
        decay: Optional[DecayFn] = None,
        horizon=None,
        precision: Optional[int] = None,
    ):
        self.memory = memory
        self.custom = decay
        if decay is not None or memory.kind != "finite":
            numeric = "exact" if numeric in (None, "exact", "decimal") else numeric
        elif numeric is None:
            numeric = "decimal"
        if numeric not in ("exact", "decimal", "float"):
            raise ValueError(f"unknown numeric backend {numeric!r}")
        if numeric == "exact" and memory.kind == "finite" and decay is None:
            raise ValueError("finite memory is exact only with caller-supplied rational decay factors")
        self.numeric = numeric
        self._cache: dict = {}
        self._nums: dict = {}
        self._pairs: dict = {}
        self.ctx = None
        self.guard = None
        self.fallback: Optional["Arith"] = None
        if numeric == "decimal":
            if precision is None:
                span = float(horizon) if horizon else 1.0
                precision = 40 + int(math.ceil(span / float(memory.h) / _LN10))
            self.ctx = decimal.Context(prec=precision)
        if numeric == "float":
            self.zero, self.one = 0.0, 1.0
        elif numeric == "decimal":
            self.zero, self.one = self.ctx.create_decimal(0), self.ctx.create_decimal(1)
        else:
            self.zero, self.one = 0, 1

    def num(self, w):
        got = self._nums.get(w)
        if got is None:
            got = self._nums[w] = self._num(w)
        return got

    def rows(self, layer) -> list:
        """Incoming (input, converted weight) lists of a layer, cached per run."""
        key = (id(layer), self.numeric, self.ctx.prec if self.ctx is not None else None)
        got = _ROWS.get(key)
        if got is None or got[0] is not layer:
            if len(_ROWS) > 20_000:
                _ROWS.clear()
            got = _ROWS[key] = (layer, [[(i, self.num(w)) for i, w in inc] for inc in layer.incoming()])
        return got[1]

    def integral_rows(self, layer) -> list:
        """Per neuron: are all incoming weights integers (so weight sums are exact)?"""
        got = _INTEGRAL.get(id(layer))
        if got is None or got[0] is not layer:
            if len(_INTEGRAL) > 20_000:
                _INTEGRAL.clear()
            flags = [all(Fraction(w).denominator == 1 for _, w in inc) for inc in layer.incoming()]
            got = _INTEGRAL[id(layer)] = (layer, flags)
        return got[1]

    def factor_at(self, times, prev: int, t: int):
        """factor() for index-coded events; prev = -1 stands for time 0."""
        key = (prev, t)
        got = self._pairs.get(key)
        if got is None:
            got = self._pairs[key] = self.factor(times[prev] if prev >= 0 else Fraction(0), times[t])
        return got

    def _num(self, w):
        w = Fraction(w)
        if self.numeric == "float":
            return w.numerator / w.denominator
        if self.numeric == "decimal":
            return self.ctx.divide(self.ctx.create_decimal(w.numerator), self.ctx.create_decimal(w.denominator))
        return w.numerator if w.denominator == 1 else w

    def factor(self, prev: Fraction, t: Fraction):
        """Decay multiplier applied to P(prev) when moving to time t."""
        if self.custom is not None:
            return self.custom(prev, t)
        kind = self.memory.kind
        if kind == "infinite" or t == prev:
            return self.one
        if kind == "zero":
            return self.zero
        gap = t - prev
        got = self._cache.get(gap)
        if got is None:
            h = self.memory.h
            if self.numeric == "float":
                got = math.exp(-float(gap) / float(h))
            else:
                ctx = self.ctx
                if isinstance(h, float):
                    hd = ctx.create_decimal_from_float(h)
                else:
                    hd = ctx.divide(ctx.create_decimal(h.numerator), ctx.create_decimal(h.denominator))
                x = ctx.divide(ctx.create_decimal(gap.numerator), ctx.create_decimal(gap.denominator))
                got = ctx.exp(ctx.minus(ctx.divide(x, hd)))
            self._cache[gap] = got
        return got

    def add(self, a, b):
        return self.ctx.add(a, b) if self.ctx is not None else a + b

    def mul(self, a, b):
        return self.ctx.multiply(a, b) if self.ctx is not None else a * b


def factor_table(labels: Sequence, factors: Sequence) -> DecayFn:
    """Decay rule from explicit per-gap factors.

    ``factors[k]`` is the decay between ``labels[k-1]`` and ``labels[k]``
    (``factors[0]`` is unused).  The decay between two non-adjacent labels is
    the product of the factors in between, which is what exp(-gap/h) obeys.
    """
    labels = [Fraction(x) for x in labels]
    index = {t: k for k, t in enumerate(labels)}
    fs = [Fraction(f) for f in factors]
    prefix = [Fraction(1)]
    for f in fs[1:]:
        prefix.append(prefix[-1] * f)

    def decay(prev, t):
        if prev == 0:
            return Fraction(1)
        a, b = index[prev], index[t]
        if prefix[a] == 0:
            out = Fraction(1)
            for f in fs[a + 1 : b + 1]:
                out *= f
            return out
        return prefix[b] / prefix[a]

    return decay


def grid_decay(delta, c) -> DecayFn:
    """Decay c**k across a gap of k grid steps of width delta."""
    delta = Fraction(delta)

    def decay(prev, t):
        k = (Fraction(t) - Fraction(prev)) / delta
        if k.denominator != 1:
            raise ValueError(f"gap {t - prev} is not a multiple of the grid width {delta}")
        return c ** int(k)

    return decay


@dataclass(frozen=True)
class DecayStream:
    """Merged input events with per-gap decay factors."""

    events: tuple
    arity: int
    arith: Arith

    @property
    def labels(self) -> tuple:
        return tuple(e[0] for e in self.events)

    def __len__(self) -> int:
        return len(self.events)

    @classmethod
    def from_factors(cls, labels, factors, active, arity: Optional[int] = None) -> "DecayStream":
        """Exact stream with caller-supplied rational decay factors."""
        labels = [Fraction(x) for x in labels]
        act = [frozenset(a) for a in active]
        if arity is None:
            arity = 1 + max((max(a) for a in act if a), default=-1)
        arith = Arith(INFINITE, decay=factor_table(labels, factors))
        evs = tuple((t, Fraction(f), a) for t, f, a in zip(labels, factors, act))
        _check_events(evs)
        return cls(evs, arity, arith)


def _check_events(evs) -> None:
    for (a, _, _), (b, _, _) in zip(evs, evs[1:]):
        if not a < b:
            raise ValueError("event labels must be strictly increasing")
    for _, d, act in evs:
        if not act:
            raise ValueError("every event needs at least one active input")
        if not 0 <= d <= 1:
            raise ValueError("decay factors lie in [0, 1]")


def _horizon(inputs) -> Fraction:
    return max((tr[-1] for tr in inputs if len(tr)), default=Fraction(1))


def decay_stream(
    inputs: Sequence[Sequence],
    memory: MemoryMode = INFINITE,
    decay: Optional[DecayFn] = None,
    numeric: Optional[str] = None,
    arith: Optional[Arith] = None,
) -> DecayStream:
    """Merge the input trains into one event stream."""
    if arith is None:
        arith = Arith(memory, numeric, decay, horizon=_horizon(inputs))
    active: dict = {}
    for j, tr in enumerate(inputs):
        for t in tr:
            active.setdefault(Fraction(t), set()).add(j)
    evs = []
    prev = Fraction(0)
    for t in sorted(active):
        evs.append((t, arith.factor(prev, t), frozenset(active[t])))
        prev = t
    return DecayStream(tuple(evs), len(inputs), arith)


@dataclass(frozen=True)
class TraceRow:
    time: Fraction
    potential: object
    spiked: bool


def _recursion(times, sums, decays, arith: Arith):
    """Core recursion over prepared events; returns (spike times, trace rows)."""
    P = arith.zero
    one, zero = arith.one, arith.zero
    out = []
    rows = []
    ctx = arith.ctx
    for t, s, d in zip(times, sums, decays):
        if ctx is None:
            P = (P * d if P <= 1 else zero) + s
        else:
            P = ctx.add(ctx.multiply(P, d) if P <= one else zero, s)
        if P < 0:
            P = zero
        spk = P > one
        if spk:
            out.append(t)
        rows.append(TraceRow(t, P, spk))
    return out, rows


def simulate_unit(weights: Sequence, stream: DecayStream):
    """Run one unit over a decay stream; returns (output train, trace)."""
    if len(weights) != stream.arity:
        raise ValueError(f"{len(weights)} weights for {stream.arity} inputs")
    ar = stream.arith
    ws = [ar.num(w) for w in weights]
    sums = []
    for _, _, act in stream.events:
        s = ar.zero
        for j in act:
            s = ar.add(s, ws[j])
        sums.append(s)
    out, rows = _recursion(stream.labels, sums, [e[1] for e in stream.events], ar)
    return _trusted(out), tuple(rows)


def last_reset_index(trace: Sequence[TraceRow], r: int) -> int:
    """Largest event index i < r (1-based) with P(tau_i) outside (0, 1]; 0 if none."""
    for i in range(r - 1, 0, -1):
        p = trace[i - 1].potential
        if not (0 < p <= 1):
            return i
    return 0


def unfolded_potential(weights: Sequence, stream: DecayStream, r: int, j: int):
    """Closed-form potential at event r given the last reset event j < r."""
    n = len(stream.events)
    if not (1 <= r <= n) or not (0 <= j < r):
        raise IndexError(f"need 0 <= j < r <= {n}, got j={j}, r={r}")
    ar = stream.arith
    ws = [ar.num(w) for w in weights]
    total = ar.zero
    for k in range(j + 1, r + 1):
        _, _, act = stream.events[k - 1]
        s = ar.zero
        for l in act:
            s = ar.add(s, ws[l])
        prod = ar.one
        for i in range(k + 1, r + 1):
            prod = ar.mul(prod, stream.events[i - 1][1])
        total = ar.add(total, ar.mul(s, prod))
    return total if total > 0 else ar.zero


def _layer_outputs(layer, trains, times, arith: Arith, keep_trace: bool):
    """One layer on index-coded trains (positions into the sorted ``times``)."""
    if not keep_trace:
        return _layer_outputs_fast(layer, trains, times, arith), []
    outs = []
    traces = []
    union = sorted(set(t for tr in trains for t in tr))
    for inc in arith.rows(layer):
        acc: dict = {}
        for i, wv in inc:
            for t in trains[i]:
                if t in acc:
                    acc[t] = arith.add(acc[t], wv)
                else:
                    acc[t] = wv
        idx = union if keep_trace else sorted(acc)
        sums = [acc.get(t, arith.zero) for t in idx]
        decays = []
        prev = -1
        for t in idx:
            decays.append(arith.factor_at(times, prev, t))
            prev = t
        out, rows = _recursion(idx, sums, decays, arith)
        outs.append(out)
        if keep_trace:
            traces.append(tuple(TraceRow(times[r.time], r.potential, r.spiked) for r in rows))
    return outs, traces


def _layer_outputs_fast(layer, trains, times, arith: Arith) -> list:
    """Spike indices only; the same recursion as ``_recursion`` without trace rows.

    A neuron whose low-precision run comes too close to the threshold is
    rerun alone in ``arith.fallback``.
    """
    kind = arith.memory.kind if arith.custom is None else "custom"
    integral = arith.integral_rows(layer) if arith.guard is not None else None
    outs = []
    for k, inc in enumerate(arith.rows(layer)):
        try:
            outs.append(_neuron(inc, trains, times, arith, kind, integral and integral[k]))
        except _Ambiguous:
            full = arith.fallback
            outs.append(_neuron(full.rows(layer)[k], trains, times, full, kind, True))
    return outs


def _neuron(inc, trains, times, arith: Arith, kind: str, integral) -> list:
    ctx = arith.ctx
    zero, one = arith.zero, arith.one
    guard = arith.guard
    if len(inc) == 1:
        # one input: w > 1 fires on every spike, w <= 0 never fires, whatever the decay
        i, wv = inc[0]
        if wv <= zero:
            return []
        if wv > one and (guard is None or integral or wv - one >= guard):
            return list(trains[i])
    acc: dict = {}
    for i, wv in inc:
        for t in trains[i]:
            if t in acc:
                acc[t] = acc[t] + wv if ctx is None else ctx.add(acc[t], wv)
            else:
                acc[t] = wv
    if kind == "zero":
        return sorted(t for t, v in acc.items() if v > one)
    out = []
    P = zero
    if kind == "infinite":
        for t in sorted(acc):
            P = (P if P <= one else zero) + acc[t]
            if P < zero:
                P = zero
            elif P > one:
                out.append(t)
        return out
    prev = -1
    pairs = arith._pairs
    carried = False
    for t in sorted(acc):
        if zero < P <= one:
            d = pairs.get((prev, t))
            if d is None:
                d = arith.factor_at(times, prev, t)
            if ctx is None:
                P = P * d + acc[t]
            else:
                x = ctx.multiply(P, d)
                carried = bool(x)
                P = ctx.add(x, acc[t])
        else:
            # nothing carried: P was clamped to zero or just spiked
            P = acc[t]
            carried = False
        prev = t
        # only a rounded value near the threshold is in doubt; integer weight
        # sums with nothing carried over are exact
        if guard is not None and (carried or not integral) and -guard < P - one < guard:
            raise _Ambiguous
        if P < zero:
            P = zero
        elif P > one:
            out.append(t)
    return out


def simulate_network(
    net: Network,
    inputs: Sequence[Sequence],
    override_memory: Optional[MemoryMode] = None,
    *,
    decay: Optional[DecayFn] = None,
    numeric: Optional[str] = None,
    trace: bool = False,
    all_layers: bool = False,
):
    """Evaluate the network layer by layer.

    Each neuron only visits the events where one of its weighted inputs
    fires.  Events carrying zero total weight leave the recursion unchanged
    up to the decay product, so this equals the layer-union recursion; with
    ``trace=True`` the full layer union is visited and recorded.

    Returns the output trains, or ``(outputs, traces)`` when ``trace`` is set
    (traces[layer][neuron] is a tuple of rows), or the list of every layer's
    trains when ``all_layers`` is set.
    """
    if len(inputs) != net.n_inputs:
        raise ValueError(f"network has {net.n_inputs} inputs, got {len(inputs)} trains")
    memory = override_memory or net.memory
    trains = [tr if isinstance(tr, SpikeTrain) else SpikeTrain(tr) for tr in inputs]
    horizon = _horizon(trains)
    arith = Arith(memory, numeric, decay, horizon=horizon)
    if not trace and arith.ctx is not None and arith.ctx.prec > FAST_PREC:
        fast = Arith(memory, numeric, decay, precision=FAST_PREC)
        fast.guard = fast.ctx.create_decimal(1).scaleb(GUARD_EXP)
        fast.fallback = arith
        arith = fast
    return _network_pass(net, trains, arith, trace, all_layers)


def _network_pass(net: Network, trains: list, arith: Arith, trace: bool, all_layers: bool):
    # every layer output is dominated by the input union, so index into it once
    times = union(*trains)
    pos = {(t.numerator, t.denominator): k for k, t in enumerate(times)}
    coded = [[pos[t.numerator, t.denominator] for t in tr] for tr in trains]

    def decode(cs):
        return [_trusted(tuple(times[k] for k in c)) for c in cs]

    layers_out = [trains]
    all_traces = []
    for layer in net.layers:
        coded, tr = _layer_outputs(layer, coded, times, arith, trace)
        if all_layers:
            layers_out.append(decode(coded))
        all_traces.append(tr)
    if all_layers:
        return layers_out
    outs = decode(coded)
    if trace:
        return outs, all_traces
    return outs


def trace_csv(traces) -> str:
    """Render traces as ``layer,neuron,event_time,potential,spiked`` CSV."""
    lines = ["layer,neuron,event_time,potential,spiked"]
    for li, layer in enumerate(traces, start=1):
        for ni, rows in enumerate(layer):
            for row in rows:
                lines.append(f"{li},{ni},{_num_str(row.time)},{_num_str(row.potential)},{int(row.spiked)}")
    return "\n".join(lines) + "\n"


def _num_str(x) -> str:
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, decimal.Decimal):
        return format(+x.normalize(decimal.Context(prec=17)), "f") if x else "0"
    return repr(x)
