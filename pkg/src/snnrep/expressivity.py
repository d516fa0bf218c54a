"""Counting machinery, bound formulas and small necessity/impossibility checks.

All checks return :class:`Report` objects whose JSON form has the fields
``claim, instance, bound, observed, pass``.
"""

from __future__ import annotations

import decimal
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .model import INFINITE, MemoryMode, Network, SparseLayer
from .simulator import decay_stream, factor_table, simulate_network, simulate_unit
from .spikes import SpikeTrain


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Report:
    claim: str
    instance: dict
    bound: object
    observed: object
    passed: bool

    def to_json(self) -> dict:
        return {
            "claim": self.claim,
            "instance": _plain(self.instance),
            "bound": _plain(self.bound),
            "observed": _plain(self.observed),
            "pass": bool(self.passed),
        }


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_plain(v) for v in x]
    if isinstance(x, (Fraction, decimal.Decimal)):
        return str(x)
    return x


# ---------------------------------------------------------------------------
# formulas


def unit_count_upper(d: int, H: int) -> float:
    return (8 * math.e * H) ** d


def network_count_upper(s: int, T_sum: int) -> float:
    return (8 * math.e * s * s * T_sum) ** s


def architecture_admissible(widths: Sequence[int], s: int) -> bool:
    """The expressivity bound needs s >= sum of max(p_{l-1}, p_l)."""
    return s >= sum(max(a, b) for a, b in zip(widths, widths[1:]))


def _log2_exact(n: int):
    """log2(n) as an int when n is a power of two, else a float."""
    if n >= 1 and n & (n - 1) == 0:
        return n.bit_length() - 1
    return math.log2(n)


def neuron_lower_bound(s) -> float:
    """Networks with depth >= 3 and s weights need more than sqrt(2s) neurons."""
    return math.sqrt(2 * s)


def lower_bound_params(cls: str, m: int, r: int, d: int = 1) -> dict:
    """Weight lower bound for the class, exact whenever the logarithm is."""
    if m < 1 or r < 0 or d < 1:
        raise ValueError("need m >= 1, r >= 0, d >= 1")
    if cls in ("fin", "per"):
        lg = _log2_exact(m + 1)
        s = Fraction(r, 5 * lg) if isinstance(lg, int) else r / (5 * lg)
    elif cls == "mm":
        s = Fraction(min(r, (2**d - 1) ** m), 5 * m * d)
    else:
        raise ValueError(f"unknown class {cls!r}")
    return {"s": s, "neurons_gt": neuron_lower_bound(s)}


def count_target_functions(cls: str, m: int, r: int, d: int = 1) -> int:
    """Exact class size for fin/per, and the counting lower bound for mm."""
    if cls in ("fin", "per"):
        return sum(math.comb(m, k) for k in range(0, min(r, m) + 1))
    if cls == "mm":
        return 2 ** min(r, (2**d - 1) ** m)
    raise ValueError(f"unknown class {cls!r}")


# ---------------------------------------------------------------------------
# potential vectors


def _decay_values(memory: MemoryMode, ctx):
    if memory.kind == "infinite":
        return lambda gap: Fraction(1)
    if memory.kind == "zero":
        return lambda gap: Fraction(1) if gap == 0 else Fraction(0)
    h = ctx.divide(ctx.create_decimal(memory.h.numerator), ctx.create_decimal(memory.h.denominator))

    def f(gap):
        x = ctx.divide(ctx.create_decimal(gap.numerator), ctx.create_decimal(gap.denominator))
        return ctx.exp(ctx.minus(ctx.divide(x, h)))

    return f


def potential_vectors(inputs: Iterable[Sequence], memory: MemoryMode = INFINITE, precision: int = 50) -> set:
    """All window vectors p^[r,t] over spike-time pairs r <= t of each tuple's union.

    Coordinates are Fractions for infinite or zero memory and Decimals
    (``precision`` digits) for finite memory.
    """
    ctx = decimal.Context(prec=precision)
    dec = _decay_values(memory, ctx)
    out = set()
    for tup in inputs:
        trains = [SpikeTrain(tr) for tr in tup]
        U = sorted(set(t for tr in trains for t in tr))
        for a, r in enumerate(U):
            for t in U[a:]:
                vec = []
                for tr in trains:
                    acc = Fraction(0) if memory.kind != "finite" else ctx.create_decimal(0)
                    for tau in tr:
                        if r <= tau <= t:
                            acc = acc + dec(t - tau)
                    vec.append(acc)
                out.add(tuple(vec))
    return out


def _chi(x) -> int:
    return 1 if x > 1 else (-1 if x <= 0 else 0)


# ---------------------------------------------------------------------------
# unit function census


def _to_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _witnesses_1d(P: set) -> list:
    cuts = {Fraction(0)}
    for (p,) in P:
        p = _to_fraction(p)
        if p > 0:
            cuts.add(1 / p)
    cuts = sorted(cuts)
    pts = [cuts[0] - 1, cuts[-1] + 1] + cuts
    pts += [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
    return [(w,) for w in pts]


def _witnesses_2d(P: set) -> list:
    lines = set()
    for p in P:
        a = tuple(_to_fraction(x) for x in p)
        if a == (0, 0):
            continue
        for c in (Fraction(0), Fraction(1)):
            # normalize so that the line has a unique key
            k = a[0] if a[0] != 0 else a[1]
            lines.add((a[0] / k, a[1] / k, c / k))
    if not lines:
        return [(Fraction(0), Fraction(0))]
    lines = sorted(lines)

    def val(line, x):
        return line[0] * x[0] + line[1] * x[1] - line[2]

    verts = set()
    for l1, l2 in itertools.combinations(lines, 2):
        det = l1[0] * l2[1] - l1[1] * l2[0]
        if det == 0:
            continue
        x = (l1[2] * l2[1] - l1[1] * l2[2]) / det
        y = (l1[0] * l2[2] - l1[2] * l2[0]) / det
        verts.add((x, y))

    def eps_at(x, through):
        gaps = [abs(val(l, x)) / (abs(l[0]) + abs(l[1])) for l in lines if l not in through]
        return min(gaps) / 4 if gaps else Fraction(1)

    pts = []
    on_vertex = set()
    for v in verts:
        through = [l for l in lines if val(l, v) == 0]
        on_vertex.update(through)
        e = eps_at(v, through)
        dirs = []
        for l in through:
            d = (-l[1], l[0])
            n = abs(d[0]) + abs(d[1])
            dirs += [(d[0] / n, d[1] / n), (-d[0] / n, -d[1] / n)]
        dirs.sort(key=lambda u: math.atan2(u[1], u[0]))
        pts.append(v)
        for i, u in enumerate(dirs):
            u2 = dirs[(i + 1) % len(dirs)]
            for w in (u, (u[0] + u2[0], u[1] + u2[1])):
                pts.append((v[0] + e * w[0], v[1] + e * w[1]))
    for l in lines:
        if l in on_vertex:
            continue
        x0 = (l[2] / l[0], Fraction(0)) if l[0] != 0 else (Fraction(0), l[2] / l[1])
        e = eps_at(x0, [l])
        n = abs(l[0]) + abs(l[1])
        pts.append(x0)
        pts.append((x0[0] + e * l[0] / n, x0[1] + e * l[1] / n))
        pts.append((x0[0] - e * l[0] / n, x0[1] - e * l[1] / n))
    return pts


def enumerate_unit_functions(d: int, inputs: Sequence[Sequence], memory: MemoryMode = INFINITE, budget: int = 200_000) -> dict:
    """Distinct input-to-output maps of one unit, one witness weight per sign cell."""
    if d not in (1, 2):
        raise ValueError("unit census supports d = 1 or d = 2")
    inputs = [tuple(SpikeTrain(tr) for tr in tup) for tup in inputs]
    for tup in inputs:
        if len(tup) != d:
            raise ValueError(f"expected {d}-tuples of trains")
    P = potential_vectors(inputs, memory)
    if memory.kind == "finite":
        # witnesses come from rounded coordinates; the sign census below uses the decimal values
        Pw = {tuple(Fraction(x) for x in p) for p in P}
    else:
        Pw = P
    pts = _witnesses_1d(Pw) if d == 1 else _witnesses_2d(Pw)
    if len(pts) * max(1, len(inputs)) > budget:
        raise BudgetExceeded(f"{len(pts)} witnesses over {len(inputs)} inputs exceeds budget {budget}")
    Plist = sorted(P)
    cells: dict = {}
    for w in pts:
        sig = tuple(_chi(sum(_mix(wi, pi) for wi, pi in zip(w, p))) for p in Plist)
        cells.setdefault(sig, w)
    funcs: dict = {}
    for sig, w in cells.items():
        outs = []
        for tup in inputs:
            stream = decay_stream(tup, memory)
            outs.append(simulate_unit(list(w), stream)[0])
        funcs.setdefault(tuple(outs), w)
    return {
        "count": len(funcs),
        "H": len(P),
        "cells": len(cells),
        "bound": unit_count_upper(d, len(P)),
        "witnesses": list(funcs.values()),
        "functions": list(funcs.keys()),
    }


def _mix(w: Fraction, p):
    if isinstance(p, decimal.Decimal):
        return decimal.Decimal(w.numerator) / decimal.Decimal(w.denominator) * p
    return w * p


def network_grid_count(widths: Sequence[int], grid: Sequence, inputs: Sequence[Sequence], memory: MemoryMode = INFINITE, budget: int = 200_000) -> dict:
    """Distinct input-to-output maps over a dense weight grid for one architecture."""
    widths = tuple(widths)
    D = sum(a * b for a, b in zip(widths, widths[1:]))
    grid = [Fraction(g) for g in grid]
    total = len(grid) ** D
    if total > budget:
        raise BudgetExceeded(f"{total} weight assignments exceed budget {budget}")
    T_sum = sum((len(set(t for tr in tup for t in tr)) + 1) ** 2 for tup in inputs)
    seen = set()
    for ws in itertools.product(grid, repeat=D):
        layers = []
        k = 0
        for a, b in zip(widths, widths[1:]):
            ents = []
            for o in range(b):
                for i in range(a):
                    ents.append((o, i, ws[k]))
                    k += 1
            layers.append(SparseLayer(b, a, tuple(ents)))
        net = Network(tuple(layers), memory)
        seen.add(tuple(tuple(simulate_network(net, tup)) for tup in inputs))
    s = D
    return {
        "count": len(seen),
        "s": s,
        "T_sum": T_sum,
        "admissible": architecture_admissible(widths, s),
        "bound": network_count_upper(s, T_sum),
    }


# ---------------------------------------------------------------------------
# shallow networks and negative weights on the three-spike instance

LABELS = (Fraction(1), Fraction(2), Fraction(3))


def three_spike_instance(phi1) -> dict:
    """Decay factors of the three-spike input; phi2 = phi1 / (1 + phi1) exactly."""
    phi1 = Fraction(phi1)
    if not 0 < phi1 < 1:
        raise ValueError("phi1 must lie in (0, 1)")
    phi2 = phi1 / (1 + phi1)
    return {"labels": LABELS, "factors": (Fraction(1), phi1, phi2), "phi1": phi1, "phi2": phi2}


def _run(net: Network, trains, inst) -> tuple:
    decay = factor_table(inst["labels"], inst["factors"])
    return tuple(simulate_network(net, trains, decay=decay))


def _single_unit(weights, trains, inst) -> SpikeTrain:
    layer = SparseLayer(1, len(weights), tuple((0, i, w) for i, w in enumerate(weights)))
    return _run(Network((layer,)), trains, inst)[0]


def unit_on_labels(weights, trains, inst) -> tuple:
    """Direct recursion of one unit on the three-label instance.

    Labels where no weighted input fires are processed with zero input,
    which matches skipping them (the decay factors multiply along the way).
    """
    P = Fraction(0)
    out = []
    for k, t in enumerate(inst["labels"]):
        s = sum((w for w, tr in zip(weights, trains) if t in tr), Fraction(0))
        carry = P * inst["factors"][k] if (k > 0 and P <= 1) else Fraction(0)
        P = max(carry + s, Fraction(0))
        if P > 1:
            out.append(t)
    return tuple(out)


def hidden_trichotomy(phi1, extra: Sequence = ()) -> Report:
    """Every single hidden neuron fed by the three-spike input lands in one of three trains."""
    inst = three_spike_instance(phi1)
    lo = 1 / (1 + inst["phi1"])
    cuts = sorted({Fraction(0), lo, Fraction(1)})
    sweep = set(cuts) | {(a + b) / 2 for a, b in zip(cuts, cuts[1:])} | {Fraction(-1), Fraction(2), Fraction(3)}
    sweep |= {Fraction(x) for x in extra}
    I = SpikeTrain(LABELS)
    allowed = {(), (LABELS[1],), LABELS}
    bad = []
    for w in sorted(sweep):
        got = tuple(_single_unit([w], [I], inst))
        want = LABELS if w > 1 else ((LABELS[1],) if w > lo else ())
        if got not in allowed or got != want:
            bad.append({"w": w, "train": got})
    return Report(
        "hidden neuron trains lie in {empty, {t2}, {t1,t2,t3}} with thresholds 1/(1+phi1) and 1",
        {"phi1": inst["phi1"], "phi2": inst["phi2"], "weights_tested": len(sweep)},
        {"thresholds": [lo, Fraction(1)]},
        {"violations": bad},
        not bad,
    )


def few_negative_search(phi1, max_negative: int = 1, depth: int = 3, width: int = 3, wmax: int = 3, budget: int = 2_000_000) -> dict:
    """Search integer networks with few negative weights mapping the input onto {t1}.

    The search works layer by layer over the set of reachable hidden trains,
    which is exact because a neuron's train depends only on its inputs'
    trains and weights.  Returns the witnesses found (expected empty when
    max_negative <= 1) plus bookkeeping.
    """
    inst = three_spike_instance(phi1)
    I = SpikeTrain(LABELS)
    target = (LABELS[0],)
    weights = range(-wmax, wmax + 1)
    evals = [0]
    cache: dict = {}

    def neuron_options(state: tuple, neg_left: int) -> set:
        key = (state, neg_left)
        if key in cache:
            return cache[key]
        opts = set()
        for ws in itertools.product(weights, repeat=len(state)):
            neg = sum(1 for w in ws if w < 0)
            if neg > neg_left:
                continue
            evals[0] += 1
            if evals[0] > budget:
                raise BudgetExceeded(f"search budget {budget} exhausted")
            tr = unit_on_labels(ws, state, inst)
            opts.add((tr, neg))
        cache[key] = opts
        return opts

    witnesses = []
    frontier = {((tuple(I),), 0)}
    for layer in range(1, depth + 1):
        nxt = set()
        for state, used in frontier:
            opts = sorted(neuron_options(state, max_negative - used))
            # output layer: a single neuron
            for tr, neg in opts:
                if tr == target:
                    witnesses.append({"depth": layer, "inputs": state, "negatives": used + neg})
            if layer == depth:
                continue
            for k in range(1, width + 1):
                for combo in itertools.combinations_with_replacement(opts, k):
                    neg = used + sum(n for _, n in combo)
                    if neg <= max_negative:
                        nxt.add((tuple(sorted(t for t, _ in combo)), neg))
        frontier = nxt
    return {
        "witnesses": witnesses,
        "evaluations": evals[0],
        "budget": {"depth": depth, "width": width, "weights": [-wmax, wmax], "max_negative": max_negative},
    }


def shallow_counterexample_check(phi1=Fraction(1, 2), search: bool = True) -> list:
    """Trichotomy, the few-negative-weights search, and a deep network that does realize {t1}."""
    from .compiler import compile_single_input
    from .oracle import FiniteSpec

    inst = three_spike_instance(phi1)
    reports = [hidden_trichotomy(phi1)]
    if search:
        res = few_negative_search(phi1)
        reports.append(
            Report(
                "no integer network with at most one negative weight maps the input onto {t1}",
                {"phi1": inst["phi1"], **res["budget"]},
                {"witnesses": 0},
                {"witnesses": len(res["witnesses"]), "evaluations": res["evaluations"]},
                not res["witnesses"],
            )
        )
    rep = compile_single_input(FiniteSpec(3, frozenset({1})))
    got = _run(rep.network, [SpikeTrain(LABELS)], inst)[0]
    reports.append(
        Report(
            "the single-input construction (several negative weights) realizes {t1}",
            {"phi1": inst["phi1"], "negative_weights": rep.stats.negative_weights},
            {"output": [LABELS[0]]},
            {"output": list(got)},
            tuple(got) == (LABELS[0],),
        )
    )
    return reports


# ---------------------------------------------------------------------------
# integer vs real weights


def _separation_instances(rng: random.Random, n: int) -> list:
    out = []
    for _ in range(n):
        gaps = [Fraction(rng.randint(1, 40), rng.randint(1, 8)) for _ in range(4)]
        S = list(itertools.accumulate(gaps))
        out.append((SpikeTrain(S[:3]), SpikeTrain(S[2:])))
    return out


def integer_real_separation_check(samples: int = 30, seed: int = 0, wrange: int = 5, memories: Optional[Sequence[MemoryMode]] = None) -> list:
    """Real weights (1/2, 1) pick out the third spike of I; no integer pair in the sweep does."""
    rng = random.Random(seed)
    memories = list(memories or [INFINITE, MemoryMode.finite(1), MemoryMode.finite(Fraction(1, 10)), MemoryMode.finite(7)])
    insts = _separation_instances(rng, samples)

    def realizes(w, mem):
        layer = SparseLayer(1, 2, ((0, 0, w[0]), (0, 1, w[1])))
        net = Network((layer,), mem)
        for I, J in insts:
            if tuple(simulate_network(net, [I, J])[0]) != (I[2],):
                return False
        return True

    real_ok = {m.label: realizes((Fraction(1, 2), Fraction(1)), m) for m in memories}
    winners = []
    reasons: dict = {}
    for v in itertools.product(range(-wrange, wrange + 1), repeat=2):
        for mem in memories:
            if realizes(v, mem):
                winners.append({"v": v, "memory": mem.label})
        reasons[v] = _integer_failure(v)
    return [
        Report(
            "weights (1/2, 1) output exactly the third spike of I",
            {"samples": samples, "seed": seed, "memories": list(real_ok)},
            {"all": True},
            real_ok,
            all(real_ok.values()),
        ),
        Report(
            "no integer weight pair realizes the third-spike function",
            {"range": [-wrange, wrange], "samples": samples, "memories": list(real_ok)},
            {"winners": 0},
            {"winners": winners, "failure_steps": _reason_histogram(reasons)},
            not winners,
        ),
    ]


def _integer_failure(v) -> str:
    """Which step of the contradiction chain rules out the integer pair v."""
    v1, v2 = v
    if v1 > 1:
        return "spike at S1 (v1 > 1)"
    if v1 == 1:
        return "spike at S2 (v1 = 1)"
    if v1 + v2 <= 1 and not v2 > 1:
        return "no spike at S3 (v1 <= 0 forces v2 > 1)"
    return "spike at S4 (v2 > 1)"


def _reason_histogram(reasons: dict) -> dict:
    out: dict = {}
    for r in reasons.values():
        out[r] = out.get(r, 0) + 1
    return out
