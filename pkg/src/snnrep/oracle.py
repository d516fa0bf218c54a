"""Target-function specifications and their brute-force evaluation.

Everything here works directly on spike-time sets; nothing is simulated.
These are the reference semantics the compiled networks are checked
against, so they are written to mirror the set formulas as literally as
possible rather than efficiently.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Sequence

from .spikes import EMPTY, MonotoneMap, SpikeTrain, apply_monotone, difference, incidence, intersection, union
from .spikes import _trusted_train as _T


class SpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# gadget definitions


def skip(I):
    return (SpikeTrain(I),)


def or_(*trains):
    return (union(*trains),)


def and_(*trains):
    s = set(trains[0])
    for tr in trains[1:]:
        s &= set(tr)
    return (SpikeTrain(sorted(s)),)


def minus(I, J):
    return (difference(I, J),)


def xor(I, J):
    return (union(difference(I, J), difference(J, I)),)


def is_equal(I, J, D):
    a = intersection(intersection(I, J), D)
    b = intersection(difference(D, I), difference(D, J))
    return (union(a, b),)


def translate(T, S, C, check: bool = True):
    """Output S_(j) whenever exactly one T spike lies in (S_(j-1), S_(j))."""
    if check:
        _check_translate(T, S, C)
    out = []
    prev = Fraction(0)
    for s in S:
        if sum(1 for t in T if prev < t < s) == 1:
            out.append(s)
        prev = s
    return (SpikeTrain(out),)


def translate_valid(T, S, C) -> bool:
    try:
        _check_translate(T, S, C)
    except SpecError:
        return False
    return True


def _count(T, lo, hi) -> int:
    return sum(1 for t in T if lo < t < hi)


def _check_translate(T, S, C) -> None:
    """Interleaving preconditions of the translation unit on a finite prefix.

    S and C alternate; an interval ending at an S spike holds at most one T
    spike and one ending at a C spike holds none.  The open tail after the
    last S/C spike is held to the rule of the spike that would come next, so
    a valid prefix always extends to a valid infinite input.
    """
    if set(T) & set(S) or set(T) & set(C) or set(S) & set(C):
        raise SpecError("TRANSLATE inputs must be pairwise disjoint")
    merged = sorted([(t, "S") for t in S] + [(t, "C") for t in C])
    for (_, g), (_, h) in zip(merged, merged[1:]):
        if g == h:
            raise SpecError("S and C spikes must alternate")
    prev = Fraction(0)
    seen = {"S": 0, "C": 0}
    for t, g in merged:
        seen[g] += 1
        n = _count(T, prev, t)
        if g == "S" and n > 1:
            raise SpecError(f"more than one T spike before S_({seen[g]})")
        if g == "C" and n:
            raise SpecError(f"T spike before C_({seen[g]})")
        prev = t
    tail = sum(1 for t in T if t > prev)
    nxt = "S" if not merged or merged[-1][1] == "C" else "C"
    if tail > (1 if nxt == "S" else 0):
        raise SpecError(f"T spikes after the last S/C spike cannot precede a valid {nxt} spike")


def odd_even(I):
    return (SpikeTrain(I[0::2]), SpikeTrain(I[1::2]))


def clock(m: int):
    if m < 1 or m & (m - 1):
        raise SpecError(f"CLOCK needs a power of two, got {m}")

    def f(I):
        return tuple(SpikeTrain(I[j::m]) for j in range(m))

    return f


def spike(m: int):
    def f(I):
        return (SpikeTrain([I[m - 1]]) if len(I) >= m else EMPTY,)

    return f


def represent(r: Sequence[int]):
    r = tuple(r)

    def f(I):
        return (SpikeTrain(I[k] for k in range(min(len(r), len(I))) if r[k]),)

    return f


def ceil(m: int):
    """D_(n) is emitted when (D_(n-1), D_(n)] holds at least m spikes of I."""

    def f(I, D):
        out = []
        prev = Fraction(0)
        for d in D:
            if sum(1 for t in I if prev < t <= d) >= m:
                out.append(d)
            prev = d
        return (SpikeTrain(out),)

    return f


def is_approx_equal(m: int):
    def f(I, J, D):
        hs = [is_equal(ceil(k)(I, D)[0], ceil(k)(J, D)[0], D)[0] for k in range(1, m + 1)]
        return and_(*hs)

    return f


def _delay(I, D, m: int) -> SpikeTrain:
    J = union(I, D)
    sI = set(I)
    return SpikeTrain(J[n + m - 1] for n in range(len(J)) if J[n] in sI and n + m - 1 < len(J))


def delay(m: int):
    def f(I, D):
        return (_delay(I, D, m),)

    return f


def repeat(m: int):
    def f(I, D):
        return (union(*(_delay(I, D, k) for k in range(1, m + 2))),)

    return f


def if_then(r: Sequence[int]):
    r = tuple(r)
    m = len(r)

    def f(I, D):
        ID = ceil(1)(I, D)[0]
        R = represent(r)(D)[0]
        F = represent((1,) * m)(D)[0]
        return spike(m)(is_equal(ID, R, F)[0])

    return f


def memory(d: int, m: int):
    def f(*trains):
        if len(trains) != d:
            raise SpecError(f"MEMORY expects {d} inputs")
        U = union(*trains)
        return tuple(_delay(trains[i], U, j) for i in range(d) for j in range(1, m + 1))

    return f


def gadget_function(kind: str, **params) -> Callable:
    """Reference semantics of a named gadget as a callable on trains."""
    kind = kind.upper()
    m = params.get("m")
    if kind == "SKIP":
        return skip
    if kind in ("OR", "AND"):
        return or_ if kind == "OR" else and_
    if kind == "MINUS":
        return minus
    if kind == "XOR":
        return xor
    if kind == "IS_EQUAL":
        return is_equal
    if kind == "TRANSLATE":
        return translate
    if kind == "ODD_EVEN":
        return odd_even
    if kind == "CLOCK":
        return clock(m)
    if kind == "SPIKE":
        return spike(m)
    if kind == "REPRESENT":
        return represent(params["r"])
    if kind == "CEIL":
        return ceil(m)
    if kind == "IS_APPROX_EQUAL":
        return is_approx_equal(m)
    if kind == "DELAY":
        return delay(m)
    if kind == "REPEAT":
        return repeat(m)
    if kind == "IF_THEN":
        return if_then(params["r"])
    if kind == "MEMORY":
        return memory(params["d"], m)
    raise SpecError(f"unknown gadget kind {kind!r}")


# ---------------------------------------------------------------------------
# function specifications


def _bits(v) -> tuple:
    return tuple(int(b) for b in v)


@dataclass(frozen=True)
class FiniteSpec:
    m: int
    out: frozenset

    arity = 1
    kind = "finite"

    def __post_init__(self):
        _validate_positions(self.m, self.out)
        object.__setattr__(self, "out", frozenset(self.out))

    @property
    def r(self) -> int:
        return len(self.out)


@dataclass(frozen=True)
class PeriodicSpec:
    m: int
    out: frozenset

    arity = 1
    kind = "periodic"

    def __post_init__(self):
        _validate_positions(self.m, self.out)
        object.__setattr__(self, "out", frozenset(self.out))

    @property
    def r(self) -> int:
        return len(self.out)


def _validate_positions(m, out) -> None:
    if not isinstance(m, int) or m < 1:
        raise SpecError(f"m must be a positive integer, got {m!r}")
    for k in out:
        if not isinstance(k, int) or not 1 <= k <= m:
            raise SpecError(f"output position {k!r} outside 1..{m}")


@dataclass(frozen=True)
class MarkovianSpec:
    """Accepted windows, each a tuple of d-bit step vectors listed oldest first."""

    d: int
    m: int
    accepted: frozenset

    kind = "markovian"

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise SpecError("need d >= 1 and m >= 1")
        clean = set()
        for pat in self.accepted:
            pat = tuple(_bits(v) for v in pat)
            if not 1 <= len(pat) <= self.m:
                raise SpecError(f"pattern length {len(pat)} outside 1..{self.m}")
            for v in pat:
                if len(v) != self.d or any(b not in (0, 1) for b in v):
                    raise SpecError(f"step vector {v} is not a {self.d}-bit vector")
                if not any(v):
                    raise SpecError("step vectors must be nonzero (the union covers every step)")
            clean.add(pat)
        object.__setattr__(self, "accepted", frozenset(clean))

    @property
    def arity(self) -> int:
        return self.d

    @property
    def r(self) -> int:
        return len(self.accepted)


@dataclass(frozen=True)
class ClassifierSpec:
    """Inputs (I, D); patterns are m-bit tuples, position 1 being the oldest."""

    m: int
    patterns: frozenset

    arity = 2
    kind = "classifier"

    def __post_init__(self):
        if self.m < 1:
            raise SpecError("classifier window must be positive")
        clean = set()
        for p in self.patterns:
            p = _bits(p)
            if len(p) != self.m or any(b not in (0, 1) for b in p):
                raise SpecError(f"pattern {p} is not an {self.m}-bit vector")
            clean.add(p)
        object.__setattr__(self, "patterns", frozenset(clean))

    @property
    def r(self) -> int:
        return len(self.patterns)


@dataclass(frozen=True)
class Component:
    spec: object
    inputs: tuple


@dataclass(frozen=True)
class CompositionalSpec:
    """Layers of components; each component reads the previous layer's outputs.

    The first layer reads the external inputs.  The last layer has a single
    component.
    """

    layers: tuple
    n_inputs: int
    warnings: tuple = field(default=(), compare=False)

    kind = "compositional"

    def __post_init__(self):
        layers = tuple(tuple(Component(c.spec, tuple(c.inputs)) for c in layer) for layer in self.layers)
        if not layers or any(not l for l in layers):
            raise SpecError("a composition needs nonempty layers")
        width = self.n_inputs
        warns = []
        for li, layer in enumerate(layers, start=1):
            for ci, comp in enumerate(layer):
                if len(comp.inputs) != comp.spec.arity:
                    raise SpecError(
                        f"layer {li} component {ci}: {comp.spec.kind} takes {comp.spec.arity} inputs, wired {len(comp.inputs)}"
                    )
                for i in comp.inputs:
                    if not 0 <= i < width:
                        raise SpecError(f"layer {li} component {ci}: input index {i} outside 0..{width - 1}")
                if isinstance(comp.spec, MarkovianSpec):
                    for i in unused_inputs(comp.spec):
                        warns.append(f"layer {li} component {ci}: input {i} never influences the output")
            width = len(layer)
        if len(layers[-1]) != 1:
            raise SpecError("the last layer must have exactly one component")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "warnings", tuple(warns))

    @property
    def arity(self) -> int:
        return self.n_inputs

    @property
    def r(self) -> int:
        return sum(c.spec.r for layer in self.layers for c in layer)


def all_patterns(d: int, m: int):
    """Every window of length 1..m over nonzero d-bit vectors, oldest first."""
    vecs = [v for v in itertools.product((0, 1), repeat=d) if any(v)]
    for length in range(1, m + 1):
        yield from itertools.product(vecs, repeat=length)


def unused_inputs(spec: MarkovianSpec) -> list:
    """Inputs whose bits never change the accept decision."""
    if spec.d < 2:
        return []
    out = []
    for i in range(spec.d):
        relevant = False
        for pat in all_patterns(spec.d, spec.m):
            for s in range(len(pat)):
                v = list(pat[s])
                v[i] ^= 1
                if not any(v):
                    continue
                flipped = pat[:s] + (tuple(v),) + pat[s + 1 :]
                if (pat in spec.accepted) != (flipped in spec.accepted):
                    relevant = True
                    break
            if relevant:
                break
        if not relevant:
            out.append(i)
    return out


def boolean_spec(d: int, table) -> MarkovianSpec:
    """1-Markovian spec from a Boolean table (set of accepted nonzero d-bit vectors)."""
    return MarkovianSpec(d, 1, frozenset(((tuple(v),) for v in table)))


# ---------------------------------------------------------------------------
# evaluation


def eval_oracle(spec, inputs: Sequence) -> SpikeTrain:
    inputs = [SpikeTrain(tr) if not isinstance(tr, SpikeTrain) else tr for tr in inputs]
    if len(inputs) != spec.arity:
        raise SpecError(f"{spec.kind} spec takes {spec.arity} inputs, got {len(inputs)}")
    if isinstance(spec, FiniteSpec):
        (I,) = inputs
        return SpikeTrain(I[k - 1] for k in sorted(spec.out) if k <= len(I))
    if isinstance(spec, PeriodicSpec):
        (I,) = inputs
        return SpikeTrain(t for n, t in enumerate(I, start=1) if ((n - 1) % spec.m) + 1 in spec.out)
    if isinstance(spec, MarkovianSpec):
        U = union(*inputs)
        cols = incidence(U, inputs)
        out = []
        for n in range(1, len(U) + 1):
            w = min(n, spec.m)
            if tuple(cols[n - w : n]) in spec.accepted:
                out.append(U[n - 1])
        return SpikeTrain(out)
    if isinstance(spec, ClassifierSpec):
        I, D = inputs
        ID = set(ceil(1)(I, D)[0])
        out = []
        for n in range(spec.m, len(D) + 1):
            pat = tuple(int(D[n - spec.m + i - 1] in ID) for i in range(1, spec.m + 1))
            if pat in spec.patterns:
                out.append(D[n - 1])
        return SpikeTrain(out)
    if isinstance(spec, CompositionalSpec):
        return eval_layers(spec, inputs)[-1][0]
    raise SpecError(f"unsupported spec {spec!r}")


def eval_layers(spec: CompositionalSpec, inputs: Sequence) -> list:
    """All intermediate layer outputs of a composition, inputs first."""
    cur = list(inputs)
    out = [cur]
    for layer in spec.layers:
        cur = [eval_oracle(c.spec, [cur[i] for i in c.inputs]) for c in layer]
        out.append(cur)
    return out


def canonical_count(d: int, horizon: int) -> int:
    return (2**d - 1) ** horizon


def enumerate_canonical_inputs(d: int, horizon: int, budget: int = 100_000):
    """All d-tuples of trains on {1..horizon} whose union is every step."""
    n = canonical_count(d, horizon)
    if n > budget:
        raise SpecError(f"{n} canonical inputs exceed the budget of {budget}")
    vecs = [v for v in itertools.product((0, 1), repeat=d) if any(v)]
    out = []
    for cols in itertools.product(vecs, repeat=horizon):
        out.append(
            tuple(_T(tuple(Fraction(t) for t, v in enumerate(cols, start=1) if v[i])) for i in range(d))
        )
    return out


def random_inputs(d: int, events: int, rng: random.Random, rational: bool = True) -> tuple:
    """d trains whose union has exactly ``events`` spikes with random gaps."""
    t = Fraction(0)
    cols = []
    for _ in range(events):
        t += Fraction(rng.randint(1, 9), rng.randint(1, 4)) if rational else rng.randint(1, 3)
        v = 0
        while not v:
            v = rng.randrange(1, 2**d)
        cols.append((t, v))
    return tuple(_T(tuple(t for t, v in cols if v >> i & 1)) for i in range(d))


def random_monotone(rng: random.Random, span, pieces: int = 4) -> MonotoneMap:
    """Random increasing piecewise-linear map with breakpoints inside (0, span]."""
    span = Fraction(span) if span else Fraction(1)
    xs = sorted({span * Fraction(rng.randint(1, 97), 97) for _ in range(pieces)})
    ys, y = [], Fraction(0)
    prev = Fraction(0)
    for x in xs:
        y += (x - prev) * Fraction(rng.randint(1, 12), rng.randint(1, 4))
        ys.append(y)
        prev = x
    return MonotoneMap(zip(xs, ys), Fraction(rng.randint(1, 5), rng.randint(1, 5)))


def reparametrize(inputs: Sequence, phi: MonotoneMap) -> tuple:
    return tuple(apply_monotone(tr, phi) for tr in inputs)


def random_spec(kind: str, params: dict, seed: int):
    """Seeded random spec; ``r`` caps the sparsity when given."""
    rng = random.Random(seed)
    kind = kind.lower()
    r = params.get("r")
    if kind in ("finite", "periodic"):
        m = params["m"]
        pool = list(range(1, m + 1))
        out = _random_subset(rng, pool, r)
        return FiniteSpec(m, out) if kind == "finite" else PeriodicSpec(m, out)
    if kind == "markovian":
        d, m = params["d"], params["m"]
        return MarkovianSpec(d, m, _random_subset(rng, list(all_patterns(d, m)), r))
    if kind == "classifier":
        m = params["m"]
        return ClassifierSpec(m, _random_subset(rng, list(itertools.product((0, 1), repeat=m)), r))
    raise SpecError(f"cannot draw random {kind!r} specs")


def _random_subset(rng: random.Random, pool: list, r: Optional[int]) -> frozenset:
    if r is None:
        return frozenset(x for x in pool if rng.random() < 0.5)
    r = min(r, len(pool))
    sizes = list(range(r + 1))
    k = rng.choices(sizes, weights=[comb(len(pool), s) for s in sizes])[0]
    return frozenset(rng.sample(pool, k))


# ---------------------------------------------------------------------------
# structural lemmas


@dataclass
class CheckReport:
    claim: str
    instance: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"claim": self.claim, "instance": self.instance, "pass": self.passed, "detail": self.detail}


def window_determinism(fn: Callable, d: int, window: int, horizon: int, budget: int = 100_000) -> tuple:
    """Check that the output bit at each step is a function of the last ``window`` columns."""
    seen: dict = {}
    for tup in enumerate_canonical_inputs(d, horizon, budget):
        sets = [set(tr) for tr in tup]
        out = set(fn(tup))
        cols = [tuple(int(Fraction(t) in s) for s in sets) for t in range(1, horizon + 1)]
        for n in range(1, horizon + 1):
            key = tuple(cols[max(0, n - window) : n])
            bit = Fraction(n) in out
            if seen.setdefault(key, bit) != bit:
                return False, f"window {key} gives both outcomes"
    return True, f"{len(seen)} windows consistent"


def markov_periodic_composition(markov: MarkovianSpec, periodic: PeriodicSpec) -> CompositionalSpec:
    """The single-input function I -> F_M(I, F_P(I))."""
    if markov.d != 2:
        raise SpecError("the Markovian part needs two inputs")
    ident = PeriodicSpec(1, frozenset({1}))
    return CompositionalSpec(
        ((Component(ident, (0,)), Component(periodic, (0,))), (Component(markov, (0, 1)),)),
        1,
    )


def eventual_period(fn: Callable, start: int, period: int, horizon: int) -> tuple:
    out = set(fn((_T(tuple(Fraction(t) for t in range(1, horizon + 1))),)))
    for t in range(start, horizon - period + 1):
        if (Fraction(t) in out) != (Fraction(t + period) in out):
            return False, f"step {t} and {t + period} disagree"
    return True, f"periodic from step {start} on up to {horizon}"


def structural_checks(spec, partner: Optional[PeriodicSpec] = None, horizon: Optional[int] = None) -> list:
    """Window determinism for finite specs, eventual periodicity for Markov-after-periodic."""
    reports = []
    if isinstance(spec, FiniteSpec):
        hz = horizon or spec.m + 6
        ok, msg = window_determinism(lambda tup: eval_oracle(spec, tup), 1, spec.m + 1, hz)
        reports.append(CheckReport("finite implies window-determined", f"finite m={spec.m} out={sorted(spec.out)}", ok, msg))
    if isinstance(spec, MarkovianSpec) and partner is not None:
        comp = markov_periodic_composition(spec, partner)
        hz = horizon or spec.m + 3 * partner.m + 2
        hz = max(hz, spec.m + 3 * partner.m)
        ok, msg = eventual_period(lambda tup: eval_oracle(comp, tup), spec.m + 1, partner.m, hz)
        reports.append(
            CheckReport("markov after periodic is eventually periodic", f"m_M={spec.m} m_P={partner.m}", ok, msg)
        )
    return reports


# ---------------------------------------------------------------------------
# JSON


def _pattern_from_text(text: str, d: int) -> tuple:
    if not isinstance(text, str) or not text:
        raise SpecError(f"pattern must be a nonempty bit string, got {text!r}")
    steps = text.split(",") if ("," in text or d > 1) else list(text)
    for s in steps:
        if len(s) != d or set(s) - {"0", "1"}:
            raise SpecError(f"bad step {s!r} in pattern {text!r} for d={d}")
    return tuple(tuple(int(c) for c in s) for s in steps)


def _pattern_to_text(pat: tuple, d: int) -> str:
    steps = ["".join(str(b) for b in v) for v in pat]
    return "".join(steps) if d == 1 else ",".join(steps)


def spec_to_json(spec) -> dict:
    if isinstance(spec, (FiniteSpec, PeriodicSpec)):
        return {"kind": spec.kind, "m": spec.m, "out": sorted(spec.out)}
    if isinstance(spec, MarkovianSpec):
        pats = sorted(_pattern_to_text(p, spec.d) for p in spec.accepted)
        return {"kind": "markovian", "d": spec.d, "m": spec.m, "accepted": pats}
    if isinstance(spec, ClassifierSpec):
        return {"kind": "classifier", "m": spec.m, "patterns": sorted("".join(map(str, p)) for p in spec.patterns)}
    if isinstance(spec, CompositionalSpec):
        return {
            "kind": "compositional",
            "inputs": spec.n_inputs,
            "layers": [[{"spec": spec_to_json(c.spec), "inputs": list(c.inputs)} for c in layer] for layer in spec.layers],
        }
    raise SpecError(f"cannot serialize {spec!r}")


def spec_from_json(doc, where: str = "spec"):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError(f"{where}: expected an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind in ("finite", "periodic"):
            out = doc.get("out", [])
            if not isinstance(out, list):
                raise SpecError("out must be a list of integers")
            cls = FiniteSpec if kind == "finite" else PeriodicSpec
            return cls(_int(doc, "m"), frozenset(out))
        if kind == "markovian":
            d = _int(doc, "d")
            return MarkovianSpec(d, _int(doc, "m"), frozenset(_pattern_from_text(p, d) for p in doc.get("accepted", [])))
        if kind == "classifier":
            m = _int(doc, "m")
            pats = []
            for p in doc.get("patterns", []):
                if not isinstance(p, str) or len(p) != m or set(p) - {"0", "1"}:
                    raise SpecError(f"pattern {p!r} is not an {m}-bit string")
                pats.append(tuple(int(c) for c in p))
            return ClassifierSpec(m, frozenset(pats))
        if kind == "compositional":
            layers = []
            for li, layer in enumerate(doc.get("layers", [])):
                comps = []
                for ci, c in enumerate(layer):
                    sub = spec_from_json(c.get("spec"), f"{where}.layers[{li}][{ci}]")
                    comps.append(Component(sub, tuple(c.get("inputs", []))))
                layers.append(tuple(comps))
            return CompositionalSpec(tuple(layers), _int(doc, "inputs"))
    except SpecError as exc:
        if str(exc).startswith(where):
            raise
        raise SpecError(f"{where}: {exc}") from None
    raise SpecError(f"{where}: unknown kind {kind!r}")


def _int(doc, key) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SpecError(f"field {key!r} must be an integer")
    return v


def load_spec(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return spec_from_json(doc)


def dump_spec(spec) -> str:
    return json.dumps(spec_to_json(spec), indent=1) + "\n"
