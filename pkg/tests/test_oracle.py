import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snnrep import oracle as O
from snnrep.oracle import (
    ClassifierSpec,
    Component,
    CompositionalSpec,
    FiniteSpec,
    MarkovianSpec,
    PeriodicSpec,
    SpecError,
    all_patterns,
    canonical_count,
    enumerate_canonical_inputs,
    eval_oracle,
    random_spec,
    structural_checks,
)
from snnrep.spikes import SpikeTrain, apply_monotone, union
from strategies import input_tuples, monotone_maps

T = SpikeTrain


def test_eval_examples():
    half, x = Fraction(1, 2), Fraction(17, 10)
    assert eval_oracle(FiniteSpec(3, {1, 3}), [T([half, x, 2, 9])]) == (half, 2)
    assert eval_oracle(PeriodicSpec(4, {1, 3}), [T(range(1, 9))]) == (1, 3, 5, 7)
    assert eval_oracle(ClassifierSpec(2, {(1, 1)}), [T([1, 2, 4]), T([1, 2, 3, 4])]) == (2,)


def test_markovian_and():
    spec = MarkovianSpec(2, 1, {((1, 1),)})
    assert eval_oracle(spec, [T([1, 2, 3]), T([2, 3, 4])]) == (2, 3)


def test_canonical_enumeration_counts():
    assert len(enumerate_canonical_inputs(2, 1)) == 3
    assert enumerate_canonical_inputs(1, 3) == [(T([1, 2, 3]),)]
    assert len(enumerate_canonical_inputs(2, 2)) == canonical_count(2, 2) == 9
    with pytest.raises(SpecError):
        enumerate_canonical_inputs(3, 10, budget=100)


def test_random_spec_is_seeded():
    a = random_spec("finite", {"m": 5, "r": 2}, 7)
    assert a == random_spec("finite", {"m": 5, "r": 2}, 7)
    assert a.r <= 2
    mk = random_spec("markovian", {"d": 2, "m": 2}, 3)
    assert all(1 <= len(p) <= 2 for p in mk.accepted)
    assert mk.accepted <= set(all_patterns(2, 2))


def test_spec_validation():
    with pytest.raises(SpecError):
        FiniteSpec(3, {4})
    with pytest.raises(SpecError):
        MarkovianSpec(2, 1, {((0, 0),)})
    with pytest.raises(SpecError):
        ClassifierSpec(2, {(1, 0, 1)})
    with pytest.raises(SpecError):
        CompositionalSpec(((Component(FiniteSpec(2, {1}), (0, 1)),),), 2)


def test_unused_markovian_input_warns():
    # the accept decision ignores the second input entirely
    acc = {p for p in all_patterns(2, 1) if p[-1][0] == 1}
    spec = CompositionalSpec(((Component(MarkovianSpec(2, 1, acc), (0, 1)),),), 2)
    assert spec.warnings and "input 1" in spec.warnings[0]


def test_structural_examples():
    (rep,) = structural_checks(FiniteSpec(2, {2}), horizon=8)
    assert rep.passed
    window2 = random_spec("markovian", {"d": 2, "m": 2}, 11)
    (rep,) = structural_checks(window2, partner=PeriodicSpec(4, {1}))
    assert rep.passed
    (rep,) = structural_checks(FiniteSpec(3, set()))
    assert rep.passed


def test_json_round_trip_all_kinds():
    specs = [
        FiniteSpec(4, {1, 4}),
        PeriodicSpec(4, {2}),
        MarkovianSpec(2, 2, {((1, 0), (1, 1)), ((0, 1),)}),
        ClassifierSpec(3, {(1, 0, 1)}),
        CompositionalSpec(((Component(PeriodicSpec(4, {2, 4}), (0,)),), (Component(PeriodicSpec(4, {1, 3}), (0,)),)), 1),
    ]
    for s in specs:
        assert O.load_spec(O.dump_spec(s)) == s


def test_json_errors_carry_a_location():
    with pytest.raises(SpecError, match="line 1 column"):
        O.load_spec('{"kind": ')
    with pytest.raises(SpecError, match="layers"):
        O.load_spec(json.dumps({"kind": "compositional", "inputs": 1, "layers": [[{"spec": {"kind": "what"}, "inputs": [0]}]]}))
    with pytest.raises(SpecError, match="m"):
        O.load_spec(json.dumps({"kind": "finite", "m": "3", "out": []}))


def test_translate_validity_rejects_open_tail():
    assert O.translate_valid(T([1]), T([2]), T([3]))
    assert not O.translate_valid(T([1, 2]), T([3]), T([4]))
    # a T spike after the last S cannot be followed by a valid C spike
    assert not O.translate_valid(T([3]), T([2]), T([1]))
    assert not O.translate_valid(T([1, 2]), T(), T())


# --- invariants of the reference semantics --------------------------------

SPECS_1 = [FiniteSpec(3, {1, 3}), PeriodicSpec(4, {2, 3}), MarkovianSpec(1, 2, {((1,), (1,)), ((1,),)})]
SPECS_2 = [MarkovianSpec(2, 2, {((1, 0), (1, 1)), ((0, 1),), ((1, 1), (0, 1))}), ClassifierSpec(2, {(1, 0), (1, 1)})]
SPECS = [(s, 1) for s in SPECS_1] + [(s, 2) for s in SPECS_2]


@given(st.data(), st.sampled_from(SPECS))
def test_oracle_causal_and_dominated(data, pair):
    spec, d = pair
    ins = data.draw(input_tuples(d))
    out = eval_oracle(spec, ins)
    assert set(out) <= set(union(*ins))
    for t in union(*ins):
        assert eval_oracle(spec, [tr.truncate(t) for tr in ins]) == out.truncate(t)


@given(st.data(), st.sampled_from(SPECS), monotone_maps())
def test_oracle_monotone_equivariant(data, pair, phi):
    spec, d = pair
    ins = data.draw(input_tuples(d))
    warped = eval_oracle(spec, [apply_monotone(tr, phi) for tr in ins])
    assert warped == apply_monotone(eval_oracle(spec, ins), phi)


@pytest.mark.parametrize("seed", range(5))
def test_markovian_output_ignores_old_history(seed):
    rng = random.Random(seed)
    spec = random_spec("markovian", {"d": 2, "m": 2}, seed)
    for ins in enumerate_canonical_inputs(2, 5):
        out = set(eval_oracle(spec, ins))
        cols = [tuple(int(t in set(tr)) for tr in ins) for t in range(1, 6)]
        # rewrite the first two columns at random; step 5 only sees steps 4 and 5
        for k in (0, 1):
            v = 0
            while not v:
                v = rng.randrange(1, 4)
            cols[k] = (v & 1, v >> 1 & 1)
        mutated = tuple(T([t for t, c in enumerate(cols, start=1) if c[i]]) for i in range(2))
        assert (5 in out) == (5 in set(eval_oracle(spec, mutated)))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_classifier_is_boolean_head_over_memory(m):
    rng = random.Random(m)
    pats = {p for p in itertools.product((0, 1), repeat=m) if rng.random() < 0.5}
    spec = ClassifierSpec(m, pats)
    mem = O.memory(2, m)
    for _ in range(40):
        D = T(sorted(rng.sample(range(1, 40), rng.randint(0, 10))))
        I = T(sorted(Fraction(2 * t - 1, 2) for t in rng.sample(range(1, 41), rng.randint(0, 12))))
        ID = O.ceil(1)(I, D)[0]
        outs = [set(tr) for tr in mem(ID, D)]
        want = []
        for t in D:
            bits = [int(t in outs[i * m + j]) for i in range(2) for j in range(m)]
            marks, ticks = bits[:m], bits[m:]
            # the j-th most recent event comes first in memory order
            if ticks[m - 1] and tuple(reversed(marks)) in pats:
                want.append(t)
        assert eval_oracle(spec, [I, D]) == tuple(want)


@pytest.mark.parametrize("seed", range(4))
def test_structural_checks_on_random_specs(seed):
    reps = structural_checks(random_spec("finite", {"m": 3}, seed))
    reps += structural_checks(random_spec("markovian", {"d": 2, "m": 2}, seed), partner=PeriodicSpec(2, {1}))
    assert all(r.passed for r in reps)
