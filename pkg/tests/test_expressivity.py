import json
import math
import random
from fractions import Fraction

import pytest

from snnrep import expressivity as X
from snnrep.model import INFINITE, MemoryMode
from snnrep.spikes import SpikeTrain

T = SpikeTrain


def test_potential_vectors_small():
    P = X.potential_vectors([(T([1, 2]),)])
    assert P == {(Fraction(1),), (Fraction(2),)}
    Pf = X.potential_vectors([(T([1, 2]),)], MemoryMode.finite(1))
    assert len(Pf) == 2
    assert any(abs(float(p[0]) - (1 + math.exp(-1))) < 1e-12 for p in Pf)


def test_count_bounds():
    assert X.unit_count_upper(1, 2) == pytest.approx(16 * math.e)
    assert X.unit_count_upper(1, 4) == pytest.approx(32 * math.e)
    assert X.unit_count_upper(2, 3) > X.unit_count_upper(2, 2)
    assert X.network_count_upper(2, 5) == pytest.approx((8 * math.e * 4 * 5) ** 2)
    assert X.architecture_admissible([2, 3, 1], 6)
    assert not X.architecture_admissible([2, 3, 1], 5)


def test_unit_census_examples():
    res = X.enumerate_unit_functions(1, [(T([1, 2]),)])
    assert res["count"] == 3 and res["H"] == 2
    assert set(res["functions"]) == {(T([]),), (T([2]),), (T([1, 2]),)}
    res = X.enumerate_unit_functions(1, [(T([1]),)])
    assert res["count"] == 2
    with pytest.raises(X.BudgetExceeded):
        X.enumerate_unit_functions(1, [(T(range(1, 30)),)], budget=10)
    with pytest.raises(ValueError):
        X.enumerate_unit_functions(3, [(T([1]), T([1]), T([1]))])


def test_unit_census_two_inputs_within_bound():
    rng = random.Random(5)
    for _ in range(5):
        tup = tuple(T(sorted(rng.sample(range(1, 6), rng.randint(1, 2)))) for _ in range(2))
        res = X.enumerate_unit_functions(2, [tup])
        assert 1 <= res["count"] <= res["bound"]
        # every census witness reproduces its function
        assert len(set(res["functions"])) == res["count"]


def test_unit_census_finite_memory():
    res = X.enumerate_unit_functions(1, [(T([1, 2, 4]),)], MemoryMode.finite(1))
    assert res["count"] <= res["bound"]
    assert res["count"] >= 3


def test_target_counts():
    assert X.count_target_functions("fin", 3, 3) == 8
    assert X.count_target_functions("fin", 4, 1) == 5
    assert X.count_target_functions("mm", 1, 3, 2) == 8
    with pytest.raises(ValueError):
        X.count_target_functions("xx", 1, 1)


def test_lower_bounds_hand_values():
    assert X.lower_bound_params("fin", 15, 15)["s"] == Fraction(3, 4)
    assert X.lower_bound_params("mm", 2, 9, 2)["s"] == Fraction(9, 20)
    assert X.lower_bound_params("per", 4, 3)["s"] == pytest.approx(3 / (5 * math.log2(5)))
    assert X.neuron_lower_bound(8) == 4
    with pytest.raises(ValueError):
        X.lower_bound_params("fin", 0, 1)


@pytest.mark.parametrize("phi1", [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)])
def test_trichotomy(phi1):
    rep = X.hidden_trichotomy(phi1)
    assert rep.passed, rep.observed
    assert rep.bound["thresholds"] == [1 / (1 + phi1), 1]


def test_trichotomy_thresholds_half():
    inst = X.three_spike_instance(Fraction(1, 2))
    assert inst["phi2"] == Fraction(1, 3)
    I = [T(X.LABELS)]
    assert X.unit_on_labels([Fraction(2, 3)], I, inst) == ()
    assert X.unit_on_labels([Fraction(7, 10)], I, inst) == (2,)
    assert X.unit_on_labels([Fraction(1)], I, inst) == (2,)
    assert X.unit_on_labels([Fraction(101, 100)], I, inst) == (1, 2, 3)
    with pytest.raises(ValueError):
        X.three_spike_instance(1)


def test_few_negative_search_is_empty():
    res = X.few_negative_search(Fraction(1, 2), max_negative=1, depth=3, width=2, wmax=2)
    assert res["witnesses"] == []
    assert res["evaluations"] > 0


def test_shallow_counterexample_reports():
    reps = X.shallow_counterexample_check(Fraction(1, 2), search=False)
    assert [r.passed for r in reps] == [True, True]
    assert reps[-1].observed["output"] == [1]
    doc = json.loads(json.dumps(reps[0].to_json()))
    assert set(doc) == {"claim", "instance", "bound", "observed", "pass"}


def test_separation():
    real, integer = X.integer_real_separation_check(samples=8, seed=1, wrange=3, memories=[INFINITE, MemoryMode.finite(1)])
    assert real.passed and integer.passed
    assert sum(integer.observed["failure_steps"].values()) == 49


def test_network_grid_count():
    ins = [(T([1, 2]),), (T([1, 3, 4]),)]
    res = X.network_grid_count([1, 2, 1], [-1, Fraction(1, 2), 2], ins)
    assert 1 <= res["count"] <= res["bound"]
    assert res["s"] == 4 and res["T_sum"] == 9 + 16
    with pytest.raises(X.BudgetExceeded):
        X.network_grid_count([2, 3, 2], [0, 1, 2], ins, budget=100)
