"""Shared input generators and gadget instances for the test modules."""

import random
from fractions import Fraction

from snnrep.model import INFINITE, MemoryMode
from snnrep.oracle import enumerate_canonical_inputs, random_inputs, translate_valid
from snnrep.spikes import SpikeTrain

MODES = (INFINITE, MemoryMode.finite(1), MemoryMode.finite(Fraction(1, 10)))

# one or more representative instances per gadget kind, all with m <= 8 and d <= 3
GADGET_CASES = [
    ("SKIP", {"depth": 3}),
    ("OR", {"d": 2}),
    ("OR", {"d": 3}),
    ("AND", {"d": 2}),
    ("AND", {"d": 3}),
    ("MINUS", {}),
    ("XOR", {}),
    ("IS_EQUAL", {}),
    ("TRANSLATE", {}),
    ("ODD_EVEN", {}),
    ("CLOCK", {"m": 2}),
    ("CLOCK", {"m": 8}),
    ("SPIKE", {"m": 1}),
    ("SPIKE", {"m": 3}),
    ("SPIKE", {"m": 8}),
    ("REPRESENT", {"r": [1, 0, 1]}),
    ("REPRESENT", {"r": [0, 1, 1, 0, 0, 1, 0, 1]}),
    ("CEIL", {"m": 1}),
    ("CEIL", {"m": 3}),
    ("IS_APPROX_EQUAL", {"m": 1}),
    ("IS_APPROX_EQUAL", {"m": 2}),
    ("DELAY", {"m": 1}),
    ("DELAY", {"m": 4}),
    ("REPEAT", {"m": 1}),
    ("REPEAT", {"m": 3}),
    ("IF_THEN", {"r": [1, 0]}),
    ("IF_THEN", {"r": [0, 1, 1]}),
    ("MEMORY", {"d": 1, "m": 3}),
    ("MEMORY", {"d": 2, "m": 2}),
    ("MEMORY", {"d": 3, "m": 1}),
]


def case_id(case) -> str:
    kind, params = case
    return kind + "".join(f"-{k}{v}" for k, v in params.items()).replace(" ", "")


def random_translate_inputs(rng: random.Random, blocks: int):
    """Valid (T, S, C) triples: S and C alternate, at most one T spike before each S."""
    t = Fraction(0)
    T, S, C = [], [], []
    for _ in range(blocks):
        if rng.random() < 0.6:
            t += Fraction(rng.randint(1, 5), rng.randint(1, 3))
            T.append(t)
        t += Fraction(rng.randint(1, 5), rng.randint(1, 3))
        S.append(t)
        t += Fraction(rng.randint(1, 5), rng.randint(1, 3))
        C.append(t)
    out = (SpikeTrain(T), SpikeTrain(S), SpikeTrain(C))
    assert translate_valid(*out)
    return out


def random_case_inputs(kind: str, d: int, rng: random.Random, horizon: int = 24):
    if kind == "TRANSLATE":
        return random_translate_inputs(rng, rng.randint(1, horizon // 3))
    return random_inputs(d, rng.randint(1, horizon), rng)


def exhaustive_horizon(d: int, limit: int = 2000, cap: int = 24) -> int:
    h = 0
    while h < cap and (2**d - 1) ** (h + 1) <= limit:
        h += 1
    return h


def canonical_case_inputs(kind: str, d: int, limit: int = 2000):
    ins = enumerate_canonical_inputs(d, exhaustive_horizon(d, limit), limit)
    if kind == "TRANSLATE":
        ins = [x for x in ins if translate_valid(*x)]
    return ins
