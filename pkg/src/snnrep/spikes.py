"""Spike-train values and the order-theoretic helpers shared by every module.

A spike train is a finite, strictly increasing tuple of positive rationals.
Infinite trains are modelled by finite prefixes; all functions in this
package are causal, so a prefix is enough to decide every output up to the
last input spike.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Sequence

Time = Fraction


def to_time(x) -> Fraction:
    """Convert an int, str ("p/q"), Fraction or exact float into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not time labels")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a time label")


class SpikeTrain(tuple):
    """Immutable, strictly increasing sequence of positive time labels."""

    def __new__(cls, times: Iterable = ()):
        values = tuple(to_time(t) for t in times)
        for a, b in zip(values, values[1:]):
            if not a < b:
                raise ValueError(f"spike times must be strictly increasing: {a} !< {b}")
        if values and values[0] <= 0:
            raise ValueError("spike times must be positive")
        return super().__new__(cls, values)

    @classmethod
    def from_unsorted(cls, times: Iterable) -> "SpikeTrain":
        return cls(sorted(set(to_time(t) for t in times)))

    def __repr__(self) -> str:
        return "SpikeTrain({" + ", ".join(str(t) for t in self) + "})"

    def truncate(self, t) -> "SpikeTrain":
        """Spikes at times <= t."""
        return SpikeTrain(self[: bisect_right(self, to_time(t))])

    def window(self, lo, hi, lo_open: bool = True, hi_open: bool = False) -> "SpikeTrain":
        """Spikes inside the interval between lo and hi with the given openness."""
        lo, hi = to_time(lo), to_time(hi)
        out = []
        for t in self:
            if (t > lo if lo_open else t >= lo) and (t < hi if hi_open else t <= hi):
                out.append(t)
        return SpikeTrain(out)


EMPTY = SpikeTrain()


def _trusted_train(values: tuple) -> SpikeTrain:
    """Wrap an already sorted tuple of Fractions without re-validating it."""
    return tuple.__new__(SpikeTrain, values)


def _key(t: Fraction) -> tuple:
    # Fractions are normalized, so this is an exact equality key that hashes
    # much faster than the Fraction itself
    return (t.numerator, t.denominator)


def union(*trains: Sequence) -> SpikeTrain:
    trains = [tr if isinstance(tr, SpikeTrain) else SpikeTrain.from_unsorted(tr) for tr in trains]
    if len(trains) == 1:
        return trains[0]
    keyed: dict = {}
    for tr in trains:
        for t in tr:
            keyed.setdefault(_key(t), t)
    return _trusted_train(tuple(sorted(keyed.values())))


def incidence(times: Sequence, trains: Sequence[Sequence]) -> list:
    """0/1 column per time saying which trains spike then."""
    keys = [{_key(t) for t in tr} for tr in trains]
    return [tuple(int(k in ks) for ks in keys) for k in map(_key, times)]


def intersection(a: Sequence, b: Sequence) -> SpikeTrain:
    sb = set(b)
    return SpikeTrain(t for t in a if t in sb)


def difference(a: Sequence, b: Sequence) -> SpikeTrain:
    sb = set(b)
    return SpikeTrain(t for t in a if t not in sb)


def nth_spike(train: Sequence, j: int) -> Fraction:
    """The j-th smallest spike time (1-based)."""
    if not isinstance(j, int) or j < 1:
        raise IndexError(f"spike index must be a positive integer, got {j!r}")
    if j > len(train):
        raise IndexError(f"train has {len(train)} spikes, index {j} out of range")
    return train[j - 1]


def dominates(a: Sequence, b: Sequence) -> bool:
    """True iff every spike of a also occurs in b."""
    return set(a) <= set(b)


def ordering_rank(train: Sequence) -> dict:
    """Map each spike time to its 1-based position in the train."""
    return {t: k for k, t in enumerate(train, start=1)}


class MonotoneMap:
    """Strictly increasing piecewise-linear bijection of (0, inf).

    The map passes through the origin and every breakpoint ``(x, y)``.
    Beyond the last breakpoint it continues with ``tail_slope`` (default 1,
    i.e. a translate of the identity).
    """

    def __init__(self, breakpoints: Iterable = (), tail_slope=1):
        pts = [(to_time(x), to_time(y)) for x, y in breakpoints]
        pts.sort()
        prev = (Fraction(0), Fraction(0))
        for x, y in pts:
            if not (x > prev[0] and y > prev[1]):
                raise ValueError("breakpoints must be strictly increasing in both coordinates")
            prev = (x, y)
        self.tail_slope = to_time(tail_slope)
        if self.tail_slope <= 0:
            raise ValueError("slopes must be positive")
        self.breakpoints = tuple(pts)
        self._xs = [Fraction(0)] + [x for x, _ in pts]
        self._ys = [Fraction(0)] + [y for _, y in pts]

    @classmethod
    def identity(cls) -> "MonotoneMap":
        return cls()

    @classmethod
    def scaling(cls, c) -> "MonotoneMap":
        return cls((), tail_slope=c)

    def __call__(self, t) -> Fraction:
        t = to_time(t)
        if t < 0:
            raise ValueError("monotone maps are defined on nonnegative times")
        i = bisect_right(self._xs, t) - 1
        if i == len(self._xs) - 1:
            return self._ys[i] + self.tail_slope * (t - self._xs[i])
        x0, x1 = self._xs[i], self._xs[i + 1]
        y0, y1 = self._ys[i], self._ys[i + 1]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    def inverse(self) -> "MonotoneMap":
        return MonotoneMap([(y, x) for x, y in self.breakpoints], 1 / self.tail_slope)

    def slopes(self) -> list:
        out = []
        for i in range(1, len(self._xs)):
            out.append((self._ys[i] - self._ys[i - 1]) / (self._xs[i] - self._xs[i - 1]))
        out.append(self.tail_slope)
        return out

    def __repr__(self) -> str:
        pts = ", ".join(f"({x}, {y})" for x, y in self.breakpoints)
        return f"MonotoneMap([{pts}], tail_slope={self.tail_slope})"


def apply_monotone(train: Sequence, phi: MonotoneMap) -> SpikeTrain:
    return SpikeTrain(phi(t) for t in train)


def format_time(t: Fraction) -> str:
    t = to_time(t)
    return str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"


def parse_trains(text: str) -> list:
    """Parse the line-oriented text format: one train per line.

    Times are integers or ``p/q`` separated by whitespace; ``#`` starts a
    comment; a blank line is an empty train. Trailing blank lines are ignored.
    """
    lines = text.split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    trains = []
    for lineno, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0]
        if raw.lstrip().startswith("#"):
            continue
        try:
            trains.append(SpikeTrain(Fraction(tok) for tok in body.split()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return trains


def format_trains(trains: Iterable[Sequence]) -> str:
    return "".join(" ".join(format_time(t) for t in tr) + "\n" for tr in trains)
