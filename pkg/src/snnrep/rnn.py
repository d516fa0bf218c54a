"""Lowering feedforward networks on a time grid to recurrent state-space nets.

Each layer with p inputs and q outputs becomes a block with a 2q-dimensional
hidden state: q Heaviside coordinates (the spikes) and q clipped-ramp
coordinates (the potential when it is in [0, 1], else 0).

With finite memory the per-step decay e^(-delta/h) is irrational.  We fix one
rational constant c (the exact binary value of the double nearest to it) and
hand the same c to the event simulator via :func:`grid_decay`, so both sides
run in exact arithmetic and can be compared bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import MemoryMode, ModelError, Network
from .simulator import grid_decay, simulate_network
from .spikes import SpikeTrain


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class BinaryStream:
    """Step t (1-based) stands for time t * delta."""

    steps: tuple
    delta: Fraction = Fraction(1)

    @property
    def width(self) -> int:
        return len(self.steps[0]) if self.steps else 0

    def to_text(self) -> str:
        return "".join("".join(str(b) for b in v) + "\n" for v in self.steps)

    @classmethod
    def from_text(cls, text: str, delta=1) -> "BinaryStream":
        steps = []
        for lineno, line in enumerate(text.split("\n"), start=1):
            line = line.strip()
            if not line:
                continue
            if set(line) - {"0", "1"}:
                raise GridError(f"line {lineno}: expected only 0/1 characters")
            steps.append(tuple(int(c) for c in line))
        if steps and len({len(v) for v in steps}) != 1:
            raise GridError("all steps must have the same width")
        return cls(tuple(steps), Fraction(delta))


@dataclass(frozen=True)
class Block:
    W: tuple  # 2q x p
    V: tuple  # 2q x 2q
    U: tuple  # q x 2q

    @property
    def p_in(self) -> int:
        return len(self.W[0]) if self.W else 0

    @property
    def p_out(self) -> int:
        return len(self.U)


@dataclass(frozen=True)
class StateSpaceNet:
    blocks: tuple
    decay: Fraction
    delta: Fraction

    def to_json(self) -> dict:
        def mat(M):
            return [[_fmt(x) for x in row] for row in M]

        return {
            "delta": _fmt(self.delta),
            "decay": _fmt(self.decay),
            "blocks": [{"W": mat(b.W), "V": mat(b.V), "U": mat(b.U)} for b in self.blocks],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "StateSpaceNet":
        def mat(M):
            return tuple(tuple(Fraction(x) for x in row) for row in M)

        try:
            blocks = tuple(Block(mat(b["W"]), mat(b["V"]), mat(b["U"])) for b in doc["blocks"])
            return cls(blocks, Fraction(doc["decay"]), Fraction(doc["delta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"invalid state-space document: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decay_constant(memory: MemoryMode, delta) -> Fraction:
    """Per-step decay: 1, 0, or the rational double closest to exp(-delta/h)."""
    if memory.kind == "infinite":
        return Fraction(1)
    if memory.kind == "zero":
        return Fraction(0)
    return Fraction(math.exp(-float(Fraction(delta)) / float(memory.h)))


def snn_to_rnn(net: Network, delta=1, decay: Optional[Fraction] = None) -> StateSpaceNet:
    delta = Fraction(delta)
    if delta <= 0:
        raise GridError("grid width must be positive")
    c = decay_constant(net.memory, delta) if decay is None else Fraction(decay)
    blocks = []
    for layer in net.layers:
        q, p = layer.rows, layer.cols
        W = layer.dense()
        Wp = tuple(tuple(row) for row in W + W)
        zero = Fraction(0)
        V = tuple(
            tuple(c if (j >= q and j - q == i % q) else zero for j in range(2 * q)) for i in range(2 * q)
        )
        U = tuple(tuple(Fraction(1) if j == i else zero for j in range(2 * q)) for i in range(q))
        blocks.append(Block(Wp, V, U))
    return StateSpaceNet(tuple(blocks), c, delta)


def _sigma(z: Sequence[Fraction], q: int) -> list:
    spikes = [Fraction(1) if x > 1 else Fraction(0) for x in z[:q]]
    ramps = [x if 0 <= x <= 1 else Fraction(0) for x in z[q:]]
    return spikes + ramps


def simulate_rnn(rnn: StateSpaceNet, stream: BinaryStream, keep_ramps: bool = False):
    """Run every block on the stream; returns the output stream (and ramp traces)."""
    if rnn.blocks and stream.steps and stream.width != rnn.blocks[0].p_in:
        raise GridError(f"stream has width {stream.width}, network expects {rnn.blocks[0].p_in}")
    states = [[Fraction(0)] * (2 * b.p_out) for b in rnn.blocks]
    outs = []
    ramps = [[] for _ in rnn.blocks]
    for x in stream.steps:
        cur = [Fraction(v) for v in x]
        for k, b in enumerate(rnn.blocks):
            q = b.p_out
            hprev = states[k]
            z = []
            for i in range(2 * q):
                acc = sum((w * xv for w, xv in zip(b.W[i], cur) if w and xv), Fraction(0))
                acc += sum((v * hv for v, hv in zip(b.V[i], hprev) if v and hv), Fraction(0))
                z.append(acc)
            h = _sigma(z, q)
            states[k] = h
            cur = [sum((u * hv for u, hv in zip(row, h) if u), Fraction(0)) for row in b.U]
            if keep_ramps:
                ramps[k].append(tuple(h[q:]))
        outs.append(tuple(int(v) for v in cur))
    result = BinaryStream(tuple(outs), stream.delta)
    return (result, ramps) if keep_ramps else result


def encode_grid(trains: Sequence[Sequence], delta=1, steps: Optional[int] = None) -> BinaryStream:
    delta = Fraction(delta)
    trains = [SpikeTrain(tr) for tr in trains]
    idx = []
    for j, tr in enumerate(trains):
        ks = []
        for t in tr:
            k = t / delta
            if k.denominator != 1:
                raise GridError(f"spike time {t} of train {j} is not a multiple of {delta}")
            ks.append(int(k))
        idx.append(set(ks))
    last = max((max(s) for s in idx if s), default=0)
    if steps is None:
        steps = last
    elif last > steps:
        raise GridError(f"spike at step {last} lies beyond the {steps} encoded steps")
    return BinaryStream(tuple(tuple(int(t in s) for s in idx) for t in range(1, steps + 1)), delta)


def decode_grid(stream: BinaryStream, width: Optional[int] = None) -> list:
    """``width`` is needed when the stream has no steps."""
    w = stream.width if stream.steps or width is None else width
    return [SpikeTrain(stream.delta * t for t, v in enumerate(stream.steps, start=1) if v[j]) for j in range(w)]


def check_equivalence(net: Network, inputs: Sequence[Sequence], delta=1, steps: Optional[int] = None) -> dict:
    """Compare the event simulator with the state-space net on one grid input."""
    delta = Fraction(delta)
    rnn = snn_to_rnn(net, delta)
    stream = encode_grid(inputs, delta, steps)
    rnn_out = decode_grid(simulate_rnn(rnn, stream), rnn.blocks[-1].p_out)
    kw = {}
    if net.memory.kind == "finite":
        kw["decay"] = grid_decay(delta, rnn.decay)
    snn_out = simulate_network(net, inputs, **kw)
    return {"equal": [tuple(a) for a in rnn_out] == [tuple(b) for b in snn_out], "rnn": rnn_out, "snn": snn_out}
