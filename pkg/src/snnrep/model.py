"""Feedforward SNN architectures: layers, memory modes, algebra and I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class MemoryMode:
    """Memory coefficient h: ``zero`` (h=0), ``infinite`` or ``finite`` with h > 0."""

    kind: str
    h: Optional[object] = None

    def __post_init__(self):
        if self.kind not in ("zero", "finite", "infinite"):
            raise ModelError(f"unknown memory mode {self.kind!r}")
        if self.kind == "finite":
            if self.h is None:
                raise ModelError("finite memory needs h")
            h = self.h if isinstance(self.h, float) else Fraction(self.h)
            if not h > 0:
                raise ModelError("finite memory requires h > 0")
            object.__setattr__(self, "h", h)
        elif self.h is not None:
            raise ModelError(f"{self.kind} memory takes no h")

    @classmethod
    def finite(cls, h) -> "MemoryMode":
        return cls("finite", h)

    @classmethod
    def parse(cls, text: str) -> "MemoryMode":
        """Parse ``zero``, ``inf``/``infinite`` or ``h=P/Q``."""
        t = text.strip().lower()
        if t in ("zero", "0", "h=0"):
            return ZERO
        if t in ("inf", "infinite", "h=inf"):
            return INFINITE
        if t.startswith("h="):
            try:
                return cls.finite(Fraction(t[2:]))
            except (ValueError, ZeroDivisionError):
                pass
        raise ModelError(f"cannot parse memory mode {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "finite":
            return f"h={_fmt(self.h)}"
        return "inf" if self.kind == "infinite" else "zero"

    def to_json(self):
        if self.kind == "finite":
            return {"finite": _fmt(self.h)}
        return self.kind

    @classmethod
    def from_json(cls, obj) -> "MemoryMode":
        if obj in ("zero", "infinite"):
            return cls(obj)
        if isinstance(obj, dict) and set(obj) == {"finite"}:
            return cls.finite(_parse_rational(obj["finite"], "memory.finite"))
        raise ModelError(f"invalid memory mode document {obj!r}")


ZERO = MemoryMode("zero")
INFINITE = MemoryMode("infinite")


@dataclass(frozen=True)
class SparseLayer:
    """Weight matrix of one layer as sorted ``(out, in, weight)`` triples."""

    rows: int
    cols: int
    entries: tuple = ()

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ModelError("layer dimensions must be nonnegative")
        seen = set()
        clean = []
        for e in self.entries:
            o, i, w = e
            if not (0 <= o < self.rows and 0 <= i < self.cols):
                raise ModelError(f"entry ({o},{i}) out of range for {self.rows}x{self.cols} layer")
            if (o, i) in seen:
                raise ModelError(f"duplicate entry ({o},{i})")
            seen.add((o, i))
            w = Fraction(w)
            if w != 0:
                clean.append((int(o), int(i), w))
        clean.sort()
        object.__setattr__(self, "entries", tuple(clean))

    @classmethod
    def from_rows(cls, cols: int, rows: Sequence[dict]) -> "SparseLayer":
        """Build from one ``{input_index: weight}`` dict per output neuron."""
        ents = [(o, i, w) for o, row in enumerate(rows) for i, w in row.items()]
        return cls(len(rows), cols, tuple(ents))

    def incoming(self) -> list:
        """Per output neuron, the list of ``(input, weight)`` pairs."""
        out = [[] for _ in range(self.rows)]
        for o, i, w in self.entries:
            out[o].append((i, w))
        return out

    def weight(self, o: int, i: int) -> Fraction:
        for oo, ii, w in self.entries:
            if (oo, ii) == (o, i):
                return w
        return Fraction(0)

    def dense(self) -> list:
        m = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for o, i, w in self.entries:
            m[o][i] = w
        return m


@dataclass(frozen=True)
class NetworkStats:
    depth: int
    widths: tuple
    total_neurons: int
    nonzero_weights: int
    negative_weights: int
    max_out_degree: int

    def as_dict(self) -> dict:
        return {
            "depth": self.depth,
            "widths": list(self.widths),
            "total_neurons": self.total_neurons,
            "nonzero_weights": self.nonzero_weights,
            "negative_weights": self.negative_weights,
            "max_out_degree": self.max_out_degree,
        }


@dataclass(frozen=True)
class Network:
    layers: tuple
    memory: MemoryMode = INFINITE
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ModelError("a network needs at least one layer")
        for k in range(1, len(layers)):
            if layers[k].cols != layers[k - 1].rows:
                raise ModelError(
                    f"layer {k + 1} expects {layers[k].cols} inputs but layer {k} has {layers[k - 1].rows} outputs"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def n_inputs(self) -> int:
        return self.layers[0].cols

    @property
    def n_outputs(self) -> int:
        return self.layers[-1].rows

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def widths(self) -> tuple:
        return (self.layers[0].cols,) + tuple(l.rows for l in self.layers)

    def with_memory(self, memory: MemoryMode) -> "Network":
        return Network(self.layers, memory, dict(self.meta))

    def with_meta(self, **kw) -> "Network":
        meta = dict(self.meta)
        meta.update(kw)
        return Network(self.layers, self.memory, meta)

    def is_integer(self) -> bool:
        return all(w.denominator == 1 for l in self.layers for _, _, w in l.entries)


def skip_layer(width: int) -> SparseLayer:
    return SparseLayer(width, width, tuple((i, i, Fraction(2)) for i in range(width)))


def skip_network(width: int, depth: int, memory: MemoryMode = INFINITE) -> Network:
    if depth < 1:
        raise ModelError("skip network depth must be positive")
    return Network(tuple(skip_layer(width) for _ in range(depth)), memory, {"kind": "SKIP"})


def compose(first: Network, second: Network) -> Network:
    """Feed the outputs of ``first`` into ``second``."""
    if first.n_outputs != second.n_inputs:
        raise ModelError(f"dimension mismatch: {first.n_outputs} outputs feed {second.n_inputs} inputs")
    if first.memory != second.memory:
        raise ModelError(f"memory mode mismatch: {first.memory.label} vs {second.memory.label}")
    return Network(first.layers + second.layers, first.memory)


def parallel(a: Network, b: Network) -> Network:
    """Block-diagonal stacking; inputs and outputs are concatenated."""
    if a.depth != b.depth:
        raise ModelError(f"depth mismatch: {a.depth} vs {b.depth}")
    if a.memory != b.memory:
        raise ModelError(f"memory mode mismatch: {a.memory.label} vs {b.memory.label}")
    layers = []
    for la, lb in zip(a.layers, b.layers):
        ents = list(la.entries) + [(o + la.rows, i + la.cols, w) for o, i, w in lb.entries]
        layers.append(SparseLayer(la.rows + lb.rows, la.cols + lb.cols, tuple(ents)))
    return Network(tuple(layers), a.memory)


def pad_with_skip(net: Network, extra: int) -> Network:
    """Append ``extra`` identity-forwarding layers after the outputs."""
    if extra < 0:
        raise ModelError("extra must be nonnegative")
    if extra == 0:
        return net
    return Network(net.layers + tuple(skip_layer(net.n_outputs) for _ in range(extra)), net.memory, dict(net.meta))


def stats(net: Network) -> NetworkStats:
    s = sum(len(l.entries) for l in net.layers)
    neg = sum(1 for l in net.layers for _, _, w in l.entries if w < 0)
    deg = 0
    for l in net.layers:
        counts = [0] * l.cols
        for _, i, _ in l.entries:
            counts[i] += 1
        if counts:
            deg = max(deg, max(counts))
    widths = net.widths
    return NetworkStats(net.depth, widths, sum(widths), s, neg, deg)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_rational(text, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ModelError(f"{where}: expected a rational string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"{where}: malformed rational {text!r}") from None


def network_to_json(net: Network) -> dict:
    doc = {
        "memory": net.memory.to_json(),
        "layers": [
            {"rows": l.rows, "cols": l.cols, "entries": [[o, i, _fmt(w)] for o, i, w in l.entries]}
            for l in net.layers
        ],
        "meta": _jsonable(net.meta),
    }
    return doc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return _fmt(obj)
    return obj


def network_from_json(doc) -> Network:
    if not isinstance(doc, dict):
        raise ModelError("network document must be an object")
    for key in ("memory", "layers"):
        if key not in doc:
            raise ModelError(f"missing field {key!r}")
    memory = MemoryMode.from_json(doc["memory"])
    if not isinstance(doc["layers"], list):
        raise ModelError("layers must be a list")
    layers = []
    for k, ld in enumerate(doc["layers"]):
        where = f"layers[{k}]"
        if not isinstance(ld, dict) or not {"rows", "cols", "entries"} <= set(ld):
            raise ModelError(f"{where}: needs rows, cols and entries")
        ents = []
        for j, e in enumerate(ld["entries"]):
            if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], int) and isinstance(e[1], int)):
                raise ModelError(f"{where}.entries[{j}]: expected [out, in, \"w\"]")
            ents.append((e[0], e[1], _parse_rational(e[2], f"{where}.entries[{j}]")))
        try:
            layers.append(SparseLayer(int(ld["rows"]), int(ld["cols"]), tuple(ents)))
        except ModelError as exc:
            raise ModelError(f"{where}: {exc}") from None
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise ModelError("meta must be an object")
    return Network(tuple(layers), memory, meta)


def serialize(net: Network, extra: Optional[dict] = None) -> bytes:
    doc = network_to_json(net)
    if extra:
        doc.update(extra)
    return (json.dumps(doc, indent=1) + "\n").encode()


def deserialize(data) -> Network:
    if isinstance(data, bytes):
        data = data.decode()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return network_from_json(doc)
