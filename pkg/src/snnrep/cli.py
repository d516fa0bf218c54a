"""Command-line entry point: ``snnrep <command> ...``.

Exit codes: 0 on success, 1 when a verification or bound check fails,
2 for usage, parse and I/O errors.  Every randomized command takes
``--seed`` and produces byte-identical output for the same seed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from . import compiler as C
from . import expressivity as X
from . import oracle as O
from .gadgets import GadgetError, catalog
from .model import INFINITE, MemoryMode, ModelError, deserialize, serialize
from .rnn import GridError, check_equivalence, snn_to_rnn
from .simulator import simulate_network, trace_csv
from .spikes import SpikeTrain, format_trains, parse_trains

OK, FAIL, USAGE = 0, 1, 2


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _dumps(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def _memory(text: Optional[str]) -> Optional[MemoryMode]:
    return None if text is None else MemoryMode.parse(text)


def _load_network(path: str):
    return deserialize(_read(path))


def _load_spec(path: str):
    return O.load_spec(_read(path))


def _fmt_trains(trains) -> list:
    return [" ".join(str(t) for t in tr) for tr in trains]


# ---------------------------------------------------------------------------
# commands


def run_compile(args) -> int:
    spec = _load_spec(args.spec)
    memory = _memory(args.memory) or INFINITE
    if args.out_degree is not None:
        rep = C.compile_bounded_outdegree(spec, args.out_degree, memory)
    else:
        rep = C.compile_spec(spec, memory)
    _write(args.out, serialize(rep.network, {"report": rep.to_json()}).decode())
    if not rep.passed:
        failed = [c["name"] for c in rep.bound_check if not c["pass"]]
        print(f"bound check failed: {', '.join(failed)}", file=sys.stderr)
        return FAIL
    return OK


def run_simulate(args) -> int:
    net = _load_network(args.network)
    trains = parse_trains(_read(args.inputs))
    mem = _memory(args.memory)
    if args.trace:
        outs, traces = simulate_network(net, trains, mem, trace=True)
        _write(args.trace, trace_csv(traces))
    else:
        outs = simulate_network(net, trains, mem)
    _write(args.out, format_trains(outs))
    return OK


def verify_network(net, spec, horizon: int, seed: int, trials: int, budget: int) -> dict:
    """Differential test of a network against a spec's oracle."""
    d = net.n_inputs
    if d != spec.arity:
        raise CliError(f"network has {d} inputs but the {spec.kind} spec takes {spec.arity}")
    doc = {
        "claim": "network output equals the oracle",
        "instance": {"spec": O.spec_to_json(spec), "memory": net.memory.label, "horizon": horizon},
    }
    if horizon <= 0:
        doc.update(mode="vacuous", cases=0, counterexample=None, **{"pass": True})
        doc["warning"] = "horizon 0 checks nothing"
        return doc
    if O.canonical_count(d, horizon) <= budget:
        mode = "exhaustive"
        cases = ((i, ins) for i, ins in enumerate(O.enumerate_canonical_inputs(d, horizon, budget)))
    else:
        mode = "random"
        cases = _random_cases(d, horizon, seed, trials)
    n, bad = 0, None
    for label, ins in cases:
        n += 1
        got = simulate_network(net, ins)[0]
        want = O.eval_oracle(spec, ins)
        if tuple(got) != tuple(want):
            bad = {"case": label, "inputs": _fmt_trains(ins), "network": list(map(str, got)), "oracle": list(map(str, want))}
            break
    doc.update(mode=mode, cases=n, counterexample=bad, **{"pass": bad is None})
    if mode == "random":
        doc["seed"] = seed
    return doc


def _random_cases(d: int, horizon: int, seed: int, trials: int):
    rng = random.Random(seed)
    for i in range(trials):
        ins = O.random_inputs(d, rng.randint(1, horizon), rng)
        yield f"random {i}", ins
        span = max((tr[-1] for tr in ins if tr), default=1)
        yield f"random {i} reparametrized", O.reparametrize(ins, O.random_monotone(rng, span))


def run_verify(args) -> int:
    net = _load_network(args.network)
    if args.memory:
        net = net.with_memory(MemoryMode.parse(args.memory))
    spec = _load_spec(args.spec)
    doc = verify_network(net, spec, args.horizon, args.seed, args.trials, args.budget)
    if "warning" in doc:
        print(f"warning: {doc['warning']}", file=sys.stderr)
    _write(args.out, _dumps(doc))
    return OK if doc["pass"] else FAIL


def run_convert(args) -> int:
    net = _load_network(args.network)
    if args.memory:
        net = net.with_memory(MemoryMode.parse(args.memory))
    delta = Fraction(args.delta)
    rnn = snn_to_rnn(net, delta)
    doc = rnn.to_json()
    code = OK
    if args.inputs:
        res = check_equivalence(net, parse_trains(_read(args.inputs)), delta, args.steps)
        doc["check"] = {"equal": res["equal"], "rnn": _fmt_trains(res["rnn"]), "snn": _fmt_trains(res["snn"])}
        code = OK if res["equal"] else FAIL
    _write(args.out, _dumps(doc))
    return code


def run_count(args) -> int:
    reports = []
    if args.inputs:
        trains = parse_trains(_read(args.inputs))
        mem = _memory(args.memory) or INFINITE
        res = X.enumerate_unit_functions(len(trains), [tuple(trains)], mem, args.budget)
        reports.append(
            X.Report(
                "distinct single-unit functions stay below the counting bound",
                {"inputs": _fmt_trains(trains), "memory": mem.label, "H": res["H"]},
                res["bound"],
                res["count"],
                res["count"] <= res["bound"],
            ).to_json()
        )
    if args.bounds:
        cls, m, r, d = args.bounds[0], *map(int, args.bounds[1:])
        lb = X.lower_bound_params(cls, m, r, d)
        reports.append(
            {
                "claim": "weight and neuron lower bounds",
                "instance": {"class": cls, "m": m, "r": r, "d": d},
                "bound": {k: str(v) for k, v in lb.items()},
                "observed": {"targets": X.count_target_functions(cls, m, r, d)},
                "pass": True,
            }
        )
    if not reports:
        raise CliError("count needs an inputs file, --bounds, or both")
    _write(args.out, _dumps(reports))
    return OK if all(r["pass"] for r in reports) else FAIL


CHECKS = ("trichotomy", "few-negative", "shallow", "separation", "structural", "all")


def run_check(args) -> int:
    phi1 = Fraction(args.phi1)
    reports = []
    which = {args.which} if args.which != "all" else set(CHECKS) - {"all", "shallow"}
    if "trichotomy" in which:
        reports.append(X.hidden_trichotomy(phi1).to_json())
    if "few-negative" in which:
        res = X.few_negative_search(phi1, budget=args.budget)
        reports.append(
            {
                "claim": "no integer network with at most one negative weight isolates the first spike",
                "instance": {"phi1": str(phi1), **res["budget"]},
                "bound": {"witnesses": 0},
                "observed": {"witnesses": len(res["witnesses"]), "evaluations": res["evaluations"]},
                "pass": not res["witnesses"],
            }
        )
    if "shallow" in which:
        reports += [r.to_json() for r in X.shallow_counterexample_check(phi1)]
    if "separation" in which:
        reports += [r.to_json() for r in X.integer_real_separation_check(args.trials, args.seed)]
    if "structural" in which:
        reports += _structural_reports(args.seed, args.trials)
    _write(args.out, _dumps(reports))
    return OK if all(r["pass"] for r in reports) else FAIL


def _structural_reports(seed: int, trials: int) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        if rng.random() < 0.5:
            spec = O.random_spec("finite", {"m": rng.randint(1, 4)}, rng.randrange(2**32))
            reps = O.structural_checks(spec)
        else:
            mk = O.random_spec("markovian", {"d": 2, "m": rng.randint(1, 2)}, rng.randrange(2**32))
            per = O.random_spec("periodic", {"m": rng.randint(1, 3)}, rng.randrange(2**32))
            reps = O.structural_checks(mk, partner=per)
        out += [{**r.as_dict(), "bound": None, "observed": r.detail} for r in reps]
    for r in out:
        r.pop("detail", None)
    return out


def _demo_patterns(args, m: int) -> frozenset:
    pats = list(args.pattern or [])
    if args.patterns:
        text = _read(args.patterns)
        if text.lstrip().startswith("{"):
            spec = O.load_spec(text)
            if not isinstance(spec, O.ClassifierSpec) or spec.m != m:
                raise CliError(f"{args.patterns} is not a classifier spec with m={m}")
            return spec.patterns
        pats += [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    for p in pats:
        if len(p) != m or set(p) - {"0", "1"}:
            raise CliError(f"pattern {p!r} is not an {m}-bit string")
    return frozenset(tuple(int(c) for c in p) for p in pats)


def run_demo_classifier(m: int, patterns: frozenset, seed: int, length: int, theta=Fraction(1, 2), negate: bool = False, memory: Optional[MemoryMode] = None) -> dict:
    """Classify a Bernoulli spike stream against clock ticks D = {1..length}.

    With ``negate`` the network is built from the given patterns and then
    complemented, so it spikes on every tick whose window matches none of them.
    """
    if not 0 <= theta <= 1:
        raise CliError("theta must lie in [0, 1]")
    universe = frozenset(itertools.product((0, 1), repeat=m))
    spec = O.ClassifierSpec(m, universe - patterns if negate else patterns)
    rep = C.compile_classifier(spec, memory or INFINITE, complement=True if negate else None)
    rng = random.Random(seed)
    D = SpikeTrain(range(1, length + 1))
    I = []
    for k in range(1, length + 1):
        if rng.random() < theta:
            I.append(Fraction(k - 1) + Fraction(rng.randint(1, 4), 4))
    I = SpikeTrain(I)
    got = set(simulate_network(rep.network, [I, D])[0])
    want = set(O.eval_oracle(spec, [I, D]))
    marks = set(O.ceil(1)(I, D)[0])
    rows = [(k, int(Fraction(k) in marks), int(Fraction(k) in got), int(Fraction(k) in want)) for k in range(1, length + 1)]
    return {"spec": spec, "report": rep, "input": I, "rows": rows, "match": got == want}


def run_demo(args) -> int:
    patterns = _demo_patterns(args, args.m)
    res = run_demo_classifier(
        args.m, patterns, args.seed, args.length, Fraction(args.theta), args.negate, _memory(args.memory)
    )
    lines = ["tick,input,network,oracle"] + [",".join(map(str, r)) for r in res["rows"]]
    _write(args.out, "\n".join(lines) + "\n")
    st = res["report"].stats
    summary = f"m={args.m} patterns={len(res['spec'].patterns)} depth={st.depth} neurons={st.total_neurons}"
    print(f"{summary} match={'yes' if res['match'] else 'NO'}", file=sys.stderr)
    return OK if res["match"] else FAIL


def run_catalog(args) -> int:
    _write(args.out, _dumps(catalog()))
    return OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="snnrep", description="Compile, simulate and verify spiking networks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, memory=True, out=True):
        if memory:
            sp.add_argument("--memory", help="zero, inf, or h=P/Q")
        if out:
            sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("compile", help="compile a spec file into a network with a bound-check report")
    sp.add_argument("spec")
    sp.add_argument("--out-degree", type=int, help="use the bounded out-degree construction with this q")
    common(sp)
    sp.set_defaults(fn=run_compile)

    sp = sub.add_parser("simulate", help="run a network on a spike-train file")
    sp.add_argument("network")
    sp.add_argument("inputs")
    sp.add_argument("--trace", help="write per-event potentials as CSV here")
    common(sp)
    sp.set_defaults(fn=run_simulate)

    sp = sub.add_parser("verify", help="differential test of a network against a spec")
    sp.add_argument("network")
    sp.add_argument("spec")
    sp.add_argument("--horizon", type=int, default=6, help="number of input events (default 6)")
    sp.add_argument("--seed", type=int, default=0, help="seed for random inputs (default 0)")
    sp.add_argument("--trials", type=int, default=200, help="random inputs when not exhaustive (default 200)")
    sp.add_argument("--budget", type=int, default=2000, help="max canonical inputs for exhaustive mode (default 2000)")
    common(sp)
    sp.set_defaults(fn=run_verify)

    sp = sub.add_parser("convert", help="lower a network to a state-space recurrent net on a time grid")
    sp.add_argument("network")
    sp.add_argument("--delta", default="1", help="grid width (default 1)")
    sp.add_argument("--inputs", help="grid-aligned spike trains to cross-check both simulations")
    sp.add_argument("--steps", type=int, help="number of grid steps for the cross-check")
    common(sp)
    sp.set_defaults(fn=run_convert)

    sp = sub.add_parser("count", help="count single-unit functions or evaluate lower bounds")
    sp.add_argument("inputs", nargs="?", help="spike-train file, one train per input")
    sp.add_argument("--bounds", nargs=4, metavar=("CLASS", "M", "R", "D"), help="CLASS is fin, per, mark or cl")
    sp.add_argument("--budget", type=int, default=200_000, help="cell enumeration budget (default 200000)")
    common(sp)
    sp.set_defaults(fn=run_count)

    sp = sub.add_parser("check", help="counterexample and structural checks")
    sp.add_argument("which", choices=CHECKS)
    sp.add_argument("--phi1", default="1/2", help="first gap of the three-spike instance (default 1/2)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=30, help="random instances for sampled checks (default 30)")
    sp.add_argument("--budget", type=int, default=2_000_000, help="search evaluation budget")
    common(sp, memory=False)
    sp.set_defaults(fn=run_check)

    sp = sub.add_parser("demo", help="classifier demo on a Bernoulli input stream")
    sp.add_argument("--m", type=int, default=3, help="window length (default 3)")
    sp.add_argument("--pattern", action="append", help="accepted m-bit pattern, repeatable")
    sp.add_argument("--patterns", help="file with one pattern per line, or a classifier spec")
    sp.add_argument("--length", type=int, default=50, help="number of clock ticks (default 50)")
    sp.add_argument("--theta", default="1/2", help="input spike probability per tick (default 1/2)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--negate", action="store_true", help="spike on ticks matching none of the patterns")
    common(sp)
    sp.set_defaults(fn=run_demo)

    sp = sub.add_parser("catalog", help="list gadget kinds with their measured sizes")
    common(sp, memory=False)
    sp.set_defaults(fn=run_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.fn(args)
    except (CliError, O.SpecError, ModelError, C.CompileError, GadgetError, GridError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
