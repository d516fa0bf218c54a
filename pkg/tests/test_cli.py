import json

import pytest

from snnrep.cli import main
from snnrep.model import deserialize, network_to_json, serialize


@pytest.fixture
def files(tmp_path):
    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return put


def compile_to(files, tmp_path, spec_text, name="net.json", *extra):
    spec = files(name + ".spec", spec_text)
    out = str(tmp_path / name)
    assert main(["compile", spec, "--out", out, *extra]) == 0
    return spec, out


def test_compile_and_simulate(files, tmp_path, capsys):
    spec, net = compile_to(files, tmp_path, '{"kind":"finite","m":4,"out":[2,4]}')
    doc = json.loads(open(net).read())
    assert doc["report"]["bound_check"][0]["pass"]
    assert "finite-block:SPIKE_1" in doc["report"]["construction_trace"]
    ins = files("in.txt", "1 2 5/2 4 9\n")
    trace = str(tmp_path / "trace.csv")
    assert main(["simulate", net, ins, "--trace", trace]) == 0
    assert capsys.readouterr().out == "2 4\n"
    assert open(trace).readline().strip() == "layer,neuron,event_time,potential,spiked"


def test_compile_rejects_period_three(files, capsys):
    spec = files("p3.json", '{"kind":"periodic","m":3,"out":[1]}')
    assert main(["compile", spec]) == 2
    assert "unsupported period 3" in capsys.readouterr().err


def test_compile_out_degree(files, tmp_path):
    _, net = compile_to(files, tmp_path, '{"kind":"finite","m":16,"out":[7]}', "b.json", "--out-degree", "4")
    assert json.loads(open(net).read())["report"]["stats"]["max_out_degree"] <= 4


def test_verify_pass_and_deterministic(files, tmp_path):
    spec, net = compile_to(files, tmp_path, '{"kind":"markovian","d":2,"m":1,"accepted":["11"]}')
    outs = []
    for k in range(2):
        out = str(tmp_path / f"v{k}.json")
        assert main(["verify", net, spec, "--horizon", "5", "--out", out]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["mode"] == "exhaustive" and doc["cases"] == 3**5 and doc["pass"]
    # random mode, seeded
    runs = []
    for k in range(2):
        out = str(tmp_path / f"r{k}.json")
        assert main(["verify", net, spec, "--horizon", "12", "--trials", "20", "--seed", "3", "--out", out]) == 0
        runs.append(open(out, "rb").read())
    assert runs[0] == runs[1]
    assert json.loads(runs[0])["mode"] == "random"


def test_verify_catches_mutation(files, tmp_path):
    spec, net = compile_to(files, tmp_path, '{"kind":"markovian","d":2,"m":1,"accepted":["11"]}')
    doc = network_to_json(deserialize(open(net).read()))
    # weaken the last inhibitory weight (it sits in the Boolean head)
    neg = [e for layer in doc["layers"] for e in layer["entries"] if e[2].startswith("-")]
    neg[-1][2] = "-1"
    bad = files("mut.json", json.dumps(doc))
    out = str(tmp_path / "v.json")
    assert main(["verify", bad, spec, "--out", out]) == 1
    rep = json.loads(open(out).read())
    assert rep["pass"] is False and rep["counterexample"]["network"] != rep["counterexample"]["oracle"]


def test_verify_horizon_zero_and_arity(files, tmp_path, capsys):
    spec, net = compile_to(files, tmp_path, '{"kind":"finite","m":2,"out":[1]}')
    assert main(["verify", net, spec, "--horizon", "0"]) == 0
    captured = capsys.readouterr()
    assert "warning" in captured.err and json.loads(captured.out)["mode"] == "vacuous"
    other = files("and.json", '{"kind":"markovian","d":2,"m":1,"accepted":["11"]}')
    assert main(["verify", net, other]) == 2


def test_convert(files, tmp_path, capsys):
    _, net = compile_to(files, tmp_path, '{"kind":"finite","m":2,"out":[2]}')
    ins = files("g.txt", "1 2 4\n")
    assert main(["convert", net, "--inputs", ins, "--memory", "h=1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["check"]["equal"] and doc["check"]["snn"] == ["2"]
    bad = files("g2.txt", "1 5/2\n")
    assert main(["convert", net, "--inputs", bad]) == 2


def test_count(files, capsys):
    ins = files("c.txt", "1 2\n")
    assert main(["count", ins]) == 0
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["observed"] == 3 and rep["pass"]
    assert main(["count", "--bounds", "fin", "15", "15", "1"]) == 0
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["bound"]["s"] == "3/4"
    assert main(["count"]) == 2


def test_check_commands(capsys):
    assert main(["check", "trichotomy", "--phi1", "1/3"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["pass"]
    assert main(["check", "separation", "--trials", "5"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 2
    assert main(["check", "structural", "--trials", "4", "--seed", "2"]) == 0
    assert all(r["pass"] for r in json.loads(capsys.readouterr().out))
    assert main(["check", "trichotomy", "--phi1", "3/2"]) == 2


def test_demo(files, tmp_path, capsys):
    assert main(["demo", "--m", "2", "--pattern", "11", "--pattern", "01", "--length", "20", "--seed", "4"]) == 0
    cap = capsys.readouterr()
    lines = cap.out.strip().splitlines()
    assert lines[0] == "tick,input,network,oracle" and len(lines) == 21
    assert all(r.split(",")[2] == r.split(",")[3] for r in lines[1:])
    assert "match=yes" in cap.err
    pats = files("pats.txt", "# accepted\n101\n")
    assert main(["demo", "--patterns", pats, "--negate", "--length", "15"]) == 0
    assert "match=yes" in capsys.readouterr().err
    # nothing accepted: the network never spikes
    assert main(["demo", "--m", "2", "--length", "10"]) == 0
    assert all(r.split(",")[2] == "0" for r in capsys.readouterr().out.strip().splitlines()[1:])
    assert main(["demo", "--m", "2", "--pattern", "111"]) == 2


def test_catalog(capsys):
    assert main(["catalog"]) == 0
    kinds = {row["kind"] for row in json.loads(capsys.readouterr().out)}
    assert {"SKIP", "CEIL", "MEMORY"} <= kinds


def test_usage_errors(tmp_path, capsys):
    assert main([]) == 2
    assert main(["simulate", str(tmp_path / "missing.json"), str(tmp_path / "x.txt")]) == 2
    assert "cannot read" in capsys.readouterr().err
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["compile", str(junk)]) == 2
    assert main(["--help"]) == 0


def test_serialize_round_trip_through_cli(files, tmp_path):
    _, net = compile_to(files, tmp_path, '{"kind":"periodic","m":4,"out":[1,3]}')
    loaded = deserialize(open(net).read())
    assert deserialize(serialize(loaded)) == loaded
