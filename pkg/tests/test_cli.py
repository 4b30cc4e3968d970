import io
import json
from pathlib import Path

import pytest

from residuekit import cli, suites

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_residue_verb():
    code, out, _ = run("residue", INSTANCES / "sqrt_s.json")
    assert code == 0 and "result: 1\n" in out
    code, out, _ = run("residue", INSTANCES / "normalization.json", "--format", "json")
    assert code == 0 and json.loads(out)["result"] == "1"


def test_residue_domain_error_names_variable():
    code, _, err = run("residue", INSTANCES / "not_finite.json")
    assert code == 3 and "variable u" in err


def test_residue_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("residue", bad)[0] == 2
    bad.write_text(json.dumps({"blocks": [["u"]], "form": {"coeff": "u +", "d": ["u"]},
                               "denoms": [{"poly": "u"}]}))
    assert run("residue", bad)[0] == 2
    assert run("residue", tmp_path / "missing.json")[0] == 2
    assert run("residue", INSTANCES / "sqrt_s.json", "--field", "R")[0] == 2


def test_prime_field_override():
    code, out, _ = run("residue", INSTANCES / "linear_change.json", "--field", "Fp:7")
    assert code == 0 and "result: 3\n" in out


def test_trace_verb():
    code, out, _ = run("trace", INSTANCES / "sqrt_s.json", "--b", "1")
    assert code == 0 and out.endswith("result: 1\n")  # tau(u du) with the file's form u du


def test_fraction_verb():
    code, out, _ = run("fraction", "[u;u^1]", "[0;u^1]")
    assert code == 0 and "equal: true" in out
    code, out, _ = run("fraction", "[1;u^1]", "[0;u^1]")
    assert code == 0 and "equal: false" in out
    assert run("fraction", "[u*m?;u]")[0] == 2
    assert run("fraction", "[1;u]", "[1;v]")[0] == 3


def test_fubini_and_basechange_verbs():
    code, out, _ = run("fubini", INSTANCES / "tower.json", "--series")
    assert code == 0 and "equal: true" in out
    code, out, _ = run("basechange", INSTANCES / "sqrt_s.json")
    assert code == 0 and "sigma_res: 1" in out and "res_sigma: 1" in out
    code, out, _ = run("basechange", INSTANCES / "sqrt_s.json", "--map", "s=9")
    assert code == 0
    assert run("basechange", INSTANCES / "normalization.json")[0] == 2


def test_verify_suites():
    code, out, _ = run("verify", "signs", "--seed", "1", "--count", "12")
    assert code == 0 and "passed: 12" in out
    assert run("verify", "nosuch")[0] == 2
    assert run("verify")[0] == 2
    assert run("residue")[0] == 2


def test_verify_is_deterministic():
    a = run("verify", "denom", "--seed", "5", "--count", "6", "--format", "json")
    b = run("verify", "denom", "--seed", "5", "--count", "6", "--format", "json")
    assert a == b and a[0] == 0


def test_timing_is_opt_in():
    _, out, _ = run("verify", "signs", "--count", "3")
    assert "wall_time" not in out
    _, out, _ = run("verify", "signs", "--count", "3", "--timing")
    assert "wall_time_s" in out


def test_failure_is_serialized_and_replays(monkeypatch, tmp_path):
    real = suites.SUITES["signs"]

    def broken(rng, config, index):
        res = real(rng, config, index)
        res.passed = index != 2
        return res

    monkeypatch.setitem(suites.SUITES, "signs", broken)
    code, out, _ = run("verify", "signs", "--seed", "4", "--count", "4", "--format", "json")
    assert code == 1
    report = json.loads(out)
    assert [f["index"] for f in report["failures"]] == [2]
    failure = report["failures"][0]
    assert failure["suite"] == "signs" and failure["seed"] == 4 and "instance" in failure
    path = tmp_path / "report.json"
    path.write_text(out)
    code, out2, _ = run("verify", "--replay", path, "--format", "json")
    replay = json.loads(out2)
    assert code == 1 and replay["failures"][0]["instance"] == failure["instance"]


def test_replay_of_passing_record(tmp_path):
    path = tmp_path / "rec.json"
    path.write_text(json.dumps({"suite": "leray", "seed": 3, "index": 1}))
    code, out, _ = run("verify", "--replay", path)
    assert code == 0 and "failed: 0" in out
