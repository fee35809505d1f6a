import json
import shutil
import subprocess
import sys
from math import comb

import pytest

from theta_calc import cli
from theta_calc.presheaf import Presented, presentation_to_json
from theta_calc.site import Site
from theta_calc import theta as th


@pytest.fixture
def presentation(tmp_path):
    P = Presented(Site((1, 1)), [("a", (th.simplex(1), th.simplex(1))),
                                 ("b", (th.simplex(2), th.simplex(0)))], name="P")
    path = tmp_path / "p.json"
    path.write_text(json.dumps(presentation_to_json(P)))
    return str(path)


def test_hom_count():
    code, out = cli.run(["hom", "--n", "1", "--src", "[*]", "--dst", "[*]"])
    assert (code, out) == (0, "3")
    code, out = cli.run(["hom", "--n", "2", "--src", "[1]([1])", "--dst", "[1]([1])"])
    assert (code, out) == (0, "5")


def test_hom_json_report():
    code, out = cli.run(["--format", "json", "hom", "--src", "[2]", "--dst", "[3]", "--list"])
    data = json.loads(out)
    assert code == 0 and data["count"] == comb(3 + 2 + 1, 3) == len(data["morphisms"])
    assert data["config"]["n"] == 1


@pytest.mark.parametrize("argv", [
    ["hom", "--src", "[1]([1", "--dst", "[1]"],
    ["hom", "--src", "[2]([1])", "--dst", "[1]", "--n", "2"],
    ["eval", "--presentation", "{not json"],
    ["hom", "--n", "-1", "--src", "*", "--dst", "*"],
    ["bogus"],
    ["fuzz", "--suite", "nope"],
    ["latch-check", "--presentation", '{"site": [1], "cells": [{"id": "a", "shape": [["*"]]}], "glue": []}'],
])
def test_malformed_input(argv):
    code, out = cli.run(argv)
    assert code == 2


def test_eval_and_window(presentation):
    code, out = cli.run(["eval", "--presentation", presentation])
    data = json.loads(out)
    assert code == 0 and data["window"] == [2, 1]
    sizes = {json.dumps(r["object"]): r["size"] for r in data["values"]}
    # Delta[1] x Delta[1] plus Delta[2] x point, no gluing
    assert sizes['[[], []]'] == 2 * 2 + 3 * 1
    code, out = cli.run(["--format", "csv", "eval", "--presentation", presentation])
    assert out.splitlines()[0] == "object,size"


def test_segal_check():
    assert cli.run(["segal-check", "--format", "text"]) == (0, "pass")
    code, out = cli.run(["segal-check", "--ua", "rep:[2]"])
    assert code == 0 and json.loads(out)["strict"]


def test_latch_check(presentation):
    assert cli.run(["latch-check", "--presentation", presentation, "--sub", "a", "--format", "text"]) == (0, "pass")
    code, _ = cli.run(["latch-check", "--presentation", presentation, "--sub", "zzz"])
    assert code == 2


def test_lift_suites():
    code, out = cli.run(["lift", "--count", "4"])
    data = json.loads(out)
    assert code == 0 and data["failed"] == 0
    assert data["bounds"] == {"m_max": 3, "p_max": 2, "e_degree": 4}
    assert data["window"] == {"E_degree": 4}
    assert cli.run(["lift", "--suite", "surjectivity", "--count", "10", "--format", "text"]) == (0, "pass")
    assert cli.run(["lift", "--n", "2"])[0] == 2


def test_reduce(presentation):
    code, out = cli.run(["reduce", "--example", "counterexample"])
    data = json.loads(out)
    assert code == 0 and data["mono"] is False
    assert (data["source_points"], data["target_points"]) == (2, 1)
    code, out = cli.run(["reduce", "--presentation", presentation])
    assert code == 0 and json.loads(out)["discrete0"]


def test_nerve_closed_form():
    code, out = cli.run(["nerve", "--ua", "rep:[1]", "--max-p", "3"])
    data = json.loads(out)
    assert code == 0 and data["matches_closed_form"]
    assert data["config"]["bounds"] == {"max_p": 3}


def test_roundtrip_and_fuzz():
    code, out = cli.run(["roundtrip", "--count", "3"])
    assert code == 0 and json.loads(out)["failed"] == []
    code, out = cli.run(["fuzz", "--count", "3"])
    assert code == 0 and json.loads(out)["failed"] == 0


def test_fuzz_failure_is_replayable(monkeypatch):
    def broken(seed):
        out = cli._fuzz_yoneda(seed)
        return dict(out, ok=False)

    monkeypatch.setitem(cli.FUZZ, "yoneda", broken)
    code, out = cli.run(["fuzz", "--suite", "yoneda", "--count", "2"])
    data = json.loads(out)
    assert code == 1
    failure = data["suites"]["yoneda"]["failures"][0]
    from theta_calc.presheaf import presentation_from_json
    assert presentation_from_json(failure["instance"]).cells


def test_deterministic_across_threads(monkeypatch):
    argv = ["fuzz", "--count", "4", "--seed", "9"]
    monkeypatch.setenv("THETA_CALC_THREADS", "1")
    first = cli.run(argv)
    monkeypatch.setenv("THETA_CALC_THREADS", "4")
    second = cli.run(argv)
    assert first == second
    monkeypatch.setenv("THETA_CALC_THREADS", "x")
    assert cli.run(argv)[0] == 2


def test_console_script():
    exe = shutil.which("theta-calc")
    cmd = [exe] if exe else [sys.executable, "-m", "theta_calc.cli"]
    res = subprocess.run(cmd + ["hom", "--n", "1", "--src", "[*]", "--dst", "[*]"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "3"
