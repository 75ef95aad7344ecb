"""End-to-end command line checks via subprocess."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from misere.monoid import BipartiteMonoid, iso, make_r8, make_tn


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "misere.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def test_version():
    res = run_cli("--version")
    assert res.returncode == 0
    assert "misere, version 0.1.0" in res.stdout


def test_eval_text():
    res = run_cli("eval", "*2+*2")
    assert res.returncode == 0
    assert res.stdout.strip() == "P"
    res = run_cli("eval", "*", "--play", "normal")
    assert res.stdout.strip() == "N"


def test_eval_json():
    res = run_cli("eval", "*3+*5", "--play", "normal", "--out", "json")
    assert res.returncode == 0
    data = json.loads(res.stdout)
    assert data["play"] == "normal"
    assert data["outcome"] == "N"
    assert data["grundy"] == 6
    assert "game" in data
    res = run_cli("eval", "0", "--out", "json")
    data = json.loads(res.stdout)
    assert data == {"game": "0", "outcome": "N", "play": "misere"}


def test_eval_bad_notation_is_usage_error():
    res = run_cli("eval", "{0,")
    assert res.returncode == 1
    assert "error" in res.stderr.lower()


def test_quotient_verified():
    res = run_cli("quotient", "--game", "*2")
    assert res.returncode == 0
    data = json.loads(res.stdout)
    assert data["status"] == "verified"
    assert data["generators"] == ["*", "*2"]
    m = BipartiteMonoid.from_json(data["monoid"])
    assert m.labels == ("1", "a", "b", "ab", "b2", "ab2")
    assert iso(m, make_tn(2)) is not None
    assert data["phi_labels"] == ["1", "a", "b"]


def test_quotient_text_format():
    res = run_cli("quotient", "--game", "*2", "--out", "text")
    assert res.returncode == 0
    assert "verified" in res.stdout
    assert "|Q| = 6" in res.stdout


def test_quotient_undetermined_exit_two():
    res = run_cli(
        "quotient", "--game", "{0,{0,{*2}}}", "--cap-q", "8", "--cap-r", "4"
    )
    assert res.returncode == 2
    data = json.loads(res.stdout)
    assert data["status"] == "undetermined"
    assert data["monoid"] is None


def test_quotient_byte_identical_given_seed():
    a = run_cli("--seed", "7", "quotient", "--game", "{0,*2,{*2},*3}")
    b = run_cli("--seed", "7", "quotient", "--game", "{0,*2,{*2},*3}")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_quotient_cache_dir(tmp_path):
    env = {"MISERE_CACHE_DIR": str(tmp_path)}
    first = run_cli("quotient", "--game", "*2", env_extra=env)
    assert first.returncode == 0
    cached = list(tmp_path.glob("misere-*.npz"))
    assert len(cached) == 1
    second = run_cli("quotient", "--game", "*2", env_extra=env)
    assert second.returncode == 0
    assert second.stdout == first.stdout


def test_octal_grundy_tsv():
    res = run_cli("octal", "0.77", "--heaps", "8")
    assert res.returncode == 0
    rows = [line.split("\t") for line in res.stdout.splitlines()]
    assert rows == [
        ["0", "0"], ["1", "1"], ["2", "2"], ["3", "3"], ["4", "1"],
        ["5", "4"], ["6", "3"], ["7", "2"], ["8", "1"],
    ]


def test_octal_grundy_json():
    res = run_cli("octal", "0.3", "--heaps", "4", "--out", "json")
    data = json.loads(res.stdout)
    assert data == {"code": "0.3", "grundy": [0, 1, 0, 1, 0]}


def test_octal_normal_period():
    res = run_cli("octal", "0.77", "--heaps", "500", "--period")
    assert res.returncode == 0
    assert res.stdout.strip() == (
        "code 0.77: period p=12 from n0=71 (window 71..155, data to 500)"
    )
    res = run_cli("octal", "0.07", "--heaps", "500", "--period", "--out", "json")
    assert json.loads(res.stdout) == {
        "code": "0.07", "p": 34, "n0": 53, "k": 2, "window": [53, 142], "N": 500,
    }


def test_octal_normal_period_undetermined():
    res = run_cli("octal", "0.07", "--heaps", "60", "--period")
    assert res.returncode == 2
    assert "no period certified" in res.stdout


def test_octal_misere_pretending():
    res = run_cli("octal", "0.75", "--misere", "--heaps", "6")
    assert res.returncode == 0
    rows = [line.split("\t") for line in res.stdout.splitlines()]
    assert rows == [
        ["0", "0", "1"], ["1", "1", "a"], ["2", "2", "b"], ["3", "3", "a"],
        ["4", "3", "b"], ["5", "4", "c"], ["6", "5", "b"],
    ]


def test_octal_misere_period():
    res = run_cli("octal", "0.1", "--misere", "--period", "--heaps", "8", "--out", "json")
    assert res.returncode == 0
    data = json.loads(res.stdout)
    assert (data["p"], data["n0"], data["M"]) == (1, 2, 7)
    assert data["window"] == [{"n": n, "value": "1"} for n in range(2, 7)]
    assert data["monoid"]["labels"] == ["1", "a"]


def test_octal_misere_period_undetermined():
    res = run_cli("octal", "0.77", "--misere", "--period", "--heaps", "6")
    assert res.returncode == 2
    assert "no misere period certified" in res.stdout


def test_octal_usage_errors():
    assert run_cli("octal", "0.8", "--heaps", "5").returncode == 1
    assert run_cli("octal", "0.77").returncode == 1
    assert run_cli("nonsense").returncode == 1


def test_monoid_reduce(tmp_path):
    src = tmp_path / "m.json"
    big = make_tn(2)
    src.write_text(json.dumps(big.to_json()))
    res = run_cli("monoid", "reduce", "--in", str(src))
    assert res.returncode == 0
    data = json.loads(res.stdout)
    projection = data.pop("projection")
    red = BipartiteMonoid.from_json(data)
    assert red.size == 6
    assert projection == list(range(6))


def test_monoid_report(tmp_path):
    src = tmp_path / "r8.json"
    src.write_text(json.dumps(make_r8().to_json()))
    res = run_cli("monoid", "report", "--in", str(src), "--out", "json")
    assert res.returncode == 0
    data = json.loads(res.stdout)
    assert data["idempotents"] == [0, 4]
    assert data["kernel"] == [2, 3, 4, 5]
    assert data["kernel_type"] == [2, 2]
    assert data["is_normal"] and data["is_regular"]
    text = run_cli("monoid", "report", "--in", str(src))
    assert "size 8" in text.stdout


def test_monoid_iso(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(json.dumps(make_tn(2).to_json()))
    perm = np.array([3, 0, 5, 2, 4, 1])
    t2 = make_tn(2)
    table = np.empty_like(t2.table)
    for x in range(6):
        for y in range(6):
            table[perm[x], perm[y]] = perm[t2.table[x, y]]
    shuffled = BipartiteMonoid(table, {int(perm[i]) for i in t2.p_set})
    b.write_text(json.dumps(shuffled.to_json()))
    res = run_cli("monoid", "iso", "--in", str(a), "--in2", str(b))
    assert res.returncode == 0
    data = json.loads(res.stdout)
    assert data["isomorphic"] is True
    assert len(data["mapping"]) == 6

    c = tmp_path / "c.json"
    c.write_text(json.dumps(make_r8().to_json()))
    res = run_cli("monoid", "iso", "--in", str(a), "--in2", str(c))
    assert res.returncode == 2
    assert json.loads(res.stdout) == {"isomorphic": False, "mapping": None}
