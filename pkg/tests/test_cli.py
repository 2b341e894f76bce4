import json
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from spreadhom import io
from spreadhom.cli import main
from spreadhom.poset import FinitePoset, GridPoset, grid
from spreadhom.rep import random_module, simple


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@given(st.integers(0, 10**6))
def test_module_roundtrip(seed):
    M = random_module(grid(3, 3), 3, 2, seed)
    d = io.module_to_json(M)
    assert io.module_from_json(json.loads(io.dumps(d))) == M


def test_finite_poset_roundtrip():
    P = FinitePoset(["a", "b", "c"], [("a", "b"), ("a", "c")])
    assert io.poset_from_json(io.poset_to_json(P)) == P
    M = simple(P, "b")
    assert io.module_from_json(io.module_to_json(M)) == M
    G = GridPoset([[1, 3], [0, 2]])
    assert io.poset_from_json(io.poset_to_json(G)) == G


def test_bad_inputs():
    with pytest.raises(io.FormatError):
        io.poset_from_json({"kind": "torus"})
    P = grid(2, 2)
    with pytest.raises(io.FormatError):
        io.module_from_json({"dims": {"(0,0)": 1, "(1,1)": 1}, "maps": {"(0,0)->(1,1)": [[1]]}}, P)
    with pytest.raises(io.FormatError):
        io.module_from_json({"dims": {"(5,5)": 1}}, P)


def test_hom_command(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"kind": "grid", "sizes": [3, 3]})
    s = write(tmp_path, "s.json", {"A": [[1, 1]], "B": [[2, 2]]})
    t = write(tmp_path, "t.json", {"A": [[0, 0]], "B": [[1, 2]]})
    code, out = run(capsys, "hom", "--poset", g, "--spread1", s, "--spread2", t)
    assert code == 0
    assert json.loads(out) == {"dim": 1, "witnesses": [[[1, 1], [2, 1]]]}


def test_resolve_and_truncation(tmp_path, capsys):
    m = write(tmp_path, "m.json", io.module_to_json(simple(grid(3, 3), (0, 0))))
    code, out = run(capsys, "resolve", "--family", "projectives", "--module", m)
    assert code == 0
    body = json.loads(out)
    assert body["length"] == 2 and body["complete"]
    assert len(body["signed_decomposition"]["minus"]) == 2
    code, out = run(capsys, "resolve", "--family", "projectives", "--module", m, "--max-len", "1")
    assert code == 3 and json.loads(out)["error"] == "truncated"


def test_invariants(tmp_path, capsys):
    M = random_module(grid(2, 2), 2, 1, 3)
    m = write(tmp_path, "m.json", io.module_to_json(M))
    code, out = run(capsys, "invariant", "--which", "dim", "--module", m)
    assert code == 0 and json.loads(out)["dims"]["(1,1)"] == M.dim((1, 1))
    code, out = run(capsys, "invariant", "--which", "rank", "--module", m)
    assert code == 0 and "(0,0)->(1,1)" in json.loads(out)["rank"]
    code, out = run(capsys, "invariant", "--which", "dimhom", "--family", "hooks", "--module", m)
    assert code == 0 and len(json.loads(out)["dims"]) == 9
    code, out = run(capsys, "invariant", "--which", "barcode", "--module", m)
    assert code == 2


def test_quiver_and_koszul(capsys, tmp_path):
    g = write(tmp_path, "g.json", {"kind": "grid", "sizes": [2, 2]})
    code, out = run(capsys, "quiver", "--family", "upsets", "--poset", g)
    assert code == 0 and out.startswith("digraph")
    code, out = run(capsys, "koszul", "--n", "3")
    body = json.loads(out)
    assert code == 0 and body["exact"] and len(body["differentials"]) == 3


def test_functor_and_families(tmp_path, capsys):
    M = random_module(grid(3, 3), 2, 1, 8)
    m = write(tmp_path, "m.json", io.module_to_json(M))
    q = write(tmp_path, "q.json", {"kind": "grid", "axes": [[0, 2], [0, 2]]})
    code, out = run(capsys, "functor", "--op", "restrict", "--grid", q, "--module", m)
    assert code == 0
    R = io.module_from_json(json.loads(out))
    assert R.dims == tuple(M.dim(y) for y in [(0, 0), (0, 2), (2, 0), (2, 2)])
    target = write(tmp_path, "b.json", {"kind": "grid", "sizes": [3, 3]})
    code, out = run(capsys, "functor", "--op", "extend", "--grid", q, "--module", m, "--target", target)
    assert code == 2
    grids = write(tmp_path, "grids.json", {"bound": {"kind": "grid", "axes": [[1, 2], [1, 2]]},
                                           "grids": [{"kind": "grid", "axes": [[1, 2], [1, 2]]},
                                                     {"kind": "grid", "axes": [[2], [1, 2]]}]})
    code, out = run(capsys, "check-family", "--grids", grids, "--family", "fp_upsets")
    assert code == 0 and json.loads(out)["first_violation"]["condition"] == 5
    g = write(tmp_path, "g4.json", {"kind": "grid", "sizes": [4, 4]})
    code, out = run(capsys, "probe-precover", "--poset", g, "--r", "0", "--s", "2", "--t", "1")
    assert code == 0 and json.loads(out)["chain_length"] == 3


def test_extend_command(tmp_path, capsys):
    q = GridPoset([[0, 2], [0, 2]])
    N = random_module(q, 2, 1, 4)
    n = write(tmp_path, "n.json", io.module_to_json(N))
    qf = write(tmp_path, "q.json", io.poset_to_json(q))
    target = write(tmp_path, "b.json", {"kind": "grid", "sizes": [3, 3]})
    code, out = run(capsys, "functor", "--op", "extend", "--grid", qf, "--module", n, "--target", target)
    assert code == 0
    E = io.module_from_json(json.loads(out))
    assert E.dim((1, 1)) == N.dim((0, 0))


def test_errors_are_json(tmp_path, capsys):
    code, out = run(capsys, "--prime", "12", "koszul")
    assert code == 2 and json.loads(out)["error"] == "FieldError"
    code, out = run(capsys, "hom", "--poset", str(tmp_path / "missing.json"), "--spread1", "x", "--spread2", "y")
    assert code == 2 and "message" in json.loads(out)
    code, out = run(capsys, "resolve", "--family", "nope", "--module", "m")
    assert code == 2
    bad = write(tmp_path, "bad.json", {"A": [[0, 2], [2, 0]], "B": [[1, 2], [2, 1]]})
    g = write(tmp_path, "g.json", {"kind": "grid", "sizes": [3, 3]})
    code, out = run(capsys, "hom", "--poset", g, "--spread1", bad, "--spread2", bad)
    assert code == 2 and json.loads(out)["error"] == "NotASpread"


def test_deterministic_output(tmp_path):
    M = random_module(grid(3, 3), 3, 2, 2)
    m = write(tmp_path, "m.json", io.module_to_json(M))
    cmd = [sys.executable, "-m", "spreadhom", "resolve", "--family", "hooks", "--module", m]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout


def test_env_prime(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPREADHOM_PRIME", "7")
    code, out = run(capsys, "koszul", "--n", "2")
    assert code == 0
    monkeypatch.setenv("SPREADHOM_PRIME", "8")
    code, out = run(capsys, "koszul", "--n", "2")
    assert code == 2
