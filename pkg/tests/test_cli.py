import json
import subprocess
import sys

import pytest

from galcasimir.cli import main
from galcasimir.invariants import InvariantSet, generator_set


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_text_n1(capsys):
    code, out, _ = run(capsys, "gen", "--n", "1", "--format", "text")
    assert code == 0 and out == "Q1 = X_1^2\n"


def test_gen_json_round_trip(capsys):
    code, out, _ = run(capsys, "gen", "--n", "5", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "v1"
    assert InvariantSet.from_json(data) == generator_set(5)
    assert json.dumps(InvariantSet.from_json(data).to_json(), indent=2) + "\n" == out


def test_gen_n3_two_polys(capsys):
    code, out, _ = run(capsys, "gen", "--n", "3")
    assert code == 0 and len(json.loads(out)["generators"]) == 2
    code, out, _ = run(capsys, "gen", "--n", "3", "--format", "latex")
    assert code == 0 and out.count("Q_{") == 2


@pytest.mark.parametrize("n", ["0", "13", "10"])
def test_gen_range(capsys, n):
    code, _, err = run(capsys, "gen", "--n", n)
    assert code == 2 and err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--n", "2", "--bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_verify_n2_seed7(capsys):
    code, out1, _ = run(capsys, "verify", "--n", "2", "--seed", "7", "--json")
    assert code == 0
    code, out2, _ = run(capsys, "verify", "--n", "2", "--seed", "7", "--json")
    assert out1 == out2 and json.loads(out1)["passed"]
    code, text, _ = run(capsys, "verify", "--n", "2", "--seed", "7", "--trials", "5")
    assert code == 0 and "all checks passed" in text


def test_verify_range_and_flags(capsys):
    assert run(capsys, "verify", "--n", "9")[0] == 2
    assert run(capsys, "verify", "--n", "2", "--trials", "0")[0] == 2
    assert run(capsys, "verify", "--n", "3", "--force-centrality-n4")[0] == 2


def write(tmp_path, obj, name="dual.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_reduce_fixture(capsys, tmp_path):
    f = write(tmp_path, {"n": 2, "Kstar": [[0, 0], [0, 0]], "vstar": [4, 3], "xstar": [3, 4], "tstar": 1})
    code, out, _ = run(capsys, "reduce", "--input", f)
    data = json.loads(out)
    assert code == 0 and data["schema"] == "v1"
    assert data["A"] == pytest.approx(5.0, rel=1e-12)
    assert data["B"] == pytest.approx(1.4, rel=1e-12)
    assert data["degenerate"] is False
    assert data["invariants_before"] == pytest.approx([25.0, 49.0])
    assert data["invariants_after"] == pytest.approx([25.0, 49.0])
    assert data["residual"] < 1e-12
    assert [s["step"] for s in data["trace"]] == ["rotation", "time-shift", "boost-translation"]


def test_reduce_transversal(capsys, tmp_path):
    K = [[0] * 4 for _ in range(4)]
    K[2][3], K[3][2] = 5, -5
    f = write(tmp_path, {"n": 4, "Kstar": K, "vstar": [0, 3, 0, 0], "xstar": [2, 0, 0, 0], "tstar": 0})
    code, out, _ = run(capsys, "reduce", "--input", f)
    data = json.loads(out)
    assert code == 0 and data["residual"] == 0.0 and data["thetas"] == [5.0]
    for step in data["trace"]:
        m = step["matrix"]
        assert all(m[i][j] == (1.0 if i == j else 0.0) for i in range(6) for j in range(6))
    assert data["invariants_before"] == [4.0, 36.0, 900.0]


def test_reduce_degenerate(capsys, tmp_path):
    f = write(tmp_path, {"n": 2, "Kstar": [[0, 0], [0, 0]], "vstar": [1, 1], "xstar": [0, 0], "tstar": 0})
    code, out, _ = run(capsys, "reduce", "--input", f)
    data = json.loads(out)
    assert code == 0 and data["degenerate"] and data["residual"] is None


def test_reduce_bad_input(capsys, tmp_path):
    assert run(capsys, "reduce", "--input", write(tmp_path, "{not json"))[0] == 2
    assert run(capsys, "reduce", "--input", write(tmp_path, {"n": 2}))[0] == 2
    assert run(capsys, "reduce", "--input", str(tmp_path / "missing.json"))[0] == 2
    good = write(tmp_path, {"n": 1, "Kstar": [[0]], "vstar": [0], "xstar": [1], "tstar": 0})
    assert run(capsys, "reduce", "--input", good, "--tol", "0")[0] == 2


def test_center(capsys):
    code, out, _ = run(capsys, "center", "--n", "1")
    data = json.loads(out)
    assert code == 0 and len(data["elements"]) == 1
    assert data["elements"][0]["central"] and data["elements"][0]["terms"] == [{"coeff": "1", "pbw": [0, 2, 0]}]
    code, out, _ = run(capsys, "center", "--n", "2", "--max-degree", "2")
    assert [e["name"] for e in json.loads(out)["elements"]] == ["Q1"]
    code, out, _ = run(capsys, "center", "--n", "3")
    els = json.loads(out)["elements"]
    assert code == 0 and len(els) == 2 and all(e["central"] for e in els)
    code, _, err = run(capsys, "center", "--n", "5")
    assert code == 2 and "capped at n=4" in err


def test_structure(capsys):
    code, out, _ = run(capsys, "structure", "--n", "1")
    data = json.loads(out)
    assert code == 0
    assert {(c["a"], c["b"], c["c"], c["coeff"]) for c in data["constants"]} == {
        ("B(1)", "H", "P(1)", "1"),
        ("H", "B(1)", "P(1)", "-1"),
    }
    code, out, _ = run(capsys, "structure", "--n", "2")
    consts = json.loads(out)["constants"]
    table = {(c["a"], c["b"], c["c"]): c["coeff"] for c in consts}
    assert ("E(1,2)", "P(1)", "P(2)") in table
    for (a, b, c), x in table.items():
        assert table[(b, a, c)] == (x[1:] if x.startswith("-") else "-" + x)
    assert run(capsys, "structure", "--n", "13")[0] == 2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "galcasimir", "gen", "--n", "2", "--format", "text"],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.startswith("Q1 = ")
    ver = subprocess.run([sys.executable, "-m", "galcasimir", "--version"], capture_output=True, text=True)
    assert ver.returncode == 0 and "0.1.0" in ver.stdout
