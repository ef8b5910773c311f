import io
import json
import subprocess
from fractions import Fraction
import sys

import pytest

from polyem import checks
from polyem.cli import main, merofun_from_json
from polyem.exactmath import field_for
from polyem.genfun import canonical_equal, s_of
from polyem.geometry import Polytope

UNIT = json.dumps({"vertices": [[0, 0], [1, 0], [0, 1]]})
SECOND = json.dumps({"vertices": [[0, 0], [2, 0], [0, 1]]})
K0 = json.dumps({"apex": [0, 0], "generators": [[1, 0], [0, 1]]})
FLAG = json.dumps({"kind": "flag", "vectors": [["d1", "d2"], [1, 0]], "parameters": ["d1", "d2"]})


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_count_prints_total_and_face_table(capsys):
    code, out, _ = run(capsys, "count", "--polytope", SECOND)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "4"
    assert lines[1].split() == ["dim", "vertices", "mu(0)", "volume", "contribution"]
    vertex_rows = [l.split("  ")[0] for l in lines[3:6]]
    assert vertex_rows == ["0"] * 3
    constants = {l.split()[-3] for l in lines[3:6]}
    assert constants == {"1/4", "9/20", "3/10"}


def test_symbolic_constant_term(capsys):
    code, out, _ = run(capsys, "mu", "--cone", K0, "--cmap", FLAG, "--constant-term")
    assert code == 0 and out.strip() == "(d1^2 + 3*d1*d2 + d2^2)/(12*d1*d2)"


def test_verify_interpolator_echoes_the_finite_sum(capsys):
    code, out, _ = run(capsys, "verify", "--polytope", UNIT, "--cmap", FLAG, "--identity", "interpolator")
    assert code == 0
    assert out.strip() == "PASS  interpolator: S = 1 + exp(xi2) + exp(xi1)"


def test_verify_runs_everything_that_applies(capsys):
    code, out, _ = run(capsys, "verify", "--cone", json.dumps({"apex": [0, 0], "generators": [[1, 0], [1, 2]]}))
    names = [line.split()[1].rstrip(":") for line in out.splitlines()]
    assert code == 0 and all(line.startswith("PASS") for line in out.splitlines())
    assert "morelli" in names and "residue" in names and "halfopen" in names


def test_verify_failure_exits_with_one(capsys, monkeypatch):
    monkeypatch.setattr(checks, "check_brion", lambda cmap, P, cache: checks.Check("brion", False, "forced", "1"))
    code, out, _ = run(capsys, "verify", "--polytope", UNIT, "--identity", "brion")
    assert code == 1 and out.strip() == "FAIL  brion: forced [difference: 1]"


def test_files_and_stdin(capsys, tmp_path, monkeypatch):
    path = tmp_path / "tri.json"
    path.write_text(SECOND)
    assert run(capsys, "count", "--polytope", str(path))[1].splitlines()[0] == "4"
    monkeypatch.setattr(sys, "stdin", io.StringIO(SECOND))
    assert run(capsys, "count", "--polytope", "-")[1].splitlines()[0] == "4"


def test_sum_integrate_volume(capsys):
    assert run(capsys, "sum", "--polytope", SECOND, "--poly", "x1^2 + x2")[1].splitlines()[0] == "6"
    assert run(capsys, "integrate", "--polytope", UNIT, "--poly", "x1*x2", "--mode", "nu")[1].splitlines()[0] == "1/24"
    assert run(capsys, "volume", "--polytope", UNIT)[1].splitlines()[0] == "1/2"


def test_taylor_listing(capsys):
    code, out, _ = run(capsys, "mu", "--cone", K0, "--cmap", FLAG, "--order", "1")
    assert "  xi1: -1/24" in out.splitlines() and "  xi2: -1/24" in out.splitlines()


def test_json_round_trip(capsys):
    code, out, _ = run(capsys, "expand", "--polytope", SECOND, "--format", "json")
    data = json.loads(out)
    assert data["command"] == "expand"
    f = merofun_from_json(data["S"])
    assert canonical_equal(f, s_of(Polytope([(0, 0), (2, 0), (0, 1)])))
    _, out, _ = run(capsys, "mu", "--cone", K0, "--cmap", FLAG, "--format", "json")
    g = merofun_from_json(json.loads(out)["function"])
    assert g.field.parameters == ("d1", "d2")


def test_json_scalars_are_strings(capsys):
    _, out, _ = run(capsys, "count", "--polytope", SECOND, "--format", "json")
    data = json.loads(out)
    assert data["count"] == "4"
    assert sorted(field_for([])(row["constant"]) for row in data["faces"] if row["dim"] == 0) == [Fraction(1, 4), Fraction(3, 10), Fraction(9, 20)]
    assert all(isinstance(row["constant"], str) for row in data["faces"])


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--polytope", '{"vertices": [[0, 0], [0.5, 0], [0, 1]]}'],
        ["count", "--polytope", '{"vertices": [[0, 0, 0, 0, 0]]}'],
        ["count", "--polytope", "{not json"],
        ["mu", "--cone", K0, "--cmap", '{"kind": "flag", "vectors": [["e", 1], [1, 0]], "parameters": ["d"]}'],
        ["sum", "--polytope", UNIT],
    ],
)
def test_input_errors_exit_with_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("polyem: error:")


@pytest.mark.parametrize("argv", [["mu", "--cone", K0, "--order", "-1"], ["count", "--cone", K0], ["bogus"]])
def test_argparse_errors_exit_with_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_genericity_failure_exits_with_three(capsys):
    bad = json.dumps({"kind": "flag", "vectors": [[1, 1], [1, 0]]})
    code, _, err = run(capsys, "count", "--polytope", json.dumps({"vertices": [[0, 0], [1, 1], [2, 0]]}), "--cmap", bad)
    assert code == 3 and "face" in err


def test_size_guard_exits_with_four(capsys, monkeypatch):
    monkeypatch.setenv("POLYEM_MAX_ENUM", "2")
    code, _, err = run(capsys, "verify", "--polytope", SECOND, "--identity", "brion")
    assert code == 4


def test_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "polyem", "mu", "--cone", K0, "--cmap", FLAG, "--order", "2", "--format", "json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True, env={"PYTHONHASHSEED": "123", "PATH": ""}).stdout
    assert first == second
