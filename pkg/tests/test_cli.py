import json
import math
import subprocess
import sys

import numpy as np
import pytest

from elotope import io
from elotope.cli import main, parse_grid
from elotope.game import AdvantageMatrix, PayoffMatrix, SelectionMatrix, uniform_selection
from elotope.hodge import grad

from .conftest import CYCLIC, LN3, payoff_of

TWO = PayoffMatrix([[0.5, 0.75], [0.25, 0.5]])


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, matrix):
        path = tmp_path / name
        io.save_matrix(path, matrix)
        paths[name] = path
        return path

    put("zero_adv.json", AdvantageMatrix(np.zeros((3, 3))))
    put("cyclic_adv.json", AdvantageMatrix(CYCLIC))
    put("two.json", TWO)
    put("q2.json", uniform_selection(2))
    put("q3.json", uniform_selection(3))
    put("even3.json", payoff_of(np.zeros((3, 3))))
    put("cycle3.json", payoff_of(LN3 * CYCLIC))
    put("stacm4.json", payoff_of(grad([0.3, -1.0, 0.9, 0.0])))
    skew = np.triu(np.ones((6, 6)), 1)
    put("p6.json", payoff_of(0.3 * grad(np.arange(6.0)) + 0.5 * (skew - skew.T)))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    paths["bad.json"] = bad
    return paths


def test_parse_grid():
    assert parse_grid("0:0.05:0.95") == [round(0.05 * k, 12) for k in range(20)]
    assert parse_grid("0") == [0.0]
    assert parse_grid("0,0.5,0.8") == [0.0, 0.5, 0.8]


def test_matrix_round_trip(tmp_path, rng):
    a = rng.normal(size=(5, 5))
    a = a - a.T
    for matrix in (AdvantageMatrix(a), uniform_selection(4),
                   PayoffMatrix(1 / (1 + np.exp(-a)))):
        path = tmp_path / "m.json"
        io.save_matrix(path, matrix)
        back = io.load_matrix(path)
        assert type(back) is type(matrix)
        values = {PayoffMatrix: "probs", AdvantageMatrix: "values", SelectionMatrix: "weights"}[type(matrix)]
        np.testing.assert_array_equal(getattr(back, values), getattr(matrix, values))


def test_decompose(capsys, files):
    code, out, _ = run(capsys, "decompose", files["zero_adv.json"])
    doc = json.loads(out)
    assert code == 0 and doc["is_stacm"] is True
    assert doc["transitive_norm"] == 0 and doc["cyclic_norm"] == 0
    code, out, _ = run(capsys, "decompose", files["cyclic_adv.json"])
    assert json.loads(out)["cyclic_norm"] == pytest.approx(math.sqrt(6), abs=1e-12)
    code, _, err = run(capsys, "decompose", files["bad.json"])
    assert code == 2 and "malformed JSON" in err
    code, _, err = run(capsys, "decompose", files["two.json"])
    assert code == 2 and "expected kind advantage" in err


def test_decompose_rejects_non_skew(capsys, tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"dim": 2, "kind": "advantage", "rows": [[0, 1], [1, 0]]}))
    code, _, err = run(capsys, "decompose", path)
    assert code == 2 and "skew" in err
    path.write_text(json.dumps({"dim": 3, "kind": "advantage", "rows": [[0, 1], [-1, 0]]}))
    code, _, err = run(capsys, "decompose", path)
    assert code == 2 and "3x3" in err


def test_solve(capsys, files):
    code, out, _ = run(capsys, "solve", files["two.json"], files["q2.json"])
    doc = json.loads(out)
    assert code == 0 and doc["converged"]
    assert doc["solution"] == pytest.approx([0.5493061443, -0.5493061443], abs=1e-9)
    code, out, _ = run(capsys, "solve", files["even3.json"], "uniform")
    doc = json.loads(out)
    assert doc["solution"] == [0.0, 0.0, 0.0] and doc["iterations"] <= 1
    code, _, err = run(capsys, "solve", files["two.json"], files["q3.json"])
    assert code == 2 and "mismatch" in err


def test_solve_nonconvergence_exit_3(capsys, files):
    code, out, err = run(capsys, "solve", files["p6.json"], "uniform", "--tol", "1e-40", "--max-iter", "1")
    assert code == 3
    assert json.loads(out)["converged"] is False


def test_simulate(capsys, files, tmp_path):
    traj, matches = tmp_path / "t.csv", tmp_path / "m.csv"
    code, _, _ = run(capsys, "simulate", files["two.json"], files["q2.json"], "--steps", "0",
                     "--out-trajectory", traj, "--out-matches", matches)
    assert code == 0
    assert traj.read_text() == "step,r_0,r_1\n0,0.0,0.0\n"
    assert matches.read_text() == "sequence,i,j,winner\n"

    outs = []
    for k in range(2):
        t, mm = tmp_path / f"t{k}.csv", tmp_path / f"m{k}.csv"
        run(capsys, "simulate", files["p6.json"], "uniform", "--steps", "2000", "--seed", "4",
            "--stride", "10", "--out-trajectory", t, "--out-matches", mm)
        outs.append((t.read_bytes(), mm.read_bytes()))
    assert outs[0] == outs[1]
    rows = outs[0][0].decode().splitlines()
    assert len(rows) == 202 and rows[0] == "step,r_0,r_1,r_2,r_3,r_4,r_5"
    assert len(io.read_match_log(tmp_path / "m0.csv")) == 2000


def test_simulate_long_run_gap(capsys, files, tmp_path):
    t = tmp_path / "t.csv"
    run(capsys, "simulate", files["two.json"], files["q2.json"], "--steps", "200000", "--eta", "0.02",
        "--seed", "1", "--out-trajectory", t)
    data = np.loadtxt(t, delimiter=",", skiprows=1)
    gap = data[100_001:, 1] - data[100_001:, 2]
    assert abs(gap.mean() - LN3) < 0.1


def test_elotope(capsys, files, tmp_path):
    code, out, _ = run(capsys, "elotope", files["stacm4.json"], "--trees", "16", "--random-q", "4")
    rows = np.array([[float(x) for x in line.split(",")[1:]] for line in out.splitlines()[1:]])
    assert code == 0 and len(rows) == 20
    assert np.max(np.abs(rows - rows[0])) < 1e-8

    code, out, _ = run(capsys, "elotope", files["cycle3.json"], "--trees", "3")
    rows = {line.split(",", 1)[1] for line in out.splitlines()[1:]}
    assert len(rows) >= 2

    dest = tmp_path / "e.csv"
    code, _, _ = run(capsys, "elotope", files["cycle3.json"], "--trees", "0", "--random-q", "0", "--out", dest)
    assert dest.read_text() == "source,r_0,r_1,r_2\n"


def test_measure_matrix(capsys, files):
    code, out, _ = run(capsys, "measure", files["zero_adv.json"])
    doc = json.loads(out)
    assert code == 0 and doc["measure"] == 1.0 and doc["classification"] == "balanced"
    code, out, _ = run(capsys, "measure", files["cyclic_adv.json"])
    assert json.loads(out)["measure"] == pytest.approx(1 + math.sqrt(6), abs=1e-12)
    code, out, _ = run(capsys, "measure", files["cycle3.json"])  # payoff files are converted
    assert json.loads(out)["classification"] == "effectively_intransitive"


def test_measure_match_log(capsys, tmp_path):
    log = tmp_path / "log.csv"
    log.write_text("sequence,i,j,winner\n0,0,1,0\n1,0,2,2\n2,1,2,1\n")
    code, out, _ = run(capsys, "measure", log)
    assert code == 0 and json.loads(out)["measure"] > 0
    log.write_text("sequence,i,j,winner\n0,0,1,0\n1,0,2,2\n")
    code, _, err = run(capsys, "measure", log, "--players", "3")
    assert code == 2 and "(1,2)" in err
    log.write_text("sequence,i,j,winner\n1,0,1,0\n1,0,2,2\n")
    code, _, err = run(capsys, "measure", log)
    assert code == 2 and "strictly increase" in err
    log.write_text("sequence,i,j,winner\n0,0,1,2\n")
    code, _, err = run(capsys, "measure", log)
    assert code == 2 and "neither" in err
    log.write_text("seq,a,b\n")
    code, _, err = run(capsys, "measure", log)
    assert code == 2 and "header" in err


def test_experiment_truth_only(capsys):
    code, out, _ = run(capsys, "experiment", "--family", "rps", "--t-grid", "0", "--truth-only")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "family,t,i_truth" and len(lines) == 2
    assert float(lines[1].split(",")[2]) == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run(capsys, "experiment", "--family", "rs", "--t-grid", "0:0.05:0.95", "--truth-only")
    values = [float(line.split(",")[2]) for line in out.splitlines()[1:]]
    assert len(values) == 20 and all(v <= 1 for v in values) and all(v < 1 for v in values[1:])


def test_experiment_table(capsys, tmp_path):
    outs = []
    for k in range(2):
        dest = tmp_path / f"x{k}.csv"
        code, _, _ = run(capsys, "experiment", "--family", "rs", "--t-grid", "0,0.5", "--games", "10,100",
                         "--trials", "2", "--seed", "3", "--out", dest)
        assert code == 0
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert lines[0] == "family,t,games_per_pair,trial,i_truth,i_hat" and len(lines) == 9


@pytest.mark.parametrize("argv", [
    ["experiment", "--family", "rps", "--t-grid", "0:x:1"],
    ["experiment", "--family", "rps", "--t-grid", "1.0", "--truth-only"],
    ["experiment", "--family", "nope"],
    ["experiment", "--family", "rs", "--games", "0"],
    ["solve", "/nonexistent.json", "uniform"],
])
def test_bad_flags_exit_2(capsys, argv):
    # argparse itself exits with status 2 on unknown choices
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "elotope", "measure", str(files["zero_adv.json"])],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["measure"] == 1.0
    proc = subprocess.run([sys.executable, "-m", "elotope", "decompose", str(files["bad.json"])],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_atomic_write_leaves_no_temp(tmp_path):
    io.atomic_write(tmp_path / "a.txt", "hello")
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]
