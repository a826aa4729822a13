import json
import subprocess
import sys

import pytest

from tnopt.cli import main
from tnopt.generators import SquareSpec, load_network, three_tensor_example, save_network, square_lattice


def run(*args):
    return subprocess.run([sys.executable, "-m", "tnopt.cli", *args],
                          capture_output=True, text=True, check=False)


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.json"
    save_network(three_tensor_example(2), path)
    return path


def test_gen(tmp_path):
    out = tmp_path / "sq.json"
    assert main(["gen", "square", "--L", "3", "--chi", "4", "--out", str(out)]) == 0
    assert load_network(out) == square_lattice(SquareSpec(3, 4))
    out = tmp_path / "er.json"
    assert main(["gen", "er", "--n", "8", "--p", "1.0", "--out", str(out)]) == 0
    assert load_network(out).n_edges == 28


@pytest.mark.parametrize("alg", ["exhaustive", "greedy", "ga", "sa"])
def test_optimize(example_file, tmp_path, alg):
    out = tmp_path / "res.json"
    rc = main(["optimize", "--alg", alg, "--net", str(example_file), "--budget", "30",
               "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["best_cost"] == 48
    assert sorted(doc["best_sequence"]) == [0, 1]


def test_optimize_time_remaining(example_file, tmp_path):
    out = tmp_path / "res.json"
    assert main(["optimize", "--alg", "sa", "--net", str(example_file), "--time-remaining",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["best_cost"] == 48


def test_optimize_guard(tmp_path, capsys):
    path = tmp_path / "big.json"
    save_network(square_lattice(SquareSpec(4, 2)), path)
    assert main(["optimize", "--alg", "exhaustive", "--net", str(path)]) == 2
    assert "guard" in capsys.readouterr().err


def test_bad_network_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"vertices": [0], "edges": [{"id": 0, "u": 0, "v": 99, "chi": 2}]}')
    assert main(["optimize", "--alg", "greedy", "--net", str(path)]) == 2
    assert "99" in capsys.readouterr().err


def test_trace(example_file, tmp_path):
    seq = tmp_path / "seq.json"
    seq.write_text('{"order": [0, 1]}')
    out = tmp_path / "trace"
    assert main(["trace", "--net", str(example_file), "--seq", str(seq),
                 "--out-dir", str(out)]) == 0
    doc = json.loads((out / "trace.json").read_text())
    assert doc["total_cost"] == 48
    seq.write_text('{"order": [0, 0]}')
    assert main(["trace", "--net", str(example_file), "--seq", str(seq),
                 "--out-dir", str(out)]) == 2


def test_verify(example_file, capsys):
    assert main(["verify", "--net", str(example_file), "--orders", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_stats(capsys, tmp_path):
    assert main(["stats", "10", "100", "1000"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["median"] == 100 and doc["log_std"] == pytest.approx(1.0)
    out = tmp_path / "sw"
    assert main(["sweep", "--sizes", "2,3", "--runs", "3", "--out-dir", str(out)]) == 0
    capsys.readouterr()
    assert main(["stats", "--file", str(out / "runs.csv")]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["algorithm"] for r in rows} == {"greedy-k2", "ga", "sa"}


def test_sweep_variable(example_file, tmp_path):
    out = tmp_path / "vb"
    assert main(["sweep", "--mode", "variable", "--net", str(example_file),
                 "--budgets", "5,20", "--out-dir", str(out)]) == 0
    lines = (out / "variable_budget.csv").read_text().splitlines()
    assert lines[0].startswith("algorithm,full_evaluations,best_cost")
    assert len(lines) == 1 + 1 + 2 + 2


def test_module_entry_point(example_file):
    proc = run("optimize", "--alg", "greedy", "--net", str(example_file))
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["best_cost"] == 48
