import json
import subprocess
import sys

import numpy as np
import pytest

from graphhomotopy import cli, io
from graphhomotopy.estimation import sample_gaussian
from graphhomotopy.fixtures import BRIDGE_OMEGA, WORKED_OMEGA, worked_example


@pytest.fixture
def files(tmp_path):
    (tmp_path / "omega.csv").write_text(io.format_csv(WORKED_OMEGA))
    (tmp_path / "bridge.csv").write_text(io.format_csv(BRIDGE_OMEGA))
    (tmp_path / "part.json").write_text("[[1], [2, 3], [4]]")
    return tmp_path


def _run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------- demo

def test_demo_contents(tmp_path, capsys):
    code, out, _ = _run(["demo", "--out", tmp_path], capsys)
    assert code == cli.EXIT_OK
    assert "Omega_Y (recomputed)" in out and "as originally printed" in out
    assert "[mean] verdict: Homotopic" in out and "verdict: NotHomotopic" in out
    report = json.loads((tmp_path / "demo.json").read_text())
    assert np.allclose(report["mean"]["omega_y"], [[1, 1, 0], [1, 3, 1], [0, 1, 1]], atol=1e-10)
    assert report["mean"]["omega_y_as_originally_printed"] == [[1.0, 1.0, -1.0], [1.0, 3.0, -2.0],
                                                               [-1.0, -2.0, 2.0]]
    assert report["mean"]["verdict"]["status"] == "Homotopic"
    assert abs(report["asymmetric_bridge"]["omega_y_13"] - 1 / 12) <= 1e-10
    assert report["asymmetric_bridge"]["verdict"]["spurious_edges"] == [[1, 3]]
    assert (tmp_path / "demo.txt").read_text() == out


# ------------------------------------------------------------------- analyze

def test_analyze_worked_is_homotopic(files, capsys):
    code, out, _ = _run(["analyze", files / "omega.csv", files / "part.json", "--method", "mean",
                         "--out", files / "o"], capsys)
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report["verdict"]["status"] == "Homotopic" and report["e_c"] == [[1, 2], [2, 3]]
    assert (files / "o" / "e_c.dot").read_text().startswith("graph E_C {")


def test_analyze_bridge_not_homotopic(files, capsys):
    code, out, _ = _run(["analyze", files / "bridge.csv", files / "part.json", "--emit-matrices"], capsys)
    assert code == cli.EXIT_NOT
    report = json.loads(out)
    assert report["verdict"]["spurious_edges"] == [[1, 3]]
    assert abs(report["matrices"]["omega_y"][0][2] - 1 / 12) <= 1e-10


def test_analyze_weak_exit(tmp_path, capsys):
    # only the larger-variance coordinates are coupled; the second components miss them
    omega = np.eye(4)
    omega[1, 3] = omega[3, 1] = 0.3
    (tmp_path / "o.csv").write_text(io.format_csv(omega))
    (tmp_path / "p.json").write_text("[[1, 2], [3, 4]]")
    code, out, _ = _run(["analyze", tmp_path / "o.csv", tmp_path / "p.json", "--method", "pca",
                         "--component", "2,2"], capsys)
    report = json.loads(out)
    assert code == cli.EXIT_WEAK and report["verdict"]["missing_edges"] == [[1, 2]]


def test_analyze_sigma_kind_and_marginal(files, capsys):
    (files / "sigma.csv").write_text(io.format_csv(worked_example().sigma.values))
    code, out, _ = _run(["analyze", files / "sigma.csv", files / "part.json", "--kind", "sigma",
                         "--graph", "marginal", "--method", "pca"], capsys)
    assert code == cli.EXIT_OK and json.loads(out)["e_c"] == [[1, 2], [1, 3], [2, 3]]


@pytest.mark.parametrize("content,needle", [
    ("1,0.5\n0.5,x\n", "line 2, column 2"),
    ("1,2\n2,1\n", "NotPositiveDefinite"),
])
def test_analyze_input_errors(tmp_path, capsys, content, needle):
    (tmp_path / "m.csv").write_text(content)
    (tmp_path / "p.json").write_text("[[1], [2]]")
    code, _, err = _run(["analyze", tmp_path / "m.csv", tmp_path / "p.json"], capsys)
    assert code == cli.EXIT_ERROR and needle in err


def test_analyze_dimension_mismatch_and_sample_only_method(files, capsys):
    (files / "p2.json").write_text("[[1], [2]]")
    assert _run(["analyze", files / "omega.csv", files / "p2.json"], capsys)[0] == cli.EXIT_ERROR
    code, _, err = _run(["analyze", files / "omega.csv", files / "part.json", "--method", "median"], capsys)
    assert code == cli.EXIT_ERROR and "sample-only" in err


# ------------------------------------------------------------------ simulate

def test_simulate_spectral_chord(tmp_path, capsys):
    code, out, _ = _run(["simulate", "spectral-chord", "--trials", 20, "--seed", 1, "--out", tmp_path], capsys)
    assert code == cli.EXIT_OK and json.loads(out)["failures"] == 0
    rows = (tmp_path / "trials.csv").read_text().splitlines()
    assert len(rows) == 21 and all(len(r.split(",")) == 6 for r in rows)


def test_simulate_latent_rotation_random_and_independent(capsys):
    code, out, _ = _run(["simulate", "latent-rotation", "--trials", 20, "--seed", 1], capsys)
    report = json.loads(out)
    assert code == cli.EXIT_OK and report["trials_with_non_identical_indices"] > 0
    code, out, _ = _run(["simulate", "latent-rotation", "--trials", 20, "--seed", 1,
                         "--eigen-index", "independent"], capsys)
    assert code == cli.EXIT_ERROR and json.loads(out)["failures"] > 0


def test_simulate_parameter_errors(tmp_path, capsys):
    assert _run(["simulate", "spectral-chord", "--trials", 0, "--seed", 1], capsys)[0] == cli.EXIT_ERROR
    assert _run(["simulate", "table1-style", "--seed", 1], capsys)[0] == cli.EXIT_ERROR
    code = _run(["simulate", "table1-style", "--seed", 1, "--methods", "mean,ica", "--out", tmp_path], capsys)[0]
    assert code == cli.EXIT_ERROR
    with pytest.raises(SystemExit):
        cli.main(["simulate", "spectral-chord"])


def test_simulate_table1_style_baseline(tmp_path, capsys):
    code, out, _ = _run(["simulate", "table1-style", "--n", 2000, "--seed", 13, "--out", tmp_path], capsys)
    assert code == cli.EXIT_OK
    summary = json.loads(out)["summary"]
    # frozen at seed 13
    assert summary["conditional"]["rates"] == [[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    assert summary["marginal"]["rates"] == [[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    for kind in ("conditional", "marginal"):
        rows = (tmp_path / f"discrepancy_{kind}.csv").read_text().splitlines()
        assert rows[0] == "method,median,pca,factor" and len(rows) == 4


# ------------------------------------------------------------------ estimate

@pytest.fixture(scope="module")
def worked_csv(tmp_path_factory):
    d = tmp_path_factory.mktemp("est")
    x = sample_gaussian(worked_example().sigma, 4000, seed=3).values
    (d / "x.csv").write_text(io.format_csv(x))
    (d / "part.json").write_text("[[1], [2, 3], [4]]")
    return d


def test_estimate_worked_mean_conditional(worked_csv, tmp_path, capsys):
    code, out, _ = _run(["estimate", worked_csv / "x.csv", worked_csv / "part.json", "--seed", 3,
                         "--out", tmp_path], capsys)
    report = json.loads(out)
    # frozen at seed 3
    assert code == cli.EXIT_OK and report["selected"] == 0.2
    assert report["edges"] == [[1, 2], [2, 3]]
    assert json.loads((tmp_path / "edges.json").read_text()) == report["edges"]
    assert "C1 -- " not in (tmp_path / "graph.dot").read_text()
    assert (tmp_path / "instability.csv").read_text().startswith("param,instability,monotone\n")


def test_estimate_single_cluster(worked_csv, capsys):
    (worked_csv / "one.json").write_text("[[1, 2, 3, 4]]")
    code, out, _ = _run(["estimate", worked_csv / "x.csv", worked_csv / "one.json", "--seed", 1], capsys)
    report = json.loads(out)
    assert code == cli.EXIT_OK and report["vertices"] == 1 and report["edges"] == []


def test_estimate_constant_column_pca(tmp_path, capsys):
    x = np.column_stack([np.arange(20.0), np.full(20, 2.0), np.sin(np.arange(20.0))])
    (tmp_path / "x.csv").write_text(io.format_csv(x))
    (tmp_path / "p.json").write_text("[[1], [2], [3]]")
    code, _, err = _run(["estimate", tmp_path / "x.csv", tmp_path / "p.json", "--method", "pca",
                         "--seed", 1], capsys)
    assert code == cli.EXIT_ERROR and "cluster 2" in err


def test_estimate_grid_exhausted_exit(worked_csv, tmp_path, capsys):
    code, out, err = _run(["estimate", worked_csv / "x.csv", worked_csv / "part.json", "--seed", 3,
                           "--method", "pca", "--grid", "0.5", "--beta", "0.001",
                           "--subsample-size", "30", "--out", tmp_path], capsys)
    assert code == cli.EXIT_GRID and "warning" in err
    assert (tmp_path / "graph.dot").exists()


# -------------------------------------------------------------- reproducibility

def _payloads(directory):
    out = {}
    for p in sorted(directory.iterdir()):
        text = p.read_text()
        if p.suffix == ".json":
            obj = json.loads(text)
            if "manifest" in obj:
                text = json.dumps(io.strip_timestamp(obj), sort_keys=True)
        out[p.name] = text
    return out


@pytest.mark.parametrize("argv", [
    ["simulate", "latent-rotation", "--trials", "10", "--seed", "4"],
    ["simulate", "spectral-chord", "--trials", "10", "--seed", "4"],
    ["demo"],
])
def test_reruns_are_byte_identical(tmp_path, capsys, argv):
    cli.main(argv + ["--out", str(tmp_path / "a")])
    cli.main(argv + ["--out", str(tmp_path / "b")])
    capsys.readouterr()
    assert _payloads(tmp_path / "a") == _payloads(tmp_path / "b")


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "graphhomotopy.cli", "demo"], capture_output=True, text=True)
    assert res.returncode == 0 and "NotHomotopic" in res.stdout
