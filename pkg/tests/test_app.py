import json

import pytest

from helmholtz_ldg import app
from helmholtz_ldg.linalg.sparse import SolverError
from helmholtz_ldg.study import runner


def test_mesh_info(capsys):
    assert app.main(["mesh-info", "--m", "4"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "triangles: 32" in out
    assert "edges: 56" in out
    assert "interior edges: 40" in out
    assert "boundary edges: 16" in out


def test_mesh_info_dump(tmp_path, capsys):
    path = tmp_path / "mesh.txt"
    assert app.main(["mesh-info", "--m", "2", "--dump", str(path)]) == 0
    assert path.read_text().startswith("vertices 9\n")


def test_help(capsys):
    assert app.main(["--help"]) == 0
    assert "solve" in capsys.readouterr().out


def test_nonpositive_k_is_a_usage_error(capsys):
    assert app.main(["solve", "--k", "0"]) == 1
    assert "k must be positive" in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error(capsys):
    assert app.main(["solve", "--wavenumber", "3"]) == 1
    assert "--wavenumber" in capsys.readouterr().err


def test_unknown_method_is_a_usage_error(capsys):
    assert app.main(["audit", "--method", "fem-p1"]) == 1


def test_solve_prints_json_report(capsys):
    assert app.main(["solve", "--method", "ldg2", "--k", "2", "--m", "4"]) == 0
    captured = capsys.readouterr()
    record = json.loads(captured.out)
    assert record["problem"] == "bessel"
    assert record["method"] == "ldg2"
    assert record["m"] == 4
    assert record["beta_scaling"] == "inv-edge"
    assert 0 < record["h1_relative"] < 10
    assert "✅" in captured.err


def test_solve_exports_matrix(tmp_path, capsys):
    path = tmp_path / "ldg1.mtx"
    assert app.main(["solve", "--k", "2", "--m", "2", "--export-matrix", str(path)]) == 0
    header = path.read_text().splitlines()[0]
    assert header.startswith("%%MatrixMarket matrix coordinate complex general")


def test_numerical_failure_exit_code(monkeypatch, capsys):
    def singular(*args, **kwargs):
        raise SolverError("numerically singular: zero pivot at 0", pivot=0)

    monkeypatch.setattr(app, "solve_problem", singular)
    assert app.main(["solve", "--k", "2", "--m", "2"]) == 2
    err = capsys.readouterr().err
    assert "ldg1 k=2 m=2" in err
    assert "zero pivot" in err


def test_failed_study_cell_exit_code(output_dir, monkeypatch, capsys):
    def singular(*args, **kwargs):
        raise SolverError("residual check failed")

    monkeypatch.setattr(runner, "solve_problem", singular)
    code = app.main(["convergence", "--method", "ldg1", "--k", "2", "--m", "2", "--m", "4", "--no-db"])
    assert code == 2
    assert "2 cell(s) failed" in capsys.readouterr().err
    assert (output_dir / "convergence" / "results.csv").exists()


def test_table1_prints_report(output_dir, capsys):
    assert app.main(["table1", "--m", "2", "--m", "4", "--no-db", "--format", "md"]) == 0
    out = capsys.readouterr().out
    assert "| 1/h |" in out
    assert "ldg1, k=10" in out


def test_audit_prints_records(output_dir, capsys):
    assert app.main(["audit", "--k", "2", "--m", "2", "--no-db", "--format", "json"]) == 0
    records = json.loads(capsys.readouterr().out)
    assert len(records) == 1
    assert records[0]["ratio"] > 0


def test_study_from_config(tmp_path, output_dir, capsys):
    path = tmp_path / "study.json"
    path.write_text(json.dumps({"kind": "k3h2-constant", "k_values": [1, 2], "formats": ["csv"], "database": None}))
    assert app.main(["study", "--config", str(path)]) == 0
    assert (output_dir / "k3h2-constant" / "results.csv").exists()


def test_config_file_drives_the_grid(tmp_path, output_dir, capsys):
    path = tmp_path / "study.json"
    path.write_text(json.dumps({"kind": "convergence", "methods": ["fem-p1"], "k_values": [2], "m_values": [2, 4]}))
    assert app.main(["convergence", "--config", str(path), "--no-db", "--format", "csv"]) == 0
    assert not (output_dir / "helmholtz_results.duckdb").exists()
    rates = (output_dir / "convergence" / "rates.csv").read_text()
    assert "fem-p1" in rates


@pytest.mark.parametrize("argv", [["solve", "--m", "0"], ["convergence", "--m", "0", "--no-db"]])
def test_invalid_mesh_size(argv, output_dir, capsys):
    assert app.main(argv) == 1
    assert "m must be >= 1" in capsys.readouterr().err


def test_precondition_failure_in_a_cell_is_a_usage_error(output_dir, capsys):
    code = app.main(["audit", "--problem", "zero", "--k", "5", "--m", "4", "--no-db", "--format", "json"])
    assert code == 1
    err = capsys.readouterr().err
    assert "invalid input" in err
    assert "zero data" in err
    assert "Numerical failure" not in err


def test_study_accepts_shared_options(tmp_path, output_dir, capsys):
    path = tmp_path / "study.json"
    path.write_text(json.dumps({"kind": "convergence", "methods": ["fem-p1"], "k_values": [2], "m_values": [2, 4]}))
    argv = ["study", "--config", str(path), "--format", "json", "--workers", "2", "--no-db", "--problem", "linear"]
    assert app.main(argv) == 0
    payload = json.loads((output_dir / "convergence" / "results.json").read_text())
    assert payload["config"]["problem"] == "linear"
    assert payload["config"]["workers"] == 2
    assert payload["config"]["database"] is None
    assert not (output_dir / "convergence" / "results.csv").exists()
    assert not (output_dir / "helmholtz_results.duckdb").exists()


def test_study_needs_a_config(output_dir, capsys):
    assert app.main(["study"]) == 1
    assert "--config" in capsys.readouterr().err
