import io
import json

import numpy as np
import pandas as pd
import pytest

from crindep.cli import build_parser, main
from crindep.io import write_sample_csv
from crindep.models import DependentFamily, Geometric
from crindep.resampling import spawn_generator


@pytest.fixture
def sample_file(tmp_path):
    sample = DependentFamily(Geometric(0.3), 1.5, (0.5,)).sample(80, spawn_generator(21))
    path = tmp_path / "sample.csv"
    write_sample_csv(sample, path)
    return str(path)


def run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])

def test_test_command(capsys, sample_file):
    status, out, _ = run(capsys, "test", "--input", sample_file, "--B", "100", "--seed", "1")
    assert status == 0
    report = json.loads(out)
    assert report["n"] == 80 and report["k"] == 2 and report["B"] == 100
    assert report["seed"] == 1
    assert set(report["decisions"].values()) <= {"accept", "reject"}

def test_test_command_is_deterministic(capsys, sample_file):
    argv = ("test", "--input", sample_file, "--B", "100", "--seed", "3")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

def test_alpha_levels_keep_their_order(capsys, sample_file):
    _, out, _ = run(capsys, "test", "--input", sample_file, "--B", "100",
                    "--alpha", "0.5", "--alpha", "0.01")
    assert list(json.loads(out)["critical_values"]) == ["0.5", "0.01"]

def test_asymptotic_failure_is_attached(capsys, sample_file):
    status, out, _ = run(capsys, "test", "--input", sample_file, "--B", "100", "--asymptotic")
    assert status == 0
    attached = json.loads(out)["asymptotic"]
    assert attached["0.05"]["type"] == "DegenerateVarianceError"

def test_output_file(tmp_path, capsys, sample_file):
    out_path = tmp_path / "report.json"
    status, out, _ = run(capsys, "test", "--input", sample_file, "--B", "100",
                         "--out", str(out_path))
    assert status == 0 and out == ""
    assert json.loads(out_path.read_text())["n"] == 80

def test_missing_input_file(capsys, tmp_path):
    status, out, err = run(capsys, "test", "--input", str(tmp_path / "absent.csv"))
    assert status == 2
    assert out == ""
    assert "crindep: error:" in err and "not found" in err

def test_invalid_model_parameter(capsys):
    status, _, err = run(capsys, "power", "--p", "1.5", "--reps", "5", "--B", "100")
    assert status == 2
    assert "crindep: error:" in err

def test_duplicate_models_exit_with_error(capsys):
    status, out, err = run(capsys, "power", "--p", "0.3,0.3", "--wide", "--reps", "5", "--B", "100")
    assert status == 2
    assert out == ""
    assert "crindep: error:" in err and "duplicate models" in err

def test_power_command_csv(capsys):
    status, out, _ = run(capsys, "power", "--reps", "5", "--B", "100",
                         "--n-grid", "20", "--a-grid", "1,2", "--seed", "4")
    assert status == 0
    table = pd.read_csv(io.StringIO(out))
    assert len(table) == 4
    assert table["power"].between(0, 1).all()

def test_power_command_json(capsys):
    status, out, _ = run(capsys, "power", "--reps", "5", "--B", "100", "--n-grid", "20",
                         "--a-grid", "2", "--alpha", "0.05", "--format", "json", "--seed", "4")
    assert status == 0
    records = json.loads(out)
    assert len(records) == 1
    assert records[0]["model"] == "geometric" and records[0]["n"] == 20

def test_power_command_wide(capsys):
    status, out, _ = run(capsys, "power", "--reps", "5", "--B", "100", "--n-grid", "20,30",
                         "--a-grid", "1,2", "--wide", "--format", "json", "--seed", "4")
    assert status == 0
    records = json.loads(out)
    assert len(records) == 4
    assert "geometric p=0.3 alpha=0.05" in records[0]

def test_weibull_shape_one_matches_geometric(capsys):
    common = ("--reps", "5", "--B", "100", "--n-grid", "20", "--a-grid", "1.5", "--seed", "8")
    _, geometric, _ = run(capsys, "power", "--model", "geometric", *common)
    _, weibull, _ = run(capsys, "power", "--model", "weibull", "--beta", "1", *common)
    np.testing.assert_array_equal(
        pd.read_csv(io.StringIO(geometric))["power"], pd.read_csv(io.StringIO(weibull))["power"]
    )

def test_cif_command(capsys, sample_file):
    status, out, _ = run(capsys, "cif", "--input", sample_file)
    assert status == 0
    table = pd.read_csv(io.StringIO(out))
    assert list(table.columns) == ["t", "F1", "F2", "F"]
    np.testing.assert_allclose(table["F1"] + table["F2"], table["F"], atol=1e-9)
    assert table["F"].iloc[-1] == pytest.approx(1.0)

def test_cif_with_hazards(capsys, sample_file):
    status, out, _ = run(capsys, "cif", "--input", sample_file, "--hazards")
    assert status == 0
    table = pd.read_csv(io.StringIO(out))
    assert list(table.columns) == ["t", "F1", "F2", "F", "share1", "share2"]
    np.testing.assert_allclose(table["share1"] + table["share2"], 1.0)

def test_cif_single_cause(tmp_path, capsys):
    path = tmp_path / "one.csv"
    path.write_text("time,cause\n1,1\n2,1\n2,1\n")
    status, out, _ = run(capsys, "cif", "--input", str(path))
    assert status == 0
    assert out.splitlines()[0] == "t,F1,F"
