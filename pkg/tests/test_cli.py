import csv
import json

import numpy as np
import pytest

from tailgof.cli import main, read_sample, write_sample
from tailgof.datagen import gen_cauchy_quadrant
from tailgof.errors import DataError

SMALL = ["--grid-cells", "20", "--integ-cells", "40"]


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    path = tmp_path_factory.mktemp("bench") / "bench.csv"
    assert main(["benchmark", "--out", str(path), "--paths", "300", "--seed", "4"] + SMALL) == 0
    return path


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "sample.csv"
    write_sample(path, gen_cauchy_quadrant(1500, seed=1))
    return path


def test_sample_io_round_trip(tmp_path):
    data = np.random.default_rng(0).exponential(size=(50, 2))
    path = tmp_path / "s.csv"
    write_sample(path, data)
    assert path.read_text().splitlines()[0] == "x,y"
    assert read_sample(path).tobytes() == data.tobytes()


def test_test_command(tmp_path, bench, sample_file):
    report, fld = tmp_path / "r.json", tmp_path / "f.csv"
    code = main(["test", "--input", str(sample_file), "--benchmark", str(bench), "--report", str(report),
                 "--field-csv", str(fld)] + SMALL)
    assert code == 0
    out = json.loads(report.read_text())
    assert set(out["statistics"]) == {"kappa", "omega2", "a2"}
    assert all(0 < p <= 1 for p in out["p_values"].values())
    assert out["config"]["k"] == 250 and out["config"]["grid"]["eval_cells"] == 20
    assert len(fld.read_text().splitlines()) == 21


def test_test_command_estimates_theta(tmp_path, bench, sample_file, capsys):
    assert main(["test", "--input", str(sample_file), "--family", "logistic", "--benchmark", str(bench)]
                + SMALL) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0 < out["config"]["theta_hat"][0] < 1


def test_config_file_and_flag_override(tmp_path, bench, sample_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 100, "grid": {"eval_cells": 20, "integ_cells_per_axis": 40},
                               "benchmark": str(bench), "input": str(sample_file)}))
    assert main(["test", "--config", str(cfg), "--k", "200"]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["k"] == 200


def test_tau_not_below_T(sample_file):
    assert main(["test", "--input", str(sample_file), "--tau", "2.5"]) == 2


def test_k_too_close_to_n(tmp_path, capsys):
    path = tmp_path / "small.csv"
    write_sample(path, gen_cauchy_quadrant(300, seed=1))
    assert main(["test", "--input", str(path)] + SMALL) == 2
    assert "k too close to n" in capsys.readouterr().err


def test_bad_data_file(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\nfoo,3\n")
    assert main(["test", "--input", str(path)] + SMALL) == 3
    assert main(["test", "--input", str(tmp_path / "missing.csv")] + SMALL) == 3
    with pytest.raises(DataError):
        read_sample(path)


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert main(["test", "--config", str(cfg)]) == 2


def test_boundary_estimate_exit_code(tmp_path, bench):
    # comonotone data push the scale estimate above 1
    x = gen_cauchy_quadrant(1500, seed=3)[:, 0]
    path = tmp_path / "como.csv"
    write_sample(path, np.column_stack([x, x]))
    assert main(["test", "--input", str(path), "--family", "scaled_model1", "--benchmark", str(bench)]
                + SMALL) == 4


def test_benchmark_mismatch(sample_file, bench):
    assert main(["test", "--input", str(sample_file), "--benchmark", str(bench),
                 "--grid-cells", "40", "--integ-cells", "80"]) == 5


def test_simulate(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--generator", "linear_factor", "--param", "lambda=0.9", "--n", "50",
                 "--replications", "3", "--seed", "8", "--out-dir", str(out)]) == 0
    files = sorted(out.iterdir())
    assert [f.name for f in files] == [f"linear_factor_{i:04d}.csv" for i in range(3)]
    assert read_sample(files[0]).shape == (50, 2)
    again = tmp_path / "again"
    main(["simulate", "--generator", "linear_factor", "--param", "lambda=0.9", "--n", "50",
          "--replications", "3", "--seed", "8", "--out-dir", str(again)])
    assert (again / files[1].name).read_bytes() == files[1].read_bytes()
    assert main(["simulate", "--generator", "linear_factor", "--param", "lambda=oops",
                 "--out-dir", str(out)]) == 2
    assert main(["simulate", "--generator", "linear_factor", "--param", "lambda=1.5",
                 "--out-dir", str(out)]) == 2


def test_reproduce_outputs(tmp_path, bench):
    out = tmp_path / "rep"
    assert main(["reproduce", "--model", "1", "--mode", "null", "--replications", "4", "--seed", "1",
                 "--benchmark", str(bench), "--out-dir", str(out)] + SMALL) == 0
    names = {p.name for p in out.iterdir()}
    assert {"model1_null_replications.csv", "model1_null_summary.csv", "model1_null_ppplot.csv"} <= names
    with open(out / "model1_null_summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["statistic"] for r in rows] == ["kappa", "omega2", "a2"]
    assert all(r["replications"] == "4" for r in rows)


def test_reproduce_builds_missing_benchmark(tmp_path):
    out = tmp_path / "rep"
    assert main(["reproduce", "--model", "3", "--mode", "alt", "--replications", "2", "--paths", "50",
                 "--out-dir", str(out)] + SMALL) == 0
    assert (out / "benchmark.csv").exists()
