import csv
import subprocess
import sys

import numpy as np
import pytest

from lifrbf import bench, gcnn
from lifrbf.cli import main


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_bench_sinc_gcnn(tmp_path):
    code = main(["bench", "sinc", "--config", "table1.cfg", "--method", "gcnn-ec", "--trials", "5",
                 "--out", str(tmp_path), "--no-svg"])
    assert code == 0
    rows = read_rows(tmp_path / "sinc_gcnn-ec.csv")
    assert rows[-2]["trial"] == "mean" and float(rows[-2]["mse_cstr"]) == 0.0


def test_help_exits_zero(capsys):
    assert main(["bench", "sinc", "--help"]) == 0
    assert "usage" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["bench", "sinc"],
    ["bench", "sinc", "--config", "does-not-exist.cfg"],
    ["bench", "sinc", "--config", "table1.cfg", "--bogus"],
    ["bench", "sinc", "--config", "table2.cfg"],
    ["bench", "sinc", "--config", "table1.cfg", "--set", "nonsense"],
    ["frobnicate"],
])
def test_config_errors_exit_one(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)] if argv[0] == "bench" else argv) == 1


def test_infeasible_exits_two(tmp_path):
    argv = ["bench", "pde-dirichlet", "--config", "table2.cfg", "--method", "lagrange", "--trials", "1",
            "--set", "n_rbf=2", "--set", "center_kind=k-means", "--out", str(tmp_path), "--no-svg"]
    assert main(argv) == 2


def test_analyze_weights_row_count(tmp_path):
    assert main(["analyze", "weights", "--config", "fig7.cfg", "--sigmas", "0.05",
                 "--out", str(tmp_path)]) == 0
    files = sorted(tmp_path.glob("weights_sigma0.05_*.csv"))
    assert files
    for f in files:
        assert len(read_rows(f)) == 501


def test_analyze_coupling(tmp_path):
    assert main(["analyze", "coupling", "--config", "coupling.cfg", "--out", str(tmp_path)]) == 0
    cols = read_rows(tmp_path / "coupling_gcnn-ec.csv")[0].keys()
    assert {"x", "f0", "gs", "Gs", "fm"} <= set(cols)


def test_fit_predict_round_trip(tmp_path):
    assert main(["fit", "--config", "table2.cfg", "--method", "gcnn-ec", "--out", str(tmp_path)]) == 0
    model_path = tmp_path / "pde-dirichlet_gcnn-ec_model.txt"
    pts = np.column_stack([np.zeros(5), np.linspace(0, 1, 5)])
    np.savetxt(tmp_path / "in.csv", pts, delimiter=",")
    assert main(["predict", str(model_path), "--input", str(tmp_path / "in.csv"), "--out", str(tmp_path)]) == 0
    got = np.loadtxt(tmp_path / "predictions.csv")
    np.testing.assert_array_equal(got, pts[:, 1] ** 3)

    # same result through the library
    cfg = bench.load_config(bench.shipped_config("table2.cfg"), {"method": "gcnn-ec"})
    train, _, specs = bench._generate(cfg, 0)
    model = bench.fit_method(cfg, "gcnn-ec", train, specs, bench.base_model(cfg, train.X))
    np.testing.assert_array_equal(gcnn.load_model(model_path).weights, model.weights)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lifrbf", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "bench" in res.stdout
