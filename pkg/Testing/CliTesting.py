import json
import os
import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest

from QInterference import Channels
from QInterference import Cli


def test_builtin_channels():
    assert Cli.builtin_channel("theta-swap:0.3") == Channels.theta_swap(0.3)
    assert Cli.builtin_channel("bb84").kind == "cccq"
    assert Cli.builtin_channel("constant").alphabets == (2, 2)
    with pytest.raises(ValueError):
        Cli.builtin_channel("theta-swap:wide")
    with pytest.raises(ValueError):
        Cli.builtin_channel("bb85")


def test_parse_dist():
    assert np.allclose(Cli.parse_dist("0.25,0.75", 2, "--p1"), [0.25, 0.75])
    with pytest.raises(ValueError):
        Cli.parse_dist("0.5,0.6", 2, "--p1")
    with pytest.raises(ValueError):
        Cli.parse_dist("1", 2, "--p1")


def test_export_then_load(tmp_path):
    path = os.path.join(str(tmp_path), "swap.json")
    assert Cli.main(["export-channel", "--builtin", "theta-swap:1.2", "--out", path]) == Cli.EXIT_OK
    assert Channels.load_channel(path) == Channels.theta_swap(1.2)


def test_region_writes_csv_and_manifest(tmp_path):
    out = os.path.join(str(tmp_path), "regions", "sim.csv")
    code = Cli.main(["region", "--builtin", "theta-swap:1.5708", "--method", "sim-inner", "--grid-step", "0.5",
                     "--out", out])
    assert code == Cli.EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["R1", "R2"]
    with open(os.path.join(str(tmp_path), "regions", "sim.manifest.json")) as f:
        manifest = json.load(f)
    assert manifest["command"] == "region"
    assert manifest["params"]["method"] == "sim-inner"
    assert "func" not in manifest["params"]


def test_region_from_channel_file(tmp_path):
    path = os.path.join(str(tmp_path), "bb84.json")
    Channels.save_channel(Channels.bb84_cccq(), path)
    out = os.path.join(str(tmp_path), "min.csv")
    assert Cli.main(["region", "--channel", path, "--method", "min-entropy", "--out", out]) == Cli.EXIT_OK
    assert len(pd.read_csv(out)) == 7


def test_vsi_outside_condition_fails(tmp_path):
    out = os.path.join(str(tmp_path), "vsi.csv")
    code = Cli.main(["region", "--builtin", "theta-swap:0.5", "--method", "vsi", "--grid-step", "0.5",
                     "--check-step", "0.1", "--out", out])
    assert code == Cli.EXIT_FAILURE
    assert not os.path.exists(out)


def test_input_errors(tmp_path):
    out = os.path.join(str(tmp_path), "x.csv")
    assert Cli.main(["region", "--builtin", "nothing", "--method", "mac2", "--out", out]) == Cli.EXIT_INPUT
    assert Cli.main(["region", "--method", "mac2", "--out", out]) == Cli.EXIT_INPUT
    missing = os.path.join(str(tmp_path), "missing.json")
    assert Cli.main(["region", "--channel", missing, "--method", "mac2", "--out", out]) == Cli.EXIT_INPUT
    assert Cli.main(["region", "--builtin", "bb84", "--method", "sd-points", "--out", out]) == Cli.EXIT_INPUT


def test_simulate_over_budget(tmp_path):
    out = os.path.join(str(tmp_path), "sim.csv")
    code = Cli.main(["simulate", "--builtin", "theta-swap:1.0", "--n", "14", "--out", out])
    assert code == Cli.EXIT_BUDGET


def test_simulate_small(tmp_path, capsys):
    out = os.path.join(str(tmp_path), "sim.csv")
    code = Cli.main(["simulate", "--builtin", "theta-swap:1.0", "--n", "2,3", "--trials", "2", "--delta", "0.3",
                     "--out", out])
    assert code == Cli.EXIT_OK
    frame = pd.read_csv(out)
    assert frame["n"].tolist() == [2, 3]
    assert "mean_error" in capsys.readouterr().out
    with open(os.path.join(str(tmp_path), "sim.manifest.json")) as f:
        assert len(json.load(f)["params"]["rates"]) == 2


def test_gaussian(tmp_path):
    out = str(tmp_path)
    assert Cli.main(["gaussian", "--split-step", "0.5", "--out-dir", out]) == Cli.EXIT_OK
    for name in ("mac1.csv", "mac2.csv", "hk.csv", "sd_rs.csv", "sd_points.csv", "summary.json"):
        assert os.path.isfile(os.path.join(out, name))
    with open(os.path.join(out, "summary.json")) as f:
        summary = json.load(f)
    assert summary["sd_rs_in_hk"]
    assert summary["splits"] == 9
    assert list(pd.read_csv(os.path.join(out, "sd_points.csv"))["label"]) == ["P1", "P2", "P3", "P4"]


def test_entropy_prints_table(capsys):
    assert Cli.main(["entropy", "--builtin", "bb84"]) == Cli.EXIT_OK
    table = json.loads(capsys.readouterr().out)
    assert np.isclose(table["I(Z;B|XY)"], 0.600876, atol=1e-6)


def test_entropy_of_interference_channel(capsys):
    assert Cli.main(["entropy", "--builtin", "theta-swap:1.5708"]) == Cli.EXIT_OK
    table = json.loads(capsys.readouterr().out)
    assert np.isclose(table["I(X2;B1)"], 1.0, atol=1e-6)


def test_check_interference(capsys):
    code = Cli.main(["check-interference", "--builtin", "theta-swap:1.5708", "--grid-step", "0.1"])
    assert code == Cli.EXIT_OK
    assert json.loads(capsys.readouterr().out)["holds"]


def test_sweep_theta(tmp_path):
    out = str(tmp_path)
    code = Cli.main(["sweep-theta", "--from", "0.5", "--to", "1.5", "--step", "1.0", "--grid-step", "0.5",
                     "--check-step", "0.1", "--out-dir", out])
    assert code == Cli.EXIT_OK
    summary = pd.read_csv(os.path.join(out, "summary.csv"))
    assert summary["theta"].tolist() == [0.5, 1.5]
    assert summary["holds"].tolist() == [False, True]
    assert np.isnan(summary["max_sum"][0])
    assert os.path.isfile(os.path.join(out, "theta_1.5000.csv"))
    assert not os.path.exists(os.path.join(out, "theta_0.5000.csv"))


def test_selftest_with_junit(tmp_path, capsys):
    path = os.path.join(str(tmp_path), "report.xml")
    assert Cli.main(["selftest", "--suite", "typicality", "--junit", path]) == Cli.EXIT_OK
    assert capsys.readouterr().out.startswith("PASS binomial-tail")
    assert ET.parse(path).getroot().get("failures") == "0"
