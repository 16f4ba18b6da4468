import json

import pandas as pd
import pytest

from modules.cli import run


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture
def out(tmp_path):
    return tmp_path / "cli"


def test_dim_prints_the_dimension(capsys, out):
    assert run(["--output-dir", str(out), "dim", "--ratios", "0.5,0.5,0.5,0.5"]) == 0
    assert capsys.readouterr().out.strip() == "2.000000000000"
    manifest = read_json(out / "manifest.json")
    assert manifest["subcommand"] == "dim"
    assert manifest["result"]["success"] is True
    assert read_json(out / "result.json")["dimension"] == pytest.approx(2.0)


def test_default_output_directory(tmp_path):
    assert run(["dim", "--ifs", "preset:four_corner:0.3"]) == 0
    manifest = read_json(tmp_path / "output" / "dim" / "manifest.json")
    assert manifest["ifs"]["maps"][0]["ratio"] == "0.29999999999999999"


def test_invalid_input_exits_with_one(out):
    assert run(["--output-dir", str(out), "dim", "--ratios", "0.5"]) == 1
    manifest = read_json(out / "manifest.json")
    assert manifest["result"]["success"] is False
    assert manifest["result"]["error_type"] == "EmptyOrSingleton"


def test_usage_errors_exit_with_one(out):
    assert run(["--output-dir", str(out), "dim"]) == 1
    assert run(["--output-dir", str(out), "extent", "--ifs", "preset:four_corner"]) == 1
    assert run(["--output-dir", str(out), "no-such-command"]) == 1


def test_help_and_version(capsys):
    assert run(["--help"]) == 0
    assert "slice" in capsys.readouterr().out
    assert run(["--version"]) == 0


def test_budget_exceeded_exits_with_two(monkeypatch, out):
    monkeypatch.setenv("FRACTAL_SLICER_BUDGET", "10")
    code = run(["--output-dir", str(out), "overlaps", "--ifs", "preset:four_corner",
                "--theta", "1.0", "--depth", "4"])
    assert code == 2
    assert read_json(out / "manifest.json")["result"]["error_type"] == "BudgetExceeded"


def test_conditions(capsys, out):
    assert run(["--output-dir", str(out), "check-b", "--ifs", "preset:four_corner:3/10",
                "--theta", "0"]) == 0
    assert "condition B: Coincidence" in capsys.readouterr().out
    assert run(["--output-dir", str(out), "check-bprime", "--ifs", "preset:diagonal_pair",
                "--direction", "1,0"]) == 0
    assert read_json(out / "result.json")["letters"] == [1, 2]


def test_overlaps_and_projection(capsys, out):
    assert run(["--output-dir", str(out), "overlaps", "--ifs", "preset:product_cantor:2/5",
                "--theta", "0", "--depth", "2"]) == 0
    assert "pairs: 2" in capsys.readouterr().out
    assert run(["--output-dir", str(out), "project", "--ifs", "preset:four_corner:3/10",
                "--theta", "0"]) == 0
    maps = read_json(out / "projected.json")["maps"]
    assert maps[1]["offset"] == {"num": 7, "den": 10}


def test_extent_and_length(capsys, out):
    assert run(["--output-dir", str(out), "extent", "--ifs", "preset:full_square", "--theta", "0"]) == 0
    assert capsys.readouterr().out.split() == ["0", "1"]
    assert run(["--output-dir", str(out), "length", "--ifs", "preset:full_square",
                "--theta", "0", "--r", "0.01"]) == 0
    assert read_json(out / "result.json")["length"] == pytest.approx(1.0)


def test_density_writes_a_histogram(out):
    assert run(["--output-dir", str(out), "density", "--ifs", "preset:full_square", "--theta", "0",
                "--r", "0.125", "--ladder", "0.05,0.02,0.01"]) == 0
    table = pd.read_csv(out / "density.csv")
    assert list(table.columns) == ["bin_left", "bin_right", "mass", "density"]
    assert len(table) == 8
    assert read_json(out / "result.json")["diagnostic"]["verdict"] == "BoundedSuggested"


def test_slice_pack_and_slicedim(out):
    base = ["--output-dir", str(out)]
    assert run(base + ["slice", "--ifs", "preset:four_corner:0.3", "--theta", "0",
                       "--t", "0.05", "--r", "0.09"]) == 0
    assert len(pd.read_csv(out / "slice.csv")) == 4

    assert run(base + ["pack", "--ifs", "preset:four_corner:0.35", "--theta", "1.0",
                       "--t", "0.6", "--delta", "0.125,0.0625"]) == 0
    table = pd.read_csv(out / "pack.csv")
    assert list(table["delta"]) == [0.125, 0.0625]
    assert (table["value"] >= 0).all()
    assert list(table.columns)[:4] == ["t", "delta", "value", "item_count"]

    assert run(base + ["slicedim", "--ifs", "preset:four_corner:0.3", "--theta", "0",
                       "--t", "0", "--ladder", "0.1,0.03,0.01,0.003"]) == 0
    assert read_json(out / "result.json")["counts"] == [4, 8, 16, 32]


def test_rectangle_commands(out):
    base = ["--output-dir", str(out), "--seed", "1"]
    assert run(base + ["lemma4-constants", "--ifs", "preset:diagonal_pair", "--theta", "0"]) == 0
    assert read_json(out / "result.json")["constants"]["N"] == 1

    assert run(base + ["lemma4-build", "--ifs", "preset:diagonal_pair", "--theta", "0",
                       "--C", "4"]) == 0
    assert read_json(out / "result.json")["pair"]["k"] == 7

    assert run(base + ["lemma4-verify", "--ifs", "preset:diagonal_pair", "--theta", "0",
                       "--word", "2", "--C", "4"]) == 0
    checks = read_json(out / "result.json")["checks"]
    assert checks["passed"] is True

    assert run(base + ["lemma4-build", "--ifs", "preset:four_corner", "--theta", "0", "--C", "4"]) == 1


def test_experiment_command(tmp_path, out):
    scenario = tmp_path / "case.toml"
    scenario.write_text(
        'name = "cli"\n'
        '[ifs]\npreset = "four_corner"\nrho = 0.3\n'
        '[direction]\ntheta = 0.5\n'
        '[grid]\ncount = 16\n'
        '[ladder]\ndelta = [0.25, 0.125, 0.0625, 0.03125]\nr_coupling = 8.0\n'
        '[output]\nstudies = ["divergence"]\n',
        encoding="utf-8",
    )
    assert run(["--output-dir", str(out), "--seed", "5", "experiment", "--scenario", str(scenario)]) == 0
    summary = read_json(out / "summary.json")
    assert summary["seed"] == 5
    divergence = read_json(out / "summary.json")["divergence"]
    medians = [row["median"] for row in divergence["statistics"]]
    growing = all(y >= x for x, y in zip(medians, medians[1:])) \
        and medians[-1] / medians[0] >= divergence["growth_threshold"]
    assert divergence["verdict"] == ("Growing" if growing else "NotGrowing")
    assert divergence["growth"]["0.5"] == pytest.approx(medians[-1] / medians[0])
    assert (out / "results.csv").exists()
    assert read_json(out / "manifest.json")["result"]["success"] is True


def test_experiment_rejects_bad_scenarios(tmp_path, out):
    scenario = tmp_path / "bad.toml"
    scenario.write_text('[ifs]\npreset = "four_corner"\n[direction]\ntheta = 0.5\n'
                        '[ladder]\ndelta = [0.25, 0.125]\n', encoding="utf-8")
    assert run(["--output-dir", str(out), "experiment", "--scenario", str(scenario)]) == 1


def test_sweep_command(out):
    assert run(["--output-dir", str(out), "sweep", "--ifs", "preset:four_corner:1/3",
                "--angles", "0,1.0", "--depth", "2", "--density-ladder", "none"]) == 0
    table = pd.read_csv(out / "sweep.csv")
    assert list(table["exceptional"]) == [True, False]
    assert run(["--output-dir", str(out), "sweep", "--ifs", "preset:four_corner",
                "--random", "3", "--depth", "1", "--density-ladder", "none"]) == 0
    assert len(pd.read_csv(out / "sweep.csv")) == 3
    assert run(["--output-dir", str(out), "sweep", "--ifs", "preset:four_corner"]) == 1


def test_malformed_ifs_file_still_writes_a_manifest(tmp_path, out):
    broken = tmp_path / "broken.json"
    broken.write_text('{"maps": [', encoding="utf-8")
    assert run(["--output-dir", str(out), "extent", "--ifs", str(broken), "--theta", "0"]) == 1
    manifest = read_json(out / "manifest.json")
    assert manifest["subcommand"] == "extent"
    assert manifest["ifs"] is None
    assert manifest["result"]["success"] is False
    assert manifest["result"]["error_type"] == "IFSFormatError"
