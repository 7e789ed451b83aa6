"""Tests for the robust-xbar command line."""

import csv
import json

import pytest
from click.testing import CliRunner

from robust_xbar.cli import cli
from robust_xbar.factors import save_table

DATASET = """sample_id,value
1,10.2
1,9.8
1,10.1
2,9.9
2,10.4
2,10.0
2,9.7
3,10.3
3,10.1
3,9.6
3,10.0
3,9.9
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text(DATASET)
    return str(path)


@pytest.fixture
def factors_file(tmp_path, factor_table):
    path = tmp_path / "factors.json"
    save_table(factor_table, path)
    return str(path)


def test_validate(runner, dataset):
    result = runner.invoke(cli, ["validate", "--data", dataset])
    assert result.exit_code == 0
    assert "3 subgroups, 12 observations, sizes 3,4,5" in result.output


def test_validate_bad_value(runner, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("sample_id,value\n1,10.0\n1,abc\n")
    result = runner.invoke(cli, ["validate", "--data", str(path)])
    assert result.exit_code == 3
    assert ":3:" in result.output


def test_wrong_header(runner, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,x\n1,10.0\n")
    assert runner.invoke(cli, ["validate", "--data", str(path)]).exit_code == 3


@pytest.mark.parametrize("method", ["I", "II", "III"])
def test_limits_json(runner, dataset, factors_file, tmp_path, method):
    out = tmp_path / "limits.json"
    result = runner.invoke(
        cli, ["limits", "--data", dataset, "--method", method, "--factors", factors_file, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    document = json.loads(out.read_text())
    assert document["method"] == method
    assert document["sizes"] == [3, 4, 5]
    assert document["lcl"] < document["cl"] < document["ucl"]
    assert document["factor_version"].startswith("robust-xbar-factors/1:")


def test_limits_csv(runner, dataset, factors_file, tmp_path):
    out = tmp_path / "limits.csv"
    result = runner.invoke(
        cli,
        ["limits", "--data", dataset, "--method", "II", "--pooling", "A", "--format", "csv",
         "--factors", factors_file, "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 1
    assert rows[0]["pooling"] == "A"
    assert float(rows[0]["lcl"]) < float(rows[0]["ucl"])


def test_limits_svg(runner, dataset, factors_file, tmp_path):
    out = tmp_path / "chart.svg"
    result = runner.invoke(
        cli, ["limits", "--data", dataset, "--format", "svg", "--factors", factors_file, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "<svg" in out.read_text()
    assert "UCL=" in result.output


def test_limits_svg_needs_out(runner, dataset):
    assert runner.invoke(cli, ["limits", "--data", dataset, "--format", "svg"]).exit_code == 2


def test_limits_missing_factor(runner, tmp_path, factors_file):
    path = tmp_path / "wide.csv"
    rows = ["sample_id,value"] + [f"1,{10 + 0.01 * i}" for i in range(25)] + ["2,9.9", "2,10.1", "2,10.0"]
    path.write_text("\n".join(rows) + "\n")
    result = runner.invoke(cli, ["limits", "--data", str(path), "--method", "II", "--factors", factors_file])
    assert result.exit_code == 4
    assert "n=25" in result.output


def test_limits_pooling_d_needs_total_size(runner, dataset, factors_file, tmp_path):
    out = tmp_path / "limits.json"
    result = runner.invoke(
        cli,
        ["limits", "--data", dataset, "--method", "II", "--pooling", "D", "--factors", factors_file,
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text())["scale"] == "MAD"


def test_factors_byte_identical(runner, tmp_path):
    outputs = []
    for name in ("one.json", "two.json"):
        out = tmp_path / name
        result = runner.invoke(
            cli, ["factors", "--estimators", "MAD,HL1", "--n-min", "3", "--n-max", "4",
                  "--reps", "10000", "--seed", "5", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(json.loads(outputs[0])["entries"]) == 4


def test_factors_usage_errors(runner, tmp_path):
    out = str(tmp_path / "f.json")
    assert runner.invoke(cli, ["factors", "--n-min", "5", "--n-max", "3", "--out", out]).exit_code == 2
    assert runner.invoke(cli, ["factors", "--n-min", "1", "--out", out]).exit_code == 2
    assert runner.invoke(cli, ["factors", "--estimators", "trimmed", "--out", out]).exit_code == 2
    assert runner.invoke(cli, ["factors", "--reps", "100", "--n-max", "3", "--out", out]).exit_code == 3


def test_unknown_method(runner, dataset):
    assert runner.invoke(cli, ["limits", "--data", dataset, "--method", "IV"]).exit_code == 2


def test_simulate_re(runner, tmp_path, factors_file):
    config = tmp_path / "scenario.conf"
    config.write_text("sizes = 3, 5, 7\nreplications = 500\nseed = 3\nblock_size = 250\npoolings = A,B,C,D\n")
    prefix = tmp_path / "out" / "re"
    result = runner.invoke(
        cli, ["simulate-re", "--config", str(config), "--out", str(prefix), "--factors", factors_file]
    )
    assert result.exit_code == 0, result.output
    document = json.loads((tmp_path / "out" / "re.json").read_text())
    rows = list(csv.DictReader((tmp_path / "out" / "re.csv").read_text().splitlines()))
    assert len(rows) == len(document["cells"])
    mean_c = [r for r in rows if r["estimator"] == "mean" and r["pooling"] == "C"]
    assert float(mean_c[0]["re_percent"]) == 100.0


def test_simulate_re_is_reproducible(runner, tmp_path, factors_file):
    config = tmp_path / "scenario.conf"
    config.write_text("scenario = b\nreplications = 300\nseed = 9\n")
    texts = []
    for name in ("first", "second"):
        prefix = tmp_path / name
        result = runner.invoke(
            cli, ["simulate-re", "--config", str(config), "--out", str(prefix), "--factors", factors_file]
        )
        assert result.exit_code == 0, result.output
        texts.append((tmp_path / f"{name}.json").read_bytes())
    assert texts[0] == texts[1]


def test_simulate_re_config_error(runner, tmp_path):
    config = tmp_path / "scenario.conf"
    config.write_text("sizes = 3, 4\nreplicates = 10\n")
    result = runner.invoke(cli, ["simulate-re", "--config", str(config), "--out", str(tmp_path / "x")])
    assert result.exit_code == 3
    assert "line 2" in result.output


def test_simulate_arl(runner, tmp_path, factors_file):
    config = tmp_path / "plan.conf"
    config.write_text("plan = 5\nsigma0 = 5\nreplications = 200\nseed = 1\nmethods = I, II\nblock_size = 100\n")
    prefix = tmp_path / "arl"
    result = runner.invoke(
        cli, ["simulate-arl", "--config", str(config), "--out", str(prefix), "--factors", factors_file]
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader((tmp_path / "arl.csv").read_text().splitlines()))
    assert [(r["method"], r["pooling"]) for r in rows][:3] == [("I", "A"), ("I", "B"), ("I", "C")]
    assert len(rows) == 6
    assert all(float(r["arl"]) >= 1 for r in rows)


def test_sensitivity(runner, dataset, factors_file, tmp_path):
    out = tmp_path / "sweep.csv"
    svg = tmp_path / "sweep.svg"
    result = runner.invoke(
        cli,
        ["sensitivity", "--data", dataset, "--start", "0", "--stop", "20", "--step", "5",
         "--factors", factors_file, "--out", str(out), "--svg", str(svg)],
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 15
    assert "Method-I: range" in result.output
    assert "<svg" in svg.read_text()


def test_sensitivity_usage(runner, dataset):
    assert runner.invoke(cli, ["sensitivity", "--data", dataset, "--methods", " , "]).exit_code == 2
    assert runner.invoke(cli, ["sensitivity", "--data", dataset, "--observation", "2"]).exit_code == 2


def test_ledger_records_runs(runner, dataset, factors_file, tmp_path):
    database = str(tmp_path / "ledger.db")
    out = tmp_path / "limits.json"
    result = runner.invoke(
        cli, ["--ledger", database, "limits", "--data", dataset, "--factors", factors_file, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output

    listing = runner.invoke(cli, ["--ledger", database, "ledger"])
    assert listing.exit_code == 0
    assert "cli.limits" in listing.output
    run_line = next(line for line in listing.output.splitlines() if line.endswith("cli.limits"))
    run_id = run_line.split()[0]

    shown = runner.invoke(cli, ["--ledger", database, "ledger", run_id])
    assert shown.exit_code == 0
    assert '"limits"' in shown.output
    assert runner.invoke(cli, ["--ledger", database, "ledger", "no-such-run"]).exit_code == 2


def test_limits_pooled_variance(runner, dataset, factors_file, tmp_path, memory_ledger):
    out = tmp_path / "limits.json"
    result = runner.invoke(
        cli, ["limits", "--data", dataset, "--pooled-variance", "--factors", factors_file, "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "pooled variance: LCL=" in result.output
    run = memory_ledger.get_run(memory_ledger.list_runs()[-1]["run_id"])
    assert [a["name"] for a in run["artifacts"]] == ["limits", "pooled_variance_limits"]
    assert json.loads(out.read_text())["method"] == "I"
