import json

import numpy as np
import pytest
from typer.testing import CliRunner

import eigenstrata
from eigenstrata import verify
from eigenstrata.cli.main import app
from eigenstrata.utilities.io import read_csv

runner = CliRunner()


def test_version():
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert f"eigenstrata version: {eigenstrata.__version__}" in result.stdout
    assert f"NumPy version: {np.__version__}" in result.stdout


def test_no_arguments_shows_help():
    result = runner.invoke(app, [])
    assert "figure" in result.output


class TestFigure:
    def test_writes_csv(self, tmp_path):
        result = runner.invoke(app, ["figure", "3", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        columns = read_csv(tmp_path / "fig3.csv")
        assert "eig_largest" in columns

    def test_config_file(self, tmp_path):
        config = tmp_path / "run.env"
        config.write_text(f"n=6\nsamples=0\nout={tmp_path}\n")
        result = runner.invoke(app, ["figure", "1", "--config", str(config)])
        assert result.exit_code == 0, result.output
        assert "rank_k06" in read_csv(tmp_path / "fig1.csv")

    def test_unknown_figure(self, tmp_path):
        result = runner.invoke(app, ["figure", "99", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("width=3\n")
        result = runner.invoke(app, ["figure", "3", "--config", str(config)])
        assert result.exit_code == 2

    def test_numerical_failure(self, tmp_path):
        # Wishart phases need alpha >= 2
        result = runner.invoke(
            app, ["figure", "12", "--n", "4", "--alpha", "1", "--samples", "0", "--out", str(tmp_path)]
        )
        assert result.exit_code == 3


class TestTabulate:
    def test_density_to_stdout(self):
        result = runner.invoke(app, ["density", "--n", "3", "--lo", "-1", "--hi", "1", "--points", "5"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().splitlines()
        assert lines[0] == "x,density"
        assert len(lines) == 6

    def test_density_with_asymptotic(self, tmp_path):
        out = tmp_path / "rho.csv"
        result = runner.invoke(app, ["density", "--n", "20", "--asymptotic", "--out", str(out)])
        assert result.exit_code == 0, result.output
        columns = read_csv(out)
        assert np.isnan(columns["asymptotic"][0])
        assert np.any(np.isfinite(columns["asymptotic"]))

    def test_tw(self):
        result = runner.invoke(app, ["tw", "--beta", "1", "--points", "3", "--lo", "-2", "--hi", "2"])
        assert result.exit_code == 0, result.output
        assert result.stdout.splitlines()[0] == "s,cdf,density"

    def test_tw_bad_grid(self):
        result = runner.invoke(app, ["tw", "--lo", "2", "--hi", "1"])
        assert result.exit_code == 2

    def test_decompose_summary(self):
        result = runner.invoke(app, ["decompose", "--n", "6", "--summary"])
        assert result.exit_code == 0, result.output
        assert "edge_exact_tail" in result.stdout

    def test_decompose_csv(self, tmp_path):
        out = tmp_path / "components.csv"
        result = runner.invoke(app, ["decompose", "--ensemble", "goe", "--n", "4", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert list(read_csv(out)) == ["x", "density"] + [f"component_k{k:02d}" for k in range(1, 5)]

    def test_table(self):
        result = runner.invoke(app, ["table", "1", "--n", "10"])
        assert result.exit_code == 0, result.output
        assert "Tracy-Widom" in result.stdout
        assert "reference" in result.stdout

    def test_unknown_table(self):
        assert runner.invoke(app, ["table", "5"]).exit_code == 2


def _report(stdout: str) -> list:
    # the failure summary may share the stream
    return json.loads(stdout[: stdout.rindex("]") + 1])


class TestVerify:
    @pytest.fixture()
    def stub_suite(self, monkeypatch):
        def install(*criteria):
            monkeypatch.setattr(verify, "run_suite", lambda suite, samples, seed: list(criteria))

        return install

    def test_passing_report(self, stub_suite):
        stub_suite(verify.Criterion(name="a", value=1e-9, bound=1e-6, passed=True))
        result = runner.invoke(app, ["verify"])
        assert result.exit_code == 0
        assert _report(result.stdout) == [{"name": "a", "value": 1e-9, "bound": 1e-6, "pass": True}]

    def test_failure_exits_one(self, stub_suite):
        stub_suite(
            verify.Criterion(name="a", value=1e-9, bound=1e-6, passed=True),
            verify.Criterion(name="b", value=float("inf"), bound=1e-6, passed=False),
        )
        result = runner.invoke(app, ["verify", "--full", "--samples", "10"])
        assert result.exit_code == 1
        report = _report(result.stdout)
        assert report[1]["value"] is None
        assert report[1]["pass"] is False
