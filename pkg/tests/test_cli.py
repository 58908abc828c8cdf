"""Tests for aumai_depthsep.cli: Click command group."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from aumai_depthsep.cli import EXIT_BUDGET, EXIT_CONFIG, main
from aumai_depthsep.fixtures import toy_abs_net
from aumai_depthsep.fouriernet import load_fn
from aumai_depthsep.models import Certificate, LowerBoundCertificate
from aumai_depthsep.netir import dump_net


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture()
def abs_net_file(tmp_path: Path) -> Path:
    path = tmp_path / "abs.json"
    path.write_text(dump_net(toy_abs_net(d=3, units=4, seed=2)), encoding="utf-8")
    return path


# ===========================================================================
# main / --version
# ===========================================================================


class TestMainGroup:
    """Tests for the top-level CLI group."""

    def test_version_flag(self, runner: CliRunner) -> None:
        """--version needs installed package metadata; accept the RuntimeError
        click raises when running from a source checkout."""
        result = runner.invoke(main, ["--version"])
        if result.exit_code == 0:
            assert "0.1.0" in result.output
        else:
            assert isinstance(result.exception, RuntimeError)

    def test_help_lists_commands(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("compile", "certify", "sphere", "sample", "bench", "init"):
            assert command in result.output


# ===========================================================================
# compile command
# ===========================================================================


class TestCompileCommand:
    """Tests for `aumai-depthsep compile`."""

    def test_writes_artifacts(self, runner: CliRunner, toy_net_file: Path, tmp_path: Path) -> None:
        out = tmp_path / "out"
        result = runner.invoke(
            main,
            ["compile", "--net", str(toy_net_file), "--eps", "0.5",
             "--verify-points", "256", "--out-dir", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert "Certificate: two_layer" in result.output
        cert = Certificate.model_validate_json((out / "certificate.json").read_text())
        fn = load_fn((out / "fourier_net.json").read_text())
        assert cert.atoms == fn.atom_count
        assert cert.measured_error is not None and cert.measured_error <= 0.5

    def test_json_mode(self, runner: CliRunner, toy_net_file: Path, tmp_path: Path) -> None:
        result = runner.invoke(
            main,
            ["--json", "compile", "--net", str(toy_net_file), "--eps", "0.5",
             "--verify-points", "256", "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == 0
        assert '"pipeline": "two_layer"' in result.output
        assert "create" not in result.output

    def test_budget_exit_code(self, runner: CliRunner, toy_net_file: Path, tmp_path: Path) -> None:
        result = runner.invoke(
            main,
            ["compile", "--net", str(toy_net_file), "--eps", "0.5",
             "--schedule", "closed_form", "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == EXIT_BUDGET
        partial = Certificate.model_validate_json((tmp_path / "certificate.json").read_text())
        assert partial.log2_N > 0.0

    def test_missing_net(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main, ["compile", "--net", str(tmp_path / "nope.json"), "--eps", "0.5"]
        )
        assert result.exit_code == EXIT_CONFIG
        assert "not found" in result.output

    def test_non_positive_eps(self, runner: CliRunner, toy_net_file: Path) -> None:
        result = runner.invoke(main, ["compile", "--net", str(toy_net_file), "--eps", "0"])
        assert result.exit_code == EXIT_CONFIG
        assert "eps" in result.output

    def test_invalid_net_document(self, runner: CliRunner, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text('{"d": 0, "layers": [], "out_re": []}', encoding="utf-8")
        result = runner.invoke(main, ["compile", "--net", str(path), "--eps", "0.5"])
        assert result.exit_code == EXIT_CONFIG


# ===========================================================================
# certify command
# ===========================================================================


class TestCertifyCommand:
    """Tests for `aumai-depthsep certify`."""

    def test_single_certificate(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main, ["certify", "--d", "60", "--N", "1", "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0
        assert "Lower bound: d=60 N=1" in result.output
        assert "error >= 0.85" in result.output
        cert = LowerBoundCertificate.model_validate_json(
            (tmp_path / "lower_bound.json").read_text()
        )
        assert cert.regime == "ok"
        assert cert.lower_bound == pytest.approx(1.0 - 1300.0 * 3600.0 * 0.75**60, rel=1e-10)
        assert cert.constants["threshold_N"] > 0.0

    def test_json_mode(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main, ["--json", "certify", "--d", "100", "--N", "1", "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0
        assert json.loads(result.stdout)["d"] == 100

    def test_sweep_writes_csv(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main,
            ["certify", "--d", "3", "--d", "100", "--N", "1", "--N", "10",
             "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == 0
        lines = (tmp_path / "kappa-sweep.csv").read_text().splitlines()
        assert lines[0] == "schema_version,d,N,lower_bound,regime"
        assert len(lines) == 5

    def test_missing_required_flag(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["certify", "--d", "5"])
        assert result.exit_code == 2


# ===========================================================================
# sphere command
# ===========================================================================


class TestSphereCommand:
    """Tests for `aumai-depthsep sphere`."""

    def test_requires_an_action(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["sphere", "--d", "3"])
        assert result.exit_code == 2

    def test_table(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main, ["sphere", "--table", "--d", "3", "--kmax", "4", "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0
        lines = (tmp_path / "sigma_table_d3.csv").read_text().splitlines()
        assert lines[0] == "schema_version,d,k,N_k,sigma_k,lambda_k"
        assert len(lines) == 6

    def test_frame(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main, ["--json", "sphere", "--frame", "--d", "4", "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0
        doc = json.loads((tmp_path / "frame_d4.json").read_text())
        assert doc["count"] == 8
        assert json.loads(result.stdout)["coherence"] == pytest.approx(0.5)

    def test_gamma1(self, runner: CliRunner, abs_net_file: Path) -> None:
        result = runner.invoke(main, ["sphere", "--gamma1", str(abs_net_file), "--d", "3"])
        assert result.exit_code == 0
        assert "gamma1 <= " in result.output

    def test_gamma1_dimension_mismatch(self, runner: CliRunner, abs_net_file: Path) -> None:
        result = runner.invoke(main, ["sphere", "--gamma1", str(abs_net_file), "--d", "4"])
        assert result.exit_code == EXIT_CONFIG

    def test_gamma1_needs_abs_net(self, runner: CliRunner, toy_net_file: Path) -> None:
        result = runner.invoke(main, ["sphere", "--gamma1", str(toy_net_file), "--d", "2"])
        assert result.exit_code == 1
        assert "abs" in result.output


# ===========================================================================
# sample / bench / init commands
# ===========================================================================


class TestSampleCommand:
    """Tests for `aumai-depthsep sample`."""

    def test_writes_report(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main,
            ["--seed", "7", "sample", "--kind", "box", "--d", "2", "--n", "500",
             "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == 0
        assert (tmp_path / "sample-box.csv").exists()
        assert "ks_pvalue" in result.output

    def test_invalid_radius(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(
            main,
            ["sample", "--kind", "box", "--d", "2", "--radius", "-1", "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == EXIT_CONFIG


class TestBenchCommand:
    """Tests for `aumai-depthsep bench`."""

    def test_runs_config(self, runner: CliRunner, sigma_table_yaml: Path, tmp_path: Path) -> None:
        out = tmp_path / "bench"
        result = runner.invoke(main, ["bench", str(sigma_table_yaml), "--out-dir", str(out)])
        assert result.exit_code == 0
        assert (out / "table.csv").exists()
        assert (out / "table.json").exists()

    def test_invalid_config(self, runner: CliRunner, tmp_path: Path) -> None:
        path = tmp_path / "bad.yaml"
        path.write_text("name: x\nexperiment: bogus\n", encoding="utf-8")
        result = runner.invoke(main, ["bench", str(path)])
        assert result.exit_code == EXIT_CONFIG
        assert "experiment" in result.output

    def test_missing_config(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(main, ["bench", str(tmp_path / "missing.yaml")])
        assert result.exit_code == EXIT_CONFIG


class TestInitCommand:
    """Tests for `aumai-depthsep init`."""

    def test_creates_files(self, runner: CliRunner, tmp_path: Path) -> None:
        target = tmp_path / "demo"
        result = runner.invoke(main, ["init", str(target)])
        assert result.exit_code == 0
        assert (target / "toy_net.json").exists()
        assert (target / "experiment.yaml").exists()
        assert "create" in result.output

    def test_skips_existing_files(self, runner: CliRunner, tmp_path: Path) -> None:
        target = tmp_path / "demo"
        runner.invoke(main, ["init", str(target)])
        (target / "toy_net.json").write_text("custom", encoding="utf-8")
        result = runner.invoke(main, ["init", str(target)])
        assert "skip" in result.output
        assert (target / "toy_net.json").read_text(encoding="utf-8") == "custom"

    def test_force_overwrites(self, runner: CliRunner, tmp_path: Path) -> None:
        target = tmp_path / "demo"
        runner.invoke(main, ["init", str(target)])
        (target / "toy_net.json").write_text("custom", encoding="utf-8")
        runner.invoke(main, ["init", str(target), "--force"])
        assert (target / "toy_net.json").read_text(encoding="utf-8") != "custom"

    def test_scaffold_runs_through_bench(self, runner: CliRunner, tmp_path: Path) -> None:
        target = tmp_path / "demo"
        runner.invoke(main, ["init", str(target)])
        config = (target / "experiment.yaml").read_text(encoding="utf-8")
        small = config.replace("N: [128, 512]", "N: [64]").replace("samples: 2048", "samples: 64")
        (target / "experiment.yaml").write_text(small, encoding="utf-8")
        result = runner.invoke(
            main, ["bench", str(target / "experiment.yaml"), "--out-dir", str(tmp_path / "r")]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "r" / "oscillatory-demo.csv").exists()
