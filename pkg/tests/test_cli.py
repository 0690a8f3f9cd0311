"""命令行：子命令输出与退出码"""

import json
import importlib
import math

import pytest
from typer.testing import CliRunner

from rabi_esd import __version__
from rabi_esd.checks import CheckResult, ValidationReport
app_module = importlib.import_module("rabi_esd.cli.app")  # submodule; package attr `app` is the Typer
from rabi_esd.cli.app import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, app

runner = CliRunner()


def invoke(*args: str):
    return runner.invoke(app, list(args))


class TestBasics:
    def test_version(self):
        result = invoke("--version")
        assert result.exit_code == EXIT_OK
        assert __version__ in result.stdout

    def test_short_version(self):
        result = invoke("-V")
        assert result.exit_code == EXIT_OK
        assert f"v{__version__}" in result.stdout

    def test_help_lists_commands(self):
        result = invoke("--help")
        assert result.exit_code == EXIT_OK
        for command in ("spectrum", "dynamics", "sweep", "validate"):
            assert command in result.stdout


class TestSpectrum:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "spec.csv"
        result = invoke("spectrum", "--g", "0.3", "-o", str(out))
        assert result.exit_code == EXIT_OK, result.stdout
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "index,parity,energy,n_tr"
        assert lines[1].startswith("0,plus,")


class TestDynamics:
    def test_writes_csv_and_sidecars(self, tmp_path):
        out = tmp_path / "dyn.csv"
        result = invoke("dynamics", "--g", "0.25", "--tmax", "5", "--steps", "51", "-o", str(out))
        assert result.exit_code == EXIT_OK, result.stdout
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,C_exact,C_rwa,C_transformed,n_ph1,n_ph2,norm_err"
        assert len(lines) == 52
        assert json.loads((tmp_path / "dyn.esd.json").read_text(encoding="utf-8")) == []
        assert "columns: t, C_exact" in (tmp_path / "dyn.plot.txt").read_text(encoding="utf-8")

    def test_uncoupled_atoms_constant_column(self, tmp_path):
        out = tmp_path / "g0.csv"
        result = invoke("dynamics", "--g", "0", "--alpha", "0.3", "--tmax", "10", "--steps", "21", "-o", str(out))
        assert result.exit_code == EXIT_OK, result.stdout
        rows = [line.split(",") for line in out.read_text(encoding="utf-8").splitlines()[1:]]
        assert all(float(row[1]) == pytest.approx(math.sin(0.6), abs=1e-10) for row in rows)

    def test_engine_only_columns(self, tmp_path):
        out = tmp_path / "engine.csv"
        result = invoke("dynamics", "--g", "0.2", "--tmax", "2", "--steps", "5", "--no-baselines", "-o", str(out))
        assert result.exit_code == EXIT_OK, result.stdout
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,C,n_ph1,n_ph2,norm_err"
        assert len(lines) == 6
        assert "columns: t, C, n_ph1" in (tmp_path / "engine.plot.txt").read_text(encoding="utf-8")

    def test_stdout(self):
        result = invoke("dynamics", "--g", "0.1", "--tmax", "1", "--steps", "3", "--out", "-")
        assert result.exit_code == EXIT_OK
        assert result.stdout.splitlines()[0].startswith("t,C_exact")
        assert len(result.stdout.splitlines()) == 4

    def test_deterministic(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            invoke("dynamics", "--g", "0.3", "--bell", "2", "--tmax", "4", "--steps", "41", "-o", str(path))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.toml"
        out = tmp_path / "from_config.csv"
        cfg.write_text(f'g = 0.2\nbell = 2\nt_max = 2.0\nn_steps = 5\nout = "{out.as_posix()}"\n', encoding="utf-8")
        result = invoke("dynamics", "-c", str(cfg), "--steps", "7")
        assert result.exit_code == EXIT_OK, result.stdout
        assert len(out.read_text(encoding="utf-8").splitlines()) == 8

    @pytest.mark.parametrize("args", [
        ("--bell", "3"),
        ("--g", "-0.5"),
        ("--steps", "1"),
    ])
    def test_usage_errors(self, tmp_path, args):
        result = invoke("dynamics", *args, "-o", str(tmp_path / "x.csv"))
        assert result.exit_code == EXIT_CONFIG

    def test_bad_config_file(self, tmp_path):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[physics]\ng = 0.1\n", encoding="utf-8")
        assert invoke("dynamics", "-c", str(cfg)).exit_code == EXIT_CONFIG
        assert invoke("dynamics", "-c", str(tmp_path / "missing.toml")).exit_code == EXIT_CONFIG

    def test_non_convergence(self, tmp_path):
        cfg = tmp_path / "tight.toml"
        cfg.write_text("n_tr_initial = 8\nn_tr_max = 8\n", encoding="utf-8")
        result = invoke("dynamics", "-c", str(cfg), "--steps", "3", "-o", str(tmp_path / "x.csv"))
        assert result.exit_code == EXIT_NUMERICAL
        assert "n_tr=8" in result.stdout


class TestSweep:
    def test_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        result = invoke(
            "sweep", "--g-grid", "0.05,0.1", "--alpha-grid", "0.3,0.7",
            "--tmax", "2", "--steps", "11", "-j", "1", "-o", str(out),
        )
        assert result.exit_code == EXIT_OK, result.stdout
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "g,alpha,t,C"
        assert len(lines) == 1 + 4 * 11
        assert (tmp_path / "sweep.summary.csv").exists()

    def test_needs_an_axis(self, tmp_path):
        result = invoke("sweep", "-o", str(tmp_path / "x.csv"))
        assert result.exit_code == EXIT_CONFIG

    def test_ratio_needs_nonzero_base_coupling(self, tmp_path):
        result = invoke("sweep", "--g", "0", "--g2", "0.2", "--g-grid", "0.1,0.3", "-o", str(tmp_path / "x.csv"))
        assert result.exit_code == EXIT_CONFIG

    def test_bad_grid_text(self, tmp_path):
        result = invoke("sweep", "--g-grid", "0.1,strong", "-o", str(tmp_path / "x.csv"))
        assert result.exit_code == EXIT_CONFIG

    def test_failed_points_exit_numerical(self, tmp_path):
        cfg = tmp_path / "tight.toml"
        cfg.write_text("n_tr_initial = 8\nn_tr_max = 8\n", encoding="utf-8")
        result = invoke(
            "sweep", "-c", str(cfg), "--g-grid", "0.1", "--steps", "3", "-j", "1",
            "-o", str(tmp_path / "x.csv"),
        )
        assert result.exit_code == EXIT_NUMERICAL
        errors = json.loads((tmp_path / "x.errors.json").read_text(encoding="utf-8"))
        assert errors[0]["error"] == "NonConvergence"


class TestValidate:
    @pytest.fixture
    def fake_report(self, monkeypatch):
        def install(*results: CheckResult) -> None:
            monkeypatch.setattr(app_module, "run_checks", lambda settings, only=None: ValidationReport(list(results)))
        return install

    def test_passed(self, fake_report, tmp_path):
        fake_report(CheckResult("invariants", {"g": 0.1}, "passed", 0.0, 1e-9))
        out = tmp_path / "report.json"
        result = invoke("validate", "-o", str(out))
        assert result.exit_code == EXIT_OK
        assert json.loads(out.read_text(encoding="utf-8"))["summary"]["passed"] is True

    def test_failed(self, fake_report):
        fake_report(
            CheckResult("invariants", {"g": 0.1}, "failed", 1.0, 1e-9),
            CheckResult("rwa-limit", {}, "error", math.nan, 1e-3),
        )
        assert invoke("validate").exit_code == EXIT_VALIDATION

    def test_errored(self, fake_report):
        fake_report(CheckResult("rwa-limit", {}, "error", math.nan, 1e-3, "NormLoss"))
        result = invoke("validate", "--format", "json")
        assert result.exit_code == EXIT_NUMERICAL
        assert json.loads(result.stdout)["summary"]["errors"] == 1

    def test_unknown_check(self):
        assert invoke("validate", "--only", "no-such-check").exit_code == EXIT_CONFIG

    def test_real_rwa_limit(self):
        result = invoke("validate", "--only", "rwa-limit", "--format", "json")
        assert result.exit_code == EXIT_OK, result.stdout
        data = json.loads(result.stdout)
        assert data["summary"]["total"] == 2
