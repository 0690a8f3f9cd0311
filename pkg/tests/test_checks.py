"""校验套件：注册表、三个内置检查与变异检测"""

import math

import numpy as np
import pytest

from rabi_esd.checks import (
    CheckInfo,
    CheckRegistry,
    CheckResult,
    ValidationCheck,
    ValidationReport,
    ValidationSettings,
    run_checks,
)
from rabi_esd.core import model
from rabi_esd.core.errors import NonConvergence
from rabi_esd.core.model import TruncationPolicy


@pytest.fixture
def fast_settings() -> ValidationSettings:
    return ValidationSettings(
        g_points=(0.1,),
        t_max=5.0,
        n_steps=51,
        policy=TruncationPolicy(probe_t_max=5.0, probe_steps=51),
        oracle_n_fock=60,
    )


class BrokenCheck(ValidationCheck):
    @property
    def info(self) -> CheckInfo:
        return CheckInfo(name="broken", description="always raises", tolerance=0.0)

    def run(self, settings: ValidationSettings) -> list[CheckResult]:
        raise NonConvergence("no budget left", last_deviation=1.0, n_tr=8)


@pytest.fixture
def broken_check():
    CheckRegistry.register(BrokenCheck())
    yield
    CheckRegistry.unregister("broken")


class TestRegistry:
    def test_builtin_checks(self):
        names = CheckRegistry.get_available_names()
        assert {"oracle-equivalence", "rwa-limit", "invariants"} <= set(names)

    def test_clear_reloads_builtins(self):
        CheckRegistry.clear()
        assert CheckRegistry.get_check("invariants") is not None

    def test_register_ignores_duplicates(self):
        first = CheckRegistry.get_check("invariants")
        CheckRegistry.register(type(first)())
        assert CheckRegistry.get_check("invariants") is first

    def test_unknown_check(self, fast_settings):
        with pytest.raises(ValueError, match="Unknown check"):
            run_checks(fast_settings, ["no-such-check"])


class TestReport:
    def test_compare(self):
        assert CheckResult.compare("x", {}, 1e-9, 1e-8).status == "passed"
        assert CheckResult.compare("x", {}, 1e-7, 1e-8).status == "failed"

    def test_stats(self):
        report = ValidationReport([
            CheckResult("a", {}, "passed", 0.0, 1.0),
            CheckResult("a", {}, "failed", 2.0, 1.0),
            CheckResult("b", {}, "error", math.nan, 1.0),
        ])
        assert report.stats == {"total": 3, "passed": 1, "failed": 1, "error": 1}
        assert not report.passed
        assert list(report.by_check()) == ["a", "b"]

    def test_settings_grid(self):
        settings = ValidationSettings()
        assert settings.times().shape == (1500,)
        assert settings.bell_points() == [("bell1", math.pi / 4), ("bell2", math.pi / 12)]


class TestBuiltinChecks:
    def test_oracle_equivalence_passes(self, fast_settings):
        report = run_checks(fast_settings, ["oracle-equivalence"])
        assert report.stats["total"] == 3
        assert report.passed, [r for r in report.results if r.status != "passed"]

    def test_invariants_pass(self, fast_settings):
        report = run_checks(fast_settings, ["invariants"])
        quantities = {r.point["quantity"] for r in report.results}
        assert quantities == {"norm", "energy-drift", "density", "parity-purity", "initial-concurrence"}
        assert report.passed, [r for r in report.results if r.status != "passed"]

    def test_rwa_limit_passes(self, fast_settings):
        report = run_checks(fast_settings, ["rwa-limit"])
        assert [r.point["quantity"] for r in report.results] == ["cos2-law", "death-time"]
        assert report.passed, [r for r in report.results if r.status != "passed"]

    def test_numerical_error_becomes_error_result(self, fast_settings, broken_check):
        report = run_checks(fast_settings, ["broken"])
        assert report.stats["error"] == 1
        assert "NonConvergence" in report.results[0].message


class TestMutation:
    def test_flipped_overlap_sign_is_caught(self, monkeypatch):
        """D_mn 取反会交换两个宇称块，能谱不变但本征矢落到错误的宇称上"""
        original = model.overlap_matrix
        monkeypatch.setattr(model, "overlap_matrix", lambda g, size: -original(g, size))

        settings = ValidationSettings(
            g_points=(0.3,),
            t_max=10.0,
            n_steps=101,
            policy=TruncationPolicy(probe_t_max=10.0, probe_steps=101),
            oracle_n_fock=100,
        )
        report = run_checks(settings, ["oracle-equivalence"])
        concurrence = [r for r in report.results if r.point.get("quantity") == "concurrence"]
        assert any(r.status == "failed" for r in concurrence)
        assert max(r.max_deviation for r in concurrence) > 1e-3
        assert np.isfinite([r.max_deviation for r in concurrence]).all()
