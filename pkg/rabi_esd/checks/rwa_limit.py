"""
RWA limit check - 弱耦合下的解析极限
"""

import math

import numpy as np

from rabi_esd.checks.base import (
    CheckInfo,
    CheckRegistry,
    CheckResult,
    ValidationCheck,
    ValidationSettings,
)
from rabi_esd.core.analytic import first_death_time, rwa_amplitude
from rabi_esd.core.bipartite import BellSpec, concurrence_series
from rabi_esd.core.model import ModelParams

RWA_TOL = 1e-3
DEATH_TIME_RTOL = 1e-2
DEATH_TIME_G = 1e-3
PERIOD_SAMPLES = 2001


class RwaLimitCheck(ValidationCheck):
    """
    弱耦合共振时：
    - bell1, α=π/4 的 C(t) 在一个完整周期内跟随 cos²(λt)
    - bell2, α=π/12 的第一次死亡时刻与闭式根相差不超过 1%
    """

    @property
    def info(self) -> CheckInfo:
        return CheckInfo(
            name="rwa-limit",
            description="Weak-coupling cos² law and bell-2 death time",
            tolerance=RWA_TOL,
        )

    def _cos_squared(self, settings: ValidationSettings) -> CheckResult:
        params = ModelParams(omega=settings.omega, delta_atom=settings.omega, g=settings.rwa_g)
        lam = params.coupling
        times = np.linspace(0.0, math.pi / lam, PERIOD_SAMPLES)
        series = concurrence_series(
            params, params, BellSpec("bell1", math.pi / 4), times, settings.policy, settings.zero_threshold,
        )
        deviation = float(np.max(np.abs(series.concurrence - np.cos(lam * times) ** 2)))
        return CheckResult.compare(
            self.info.name,
            {"g": params.g, "bell": "bell1", "alpha": math.pi / 4, "quantity": "cos2-law"},
            deviation,
            RWA_TOL,
        )

    def _death_time(self, settings: ValidationSettings) -> CheckResult:
        alpha = math.pi / 12
        params = ModelParams(omega=settings.omega, delta_atom=settings.omega, g=DEATH_TIME_G)
        n_factor, nu = rwa_amplitude(params)
        expected = first_death_time(alpha, n_factor, nu)
        point = {"g": params.g, "bell": "bell2", "alpha": alpha, "quantity": "death-time"}
        if expected is None:
            return CheckResult(self.info.name, point, "error", math.nan, DEATH_TIME_RTOL, "closed form never dies")

        times = np.linspace(0.0, 1.5 * expected, 6001)
        series = concurrence_series(
            params, params, BellSpec("bell2", alpha), times, settings.policy, settings.zero_threshold,
        )
        if not series.esd_intervals:
            return CheckResult(self.info.name, point, "failed", math.inf, DEATH_TIME_RTOL, "engine shows no ESD")
        measured = series.esd_intervals[0][0]
        deviation = abs(measured - expected) / expected
        return CheckResult.compare(
            self.info.name, point, deviation, DEATH_TIME_RTOL,
            f"engine {measured:.4f} vs closed form {expected:.4f}",
        )

    def run(self, settings: ValidationSettings) -> list[CheckResult]:
        return [self._cos_squared(settings), self._death_time(settings)]


CheckRegistry.register(RwaLimitCheck())
