"""
Invariant check - 每个参数点上的物理不变量

范数、能量守恒、ρ 的合法性、本征态宇称纯度以及 C(0) = |sin2α|。
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
from rabi_esd.core.bipartite import BellSpec, TwoQubitDensity, density_series, wootters_concurrence
from rabi_esd.core.dynamics import energy_series, evolve_subsystem, norm_series
from rabi_esd.core.model import ModelParams
from rabi_esd.core.spectral import solve_subsystem, to_original_basis

TOLERANCES = {
    "norm": 1e-9,
    "energy-drift": 1e-9,
    "density": 1e-10,
    "parity-purity": 1e-8,
    "initial-concurrence": 1e-10,
}


def density_deviation(rho: np.ndarray) -> float:
    """厄米性、迹、负本征值三者中的最大偏差"""
    density = TwoQubitDensity(rho)
    return max(
        density.hermiticity_error(),
        abs(density.trace - 1.0),
        max(0.0, -density.min_eigenvalue()),
    )


class InvariantCheck(ValidationCheck):
    """不变量套件"""

    @property
    def info(self) -> CheckInfo:
        return CheckInfo(
            name="invariants",
            description="Norm, energy drift, density validity, parity purity, C(0)",
            tolerance=min(TOLERANCES.values()),
        )

    def run(self, settings: ValidationSettings) -> list[CheckResult]:
        times = settings.times()
        results: list[CheckResult] = []

        def record(point: dict, prop: str, deviation: float) -> None:
            results.append(CheckResult.compare(
                self.info.name, {**point, "quantity": prop}, deviation, TOLERANCES[prop],
            ))

        for g in settings.g_points:
            params = ModelParams(omega=settings.omega, delta_atom=settings.delta_atom, g=g)
            spec = solve_subsystem(params, settings.policy)
            point = {"g": g, "n_tr": spec.n_tr}

            states = to_original_basis(spec)
            record(point, "parity-purity", max(1.0 - s.parity_purity for s in states))

            traj = {lv: evolve_subsystem(spec, lv, times) for lv in ("up", "down")}
            record(point, "norm", max(float(np.max(np.abs(norm_series(t) - 1.0))) for t in traj.values()))
            drift = 0.0
            for t in traj.values():
                energy = energy_series(t)
                drift = max(drift, float(np.max(np.abs(energy - energy[0]))) / max(1.0, abs(energy[0])))
            record(point, "energy-drift", drift)

            for kind, alpha in settings.bell_points():
                bell = BellSpec(kind, alpha)
                rho, _, _ = density_series(traj["up"], traj["down"], traj["up"], traj["down"], bell)
                bell_point = {**point, "bell": kind, "alpha": alpha}
                record(bell_point, "density", max(density_deviation(r) for r in rho))
                c0 = wootters_concurrence(TwoQubitDensity(rho[0]))
                record(bell_point, "initial-concurrence", abs(c0 - abs(math.sin(2.0 * alpha))))
        return results


CheckRegistry.register(InvariantCheck())
