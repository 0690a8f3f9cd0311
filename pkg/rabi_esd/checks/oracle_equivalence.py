"""
Oracle equivalence check - 位移基引擎与原始基暴力路径的比较

对每个耦合比较两类量：
1. 最低 20 个能级（容差 1e-8）
2. 两种 Bell 初态下的 C(t)（容差 1e-6）
"""

import logging
from dataclasses import replace

import numpy as np

from rabi_esd.checks.base import (
    CheckInfo,
    CheckRegistry,
    CheckResult,
    ValidationCheck,
    ValidationSettings,
)
from rabi_esd.core.bipartite import BellSpec, concurrence_series
from rabi_esd.core.model import ModelParams
from rabi_esd.core.oracle import (
    build_raw_hamiltonian,
    default_oracle_fock,
    oracle_concurrence_series,
    oracle_spectrum,
)
from rabi_esd.core.spectral import solve_subsystem

logger = logging.getLogger(__name__)

CONCURRENCE_TOL = 1e-6
SPECTRUM_TOL = 1e-8
SPECTRUM_LEVELS = 20
# 每个宇称保留 n_tr//2 + 1 个收敛能级，32 足以覆盖最低 20 个
SPECTRUM_MIN_NTR = 32


class OracleEquivalenceCheck(ValidationCheck):
    """引擎与暴力路径的等价性"""

    @property
    def info(self) -> CheckInfo:
        return CheckInfo(
            name="oracle-equivalence",
            description="Displaced-basis engine vs raw-basis brute force (spectrum and concurrence)",
            tolerance=CONCURRENCE_TOL,
        )

    def _spectrum_result(self, params: ModelParams, settings: ValidationSettings, n_fock: int) -> CheckResult:
        policy = replace(
            settings.policy,
            n_tr_initial=max(settings.policy.n_tr_initial, SPECTRUM_MIN_NTR),
            n_tr_max=max(settings.policy.n_tr_max, 2 * SPECTRUM_MIN_NTR),
            observable="spectrum",
        )
        engine = solve_subsystem(params, policy).sorted_energies()[:SPECTRUM_LEVELS]
        oracle = oracle_spectrum(build_raw_hamiltonian(params, n_fock), SPECTRUM_LEVELS)
        deviation = float(np.max(np.abs(engine - oracle)))
        return CheckResult.compare(
            self.info.name,
            {"g": params.g, "quantity": "spectrum"},
            deviation,
            SPECTRUM_TOL,
        )

    def run(self, settings: ValidationSettings) -> list[CheckResult]:
        times = settings.times()
        results: list[CheckResult] = []
        for g in settings.g_points:
            params = ModelParams(omega=settings.omega, delta_atom=settings.delta_atom, g=g)
            n_fock = settings.oracle_n_fock or default_oracle_fock(g)
            results.append(self._spectrum_result(params, settings, n_fock))

            for kind, alpha in settings.bell_points():
                bell = BellSpec(kind, alpha)
                engine = concurrence_series(params, params, bell, times, settings.policy, settings.zero_threshold)
                oracle = oracle_concurrence_series(params, params, bell, times, n_fock, settings.zero_threshold)
                deviation = float(np.max(np.abs(engine.concurrence - oracle.concurrence)))
                logger.debug("g=%g %s concurrence deviation %.3e", g, kind, deviation)
                results.append(CheckResult.compare(
                    self.info.name,
                    {"g": g, "bell": kind, "alpha": alpha, "quantity": "concurrence"},
                    deviation,
                    CONCURRENCE_TOL,
                ))
        return results


CheckRegistry.register(OracleEquivalenceCheck())
