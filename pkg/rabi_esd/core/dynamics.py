"""
单子系统动力学 - 谱传播与单时刻期望值

初态为（原子能级）⊗（原始腔模 a 的真空）。
|φ(t)> = Σ_l h^(l) e^(-iE_l t) |φ^(l)>，h^(l) = <φ^(l)|初态>。
谱传播的代价与时间步长无关，任意单调时间网格都可以。
"""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from rabi_esd.core.model import ModelParams
from rabi_esd.core.spectral import DisplacedSpectrum, OriginalBasisState, to_original_basis

logger = logging.getLogger(__name__)

AtomicLevel = Literal["up", "down"]


@dataclass(frozen=True)
class EigenBasis:
    """堆叠后的本征基：energies (L,)，up/down (L, N_F)"""
    energies: np.ndarray
    up: np.ndarray
    down: np.ndarray

    @classmethod
    def from_states(cls, states: list[OriginalBasisState]) -> "EigenBasis":
        return cls(
            energies=np.array([s.energy for s in states]),
            up=np.stack([s.phi_up for s in states]),
            down=np.stack([s.phi_down for s in states]),
        )

    @property
    def n_fock(self) -> int:
        return self.up.shape[1]


@dataclass(frozen=True)
class SubsystemTrajectory:
    """
    子系统轨迹

    Attributes:
        params: 物理参数
        times: 单调时间网格 (T,)
        comp_up: 上能级光子分量 (T, N_F)
        comp_down: 下能级光子分量 (T, N_F)
        initial_level: 初始原子能级
        basis: 用于传播的本征基（时间反演等诊断会用到）
    """
    params: ModelParams
    times: np.ndarray
    comp_up: np.ndarray
    comp_down: np.ndarray
    initial_level: AtomicLevel
    basis: EigenBasis

    @property
    def n_fock(self) -> int:
        return self.comp_up.shape[1]

    def __len__(self) -> int:
        return self.times.shape[0]


def as_time_grid(times) -> np.ndarray:
    """校验并转换时间网格：非空、有限、单调不减"""
    grid = np.atleast_1d(np.asarray(times, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("times must be a non-empty 1-D grid")
    if not np.all(np.isfinite(grid)):
        raise ValueError("times must be finite")
    if np.any(np.diff(grid) < 0):
        raise ValueError("times must be nondecreasing")
    return grid


def propagate(basis: EigenBasis, up0: np.ndarray, down0: np.ndarray, times) -> tuple[np.ndarray, np.ndarray]:
    """
    在给定本征基中把任意态传播到 times 上

    Returns:
        (comp_up, comp_down)，形状均为 (T, N_F)
    """
    grid = np.atleast_1d(np.asarray(times, dtype=float))
    h = basis.up.conj() @ up0 + basis.down.conj() @ down0
    coef = np.exp(-1j * np.outer(grid, basis.energies)) * h[None, :]
    return coef @ basis.up, coef @ basis.down


def vacuum_weights(basis: EigenBasis, level: AtomicLevel) -> np.ndarray:
    """h^(l) = <φ^(l)|level, 0>"""
    if level not in ("up", "down"):
        raise ValueError(f"initial level must be 'up' or 'down', got {level!r}")
    column = basis.up[:, 0] if level == "up" else basis.down[:, 0]
    return column.conj()


def evolve_subsystem(
    spec: DisplacedSpectrum,
    initial_level: AtomicLevel,
    times,
    n_fock: int | None = None,
) -> SubsystemTrajectory:
    """
    从 |level> ⊗ |0> 出发演化单个子系统

    Args:
        spec: 收敛后的位移基谱
        initial_level: "up" 或 "down"
        times: 单调不减的时间网格
        n_fock: 回变换 Fock 维数，默认由 spectral 决定

    Returns:
        SubsystemTrajectory

    Raises:
        NormLoss: 回变换时范数损失过大
    """
    if initial_level not in ("up", "down"):
        raise ValueError(f"initial level must be 'up' or 'down', got {initial_level!r}")
    grid = as_time_grid(times)
    basis = EigenBasis.from_states(to_original_basis(spec, n_fock))

    vacuum = np.zeros(basis.n_fock, dtype=complex)
    vacuum[0] = 1.0
    empty = np.zeros_like(vacuum)
    up0, down0 = (vacuum, empty) if initial_level == "up" else (empty, vacuum)

    comp_up, comp_down = propagate(basis, up0, down0, grid)
    return SubsystemTrajectory(
        params=spec.params,
        times=grid,
        comp_up=comp_up,
        comp_down=comp_down,
        initial_level=initial_level,
        basis=basis,
    )


def completeness(traj: SubsystemTrajectory) -> float:
    """Σ_l |h^(l)|²，初态在截断本征基中的投影权重"""
    h = vacuum_weights(traj.basis, traj.initial_level)
    return float(np.sum(np.abs(h) ** 2))


def reverse_phases(traj: SubsystemTrajectory, t_index: int) -> tuple[np.ndarray, np.ndarray]:
    """把 t_index 时刻的态按 -t 反向传播，应当回到初态"""
    _check_index(traj, t_index)
    t = traj.times[t_index]
    up, down = propagate(traj.basis, traj.comp_up[t_index], traj.comp_down[t_index], [-t])
    return up[0], down[0]


def _check_index(traj: SubsystemTrajectory, t_index: int) -> None:
    if not 0 <= t_index < len(traj):
        raise IndexError(f"t_index {t_index} out of range for grid of {len(traj)} points")


def norm_series(traj: SubsystemTrajectory) -> np.ndarray:
    return np.sum(np.abs(traj.comp_up) ** 2 + np.abs(traj.comp_down) ** 2, axis=1)


def photon_number_series(traj: SubsystemTrajectory) -> np.ndarray:
    """<a⁺a>(t)，在普通 Fock 基中计算"""
    k = np.arange(traj.n_fock, dtype=float)
    return (np.abs(traj.comp_up) ** 2 + np.abs(traj.comp_down) ** 2) @ k


def atomic_inversion_series(traj: SubsystemTrajectory) -> np.ndarray:
    """<σ_z>(t)"""
    return np.sum(np.abs(traj.comp_up) ** 2 - np.abs(traj.comp_down) ** 2, axis=1)


def energy_series(traj: SubsystemTrajectory) -> np.ndarray:
    """
    <H_JC>(t) = Δ/2<σ_z> + ω<a⁺a> + λ<(a + a⁺)σ_x>，普通 Fock 基
    """
    p = traj.params
    up, down = traj.comp_up, traj.comp_down
    sq = np.sqrt(np.arange(1, traj.n_fock, dtype=float))
    # <up|(a + a⁺)|down>
    cross = np.sum(
        sq * (up[:, :-1].conj() * down[:, 1:] + up[:, 1:].conj() * down[:, :-1]),
        axis=1,
    )
    return (
        0.5 * p.delta_atom * atomic_inversion_series(traj)
        + p.omega * photon_number_series(traj)
        + 2.0 * p.coupling * cross.real
    )


def mean_photon_number(traj: SubsystemTrajectory, t_index: int) -> float:
    """单时刻平均光子数，非负"""
    _check_index(traj, t_index)
    k = np.arange(traj.n_fock, dtype=float)
    weights = np.abs(traj.comp_up[t_index]) ** 2 + np.abs(traj.comp_down[t_index]) ** 2
    return max(0.0, float(weights @ k))


def mean_energy(traj: SubsystemTrajectory, t_index: int) -> float:
    _check_index(traj, t_index)
    window = SubsystemTrajectory(
        params=traj.params,
        times=traj.times[t_index:t_index + 1],
        comp_up=traj.comp_up[t_index:t_index + 1],
        comp_down=traj.comp_down[t_index:t_index + 1],
        initial_level=traj.initial_level,
        basis=traj.basis,
    )
    return float(energy_series(window)[0])
