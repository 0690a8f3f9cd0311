"""
双原子组装 - Bell 初态、约化密度矩阵、Wootters 共生度与 ESD 区间

两个子系统相互独立（H = H₁⊗1 + 1⊗H₂），联合态为两个 Bell 分支的
乘积态之和。约化密度矩阵由各分支光子分量的重叠收缩得到，
等价于在 4(N_tr+1)² 维联合本征基中的双重求和，但代价低得多。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import trapezoid

from rabi_esd.core.dynamics import (
    AtomicLevel,
    SubsystemTrajectory,
    as_time_grid,
    evolve_subsystem,
)
from rabi_esd.core.errors import GridMismatch, InvalidDensity
from rabi_esd.core.model import ModelParams, TruncationPolicy
from rabi_esd.core.spectral import solve_subsystem

logger = logging.getLogger(__name__)

BellKind = Literal["bell1", "bell2"]

DENSITY_TOL = 1e-10
DEFAULT_ZERO_THRESHOLD = 1e-9
MIN_ESD_RUN = 3

# σ_y ⊗ σ_y，基序 (↑↑, ↑↓, ↓↑, ↓↓)
SIGMA_YY = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=complex)


@dataclass(frozen=True)
class BellSpec:
    """
    Bell 初态（光子处于 |00>）

    Attributes:
        kind: bell1 = cosα|↑↓> + sinα|↓↑>；bell2 = cosα|↑↑> + sinα|↓↓>
        alpha: 混合角（弧度）
    """
    kind: BellKind
    alpha: float

    def __post_init__(self) -> None:
        if self.kind not in ("bell1", "bell2"):
            raise ValueError(f"Unknown Bell state kind: {self.kind!r}")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    def branches(self) -> list[tuple[float, AtomicLevel, AtomicLevel]]:
        """[(权重, 原子1能级, 原子2能级), ...]"""
        c, s = math.cos(self.alpha), math.sin(self.alpha)
        if self.kind == "bell1":
            return [(c, "up", "down"), (s, "down", "up")]
        return [(c, "up", "up"), (s, "down", "down")]

    def atomic_vector(self) -> np.ndarray:
        vec = np.zeros(4, dtype=complex)
        for weight, l1, l2 in self.branches():
            vec[2 * (l1 == "down") + (l2 == "down")] += weight
        return vec

    @property
    def initial_concurrence(self) -> float:
        return abs(math.sin(2.0 * self.alpha))


@dataclass(frozen=True)
class TwoQubitDensity:
    """两原子约化密度矩阵，4×4，基序 (↑↑, ↑↓, ↓↑, ↓↓)"""
    matrix: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def validate(self, tol: float = DENSITY_TOL) -> None:
        """
        校验厄米性、单位迹与半正定性

        Raises:
            InvalidDensity: 任一条件超出容差
        """
        if self.matrix.shape != (4, 4):
            raise InvalidDensity(f"Two-qubit density must be 4x4, got {self.matrix.shape}")
        herm = self.hermiticity_error()
        if herm > tol:
            raise InvalidDensity(f"Density matrix not Hermitian (deviation {herm:.3e})")
        if abs(self.trace - 1.0) > tol:
            raise InvalidDensity(f"Density matrix trace {self.trace:.12f} != 1")
        low = self.min_eigenvalue()
        if low < -tol:
            raise InvalidDensity(f"Density matrix not PSD (min eigenvalue {low:.3e})")


@dataclass
class ConcurrenceSeries:
    """
    共生度时间序列（CSV 输出单元）

    Attributes:
        times: 时间网格
        concurrence: C(t)
        photon1: 腔 1 平均光子数
        photon2: 腔 2 平均光子数
        norm_error: |Tr ρ(t) - 1|，即联合态范数误差
        esd_intervals: 纠缠突然死亡区间
        densities: ρ(t)，(T, 4, 4)
        n_tr: 两个子系统的最终截断
    """
    times: np.ndarray
    concurrence: np.ndarray
    photon1: np.ndarray
    photon2: np.ndarray
    norm_error: np.ndarray
    esd_intervals: list[tuple[float, float]] = field(default_factory=list)
    densities: np.ndarray | None = None
    n_tr: tuple[int, int] = (0, 0)


def _same_grid(trajs: list[SubsystemTrajectory]) -> None:
    ref = trajs[0].times
    for traj in trajs[1:]:
        if traj.times.shape != ref.shape or not np.array_equal(traj.times, ref):
            raise GridMismatch("All trajectories must share the same time grid")


BranchComponents = dict[AtomicLevel, tuple[np.ndarray, np.ndarray]]


def contract_components(
    bell: BellSpec,
    comps1: BranchComponents,
    comps2: BranchComponents,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    由两个子系统的光子分量组装 ρ(t)、n₁(t)、n₂(t)

    Args:
        bell: Bell 初态
        comps1, comps2: 初始原子能级 -> (上分量, 下分量)，形状均为 (T, N_F)
    """
    branches = bell.branches()
    w = np.array([b[0] for b in branches])
    # X[t, b, σ, k]：分支 b 中该子系统在原子能级 σ 上的光子分量
    x1 = np.stack([np.stack(comps1[b[1]], axis=1) for b in branches], axis=1)
    x2 = np.stack([np.stack(comps2[b[2]], axis=1) for b in branches], axis=1)

    # G[t, b, σ, c, σ'] = <φ_{c,σ'}|φ_{b,σ}>
    g1 = np.einsum("tbsk,tcrk->tbscr", x1, x1.conj())
    g2 = np.einsum("tbsk,tcrk->tbscr", x2, x2.conj())
    rho = np.einsum("b,c,tbxcy,tbucv->txuyv", w, w, g1, g2).reshape(-1, 4, 4)

    k1 = np.arange(x1.shape[-1], dtype=float)
    k2 = np.arange(x2.shape[-1], dtype=float)
    n1 = np.einsum("tbsk,tcsk,k->tbc", x1, x1.conj(), k1)
    n2 = np.einsum("tbsk,tcsk,k->tbc", x2, x2.conj(), k2)
    o1 = np.einsum("tbsk,tcsk->tbc", x1, x1.conj())
    o2 = np.einsum("tbsk,tcsk->tbc", x2, x2.conj())
    photon1 = np.einsum("b,c,tbc,tbc->t", w, w, n1, o2).real
    photon2 = np.einsum("b,c,tbc,tbc->t", w, w, o1, n2).real
    return rho, photon1, photon2


def _contract(
    traj1_up: SubsystemTrajectory,
    traj1_down: SubsystemTrajectory,
    traj2_up: SubsystemTrajectory,
    traj2_down: SubsystemTrajectory,
    bell: BellSpec,
    window: slice,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """返回窗口内的 ρ(t)、n₁(t)、n₂(t)"""
    _same_grid([traj1_up, traj1_down, traj2_up, traj2_down])

    def components(up: SubsystemTrajectory, down: SubsystemTrajectory) -> BranchComponents:
        return {
            "up": (up.comp_up[window], up.comp_down[window]),
            "down": (down.comp_up[window], down.comp_down[window]),
        }

    return contract_components(bell, components(traj1_up, traj1_down), components(traj2_up, traj2_down))


def joint_density(
    traj1_up: SubsystemTrajectory,
    traj1_down: SubsystemTrajectory,
    traj2_up: SubsystemTrajectory,
    traj2_down: SubsystemTrajectory,
    bell: BellSpec,
    t_index: int,
) -> TwoQubitDensity:
    """
    单时刻的两原子约化密度矩阵

    Args:
        traj1_up, traj1_down: 子系统 1 分别从 ↑、↓ 出发的轨迹
        traj2_up, traj2_down: 子系统 2 分别从 ↑、↓ 出发的轨迹
        bell: Bell 初态
        t_index: 时间指标

    Raises:
        GridMismatch: 四条轨迹时间网格不一致
    """
    n_t = len(traj1_up)
    if not 0 <= t_index < n_t:
        raise IndexError(f"t_index {t_index} out of range for grid of {n_t} points")
    rho, _, _ = _contract(traj1_up, traj1_down, traj2_up, traj2_down, bell, slice(t_index, t_index + 1))
    return TwoQubitDensity(rho[0])


def density_series(
    traj1_up: SubsystemTrajectory,
    traj1_down: SubsystemTrajectory,
    traj2_up: SubsystemTrajectory,
    traj2_down: SubsystemTrajectory,
    bell: BellSpec,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """整条网格上的 ρ(t)、n₁(t)、n₂(t)"""
    return _contract(traj1_up, traj1_down, traj2_up, traj2_down, bell, slice(None))


def wootters_concurrence(rho: TwoQubitDensity | np.ndarray, validate: bool = True) -> float:
    """
    Wootters 共生度 C = max(0, √λ₁ - √λ₂ - √λ₃ - √λ₄)

    λ_i 为 ρρ̃ 的本征值（降序），ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)。
    √λ_i 取自 ρ = Σ_i |w_i><w_i| 构造的对称矩阵 τ_ij = w_iᵀ(σ_y⊗σ_y)w_j 的奇异值，
    与 ρρ̃ 的本征值严格对应，接近纯态时不会把 1e-17 的舍入放大到 1e-9。
    ρ 的微小负本征值截断为零（低于 -1e-10 的会先被 validate 拦下）。

    Raises:
        InvalidDensity: validate 为真且 ρ 不合法
    """
    density = rho if isinstance(rho, TwoQubitDensity) else TwoQubitDensity(np.asarray(rho, dtype=complex))
    if validate:
        density.validate()

    herm = 0.5 * (density.matrix + density.matrix.conj().T)
    p, v = np.linalg.eigh(herm)
    if np.any(p < -1e-12):
        logger.debug("Clamping negative density eigenvalues %s", p[p < -1e-12])
    w = v * np.sqrt(np.clip(p, 0.0, None))[None, :]
    tau = w.T @ SIGMA_YY @ w
    roots = np.linalg.svd(tau, compute_uv=False)
    value = roots[0] - roots[1:].sum()
    return float(min(1.0, max(0.0, value)))


def concurrence_from_eigenvalues(rho: np.ndarray) -> float:
    """直接按 ρρ̃ 本征值计算（教科书形式，用于交叉检验）"""
    rho_tilde = SIGMA_YY @ rho.conj() @ SIGMA_YY
    lam = np.sort(np.linalg.eigvals(rho @ rho_tilde).real)[::-1]
    roots = np.sqrt(np.clip(lam, 0.0, None))
    return float(max(0.0, roots[0] - roots[1:].sum()))


def esd_runs(
    concurrence: np.ndarray,
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
    min_run: int = MIN_ESD_RUN,
) -> list[tuple[int, int]]:
    """C ≤ 阈值的极大连续指标段（闭区间），长度不少于 min_run"""
    if zero_threshold <= 0:
        raise ValueError(f"zero_threshold must be positive, got {zero_threshold}")
    dead = np.asarray(concurrence) <= zero_threshold
    runs: list[tuple[int, int]] = []
    start: int | None = None
    for i, flag in enumerate(dead):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= min_run:
                runs.append((start, i - 1))
            start = None
    if start is not None and len(dead) - start >= min_run:
        runs.append((start, len(dead) - 1))
    return runs


def detect_esd(
    series: ConcurrenceSeries,
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
) -> list[tuple[float, float]]:
    """
    检测纠缠突然死亡区间

    孤立的单点零（cos² 型横截零点）不算区间，至少连续 3 个采样点。
    """
    return [
        (float(series.times[a]), float(series.times[b]))
        for a, b in esd_runs(series.concurrence, zero_threshold)
    ]


def concurrence_series(
    params1: ModelParams,
    params2: ModelParams,
    bell: BellSpec,
    times,
    policy: TruncationPolicy | None = None,
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
) -> ConcurrenceSeries:
    """
    端到端流水线：求解两个子系统、演化四条轨迹、组装 ρ(t)、计算共生度与光子数

    params1 与 params2 可以不同（非对称原子）。
    """
    grid = as_time_grid(times)
    horizon = float(np.max(np.abs(grid)))
    spec1 = solve_subsystem(params1, policy, horizon)
    spec2 = spec1 if params2 == params1 else solve_subsystem(params2, policy, horizon)
    logger.info("n_tr = (%d, %d) for g = (%g, %g)", spec1.n_tr, spec2.n_tr, params1.g, params2.g)

    traj1 = {lv: evolve_subsystem(spec1, lv, grid) for lv in ("up", "down")}
    traj2 = traj1 if spec2 is spec1 else {lv: evolve_subsystem(spec2, lv, grid) for lv in ("up", "down")}

    rho, photon1, photon2 = density_series(traj1["up"], traj1["down"], traj2["up"], traj2["down"], bell)
    concurrence = np.array([wootters_concurrence(TwoQubitDensity(r)) for r in rho])
    norm_error = np.abs(np.einsum("tii->t", rho).real - 1.0)

    series = ConcurrenceSeries(
        times=grid,
        concurrence=concurrence,
        photon1=photon1,
        photon2=photon2,
        norm_error=norm_error,
        densities=rho,
        n_tr=(spec1.n_tr, spec2.n_tr),
    )
    series.esd_intervals = detect_esd(series, zero_threshold)
    return series


def photon_concurrence_correlation(series: ConcurrenceSeries) -> float:
    """C(t) 与 n₁+n₂ 的 Pearson 相关系数"""
    total = series.photon1 + series.photon2
    if np.std(series.concurrence) == 0 or np.std(total) == 0:
        return 0.0
    return float(np.corrcoef(series.concurrence, total)[0, 1])


def time_averaged_concurrence(series: ConcurrenceSeries) -> float:
    """梯形积分的时间平均；单点网格直接返回该点值"""
    t = series.times
    if t[-1] == t[0]:
        return float(series.concurrence[0])
    return float(trapezoid(series.concurrence, t) / (t[-1] - t[0]))
