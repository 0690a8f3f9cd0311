"""
暴力校验路径 - 原始 (原子 ⊗ Fock) 基中的哈密顿量与两种独立传播器

只用于测试与 validate 子命令。除 ModelParams 外不复用模型核心与谱模块的代码，
从而与位移基引擎保持独立；慢几个数量级也无妨。
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from rabi_esd.core.bipartite import BellSpec, ConcurrenceSeries, detect_esd, wootters_concurrence
from rabi_esd.core.errors import StepUnderflow
from rabi_esd.core.model import ModelParams

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_FOCK = 200
TAIL_MASS_LIMIT = 1e-12
MIN_STEP = 1e-12


@dataclass(frozen=True)
class RawHamiltonian:
    """
    原始基中的实对称哈密顿量

    基序：指标 σ·n_fock + k，σ = 0 为 ↑，σ = 1 为 ↓。

    Attributes:
        params: 物理参数
        n_fock: 每个原子能级下的 Fock 截断
        matrix: (2·n_fock) × (2·n_fock)
    """
    params: ModelParams
    n_fock: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    def basis_state(self, level: str, photons: int = 0) -> np.ndarray:
        """|level, photons>"""
        if level not in ("up", "down"):
            raise ValueError(f"level must be 'up' or 'down', got {level!r}")
        if not 0 <= photons < self.n_fock:
            raise ValueError(f"photons must be in [0, {self.n_fock}), got {photons}")
        state = np.zeros(self.dim, dtype=complex)
        state[(0 if level == "up" else self.n_fock) + photons] = 1.0
        return state


def annihilation(n_fock: int) -> np.ndarray:
    """a，a[k-1, k] = sqrt(k)"""
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1)


def build_raw_hamiltonian(params: ModelParams, n_fock: int = DEFAULT_ORACLE_FOCK) -> RawHamiltonian:
    """
    H = Δ/2 σ_z + ω a⁺a + λ(a + a⁺)σ_x，λ = g·ω

    Raises:
        ValueError: n_fock < 2
    """
    if n_fock < 2:
        raise ValueError(f"n_fock must be >= 2, got {n_fock}")
    photons = params.omega * np.diag(np.arange(n_fock, dtype=float))
    half = 0.5 * params.delta_atom * np.eye(n_fock)
    a = annihilation(n_fock)
    coupling = params.coupling * (a + a.T)

    matrix = np.block([
        [photons + half, coupling],
        [coupling, photons - half],
    ])
    return RawHamiltonian(params=params, n_fock=n_fock, matrix=matrix)


def parity_operator(n_fock: int) -> np.ndarray:
    """Π = σ_z (-1)^(a⁺a)，对角"""
    photon_sign = (-1.0) ** np.arange(n_fock)
    return np.diag(np.concatenate([photon_sign, -photon_sign]))


def _grid(times) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(times, dtype=float))
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("times must be a non-empty finite 1-D grid")
    if np.any(np.diff(grid) < 0):
        raise ValueError("times must be nondecreasing")
    return grid


def _unit(initial: np.ndarray) -> np.ndarray:
    psi = np.asarray(initial, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ValueError("initial state must have unit norm")
    return psi


def oracle_spectrum(raw: RawHamiltonian, n_levels: int | None = None) -> np.ndarray:
    """升序本征能量（可只取最低 n_levels 个）"""
    values = scipy.linalg.eigh(raw.matrix, eigvals_only=True)
    return values if n_levels is None else values[:n_levels]


def propagate_eig(raw: RawHamiltonian, initial: np.ndarray, times) -> np.ndarray:
    """
    稠密本征分解的谱传播 e^(-iHt)|ψ₀>

    Returns:
        (T, 2·n_fock) 复数数组
    """
    psi0 = _unit(initial)
    grid = _grid(times)
    values, vectors = scipy.linalg.eigh(raw.matrix)
    weights = vectors.T @ psi0
    phases = np.exp(-1j * np.outer(grid, values)) * weights[None, :]
    return phases @ vectors.T


def _rk4_step(matrix: np.ndarray, psi: np.ndarray, dt: float) -> np.ndarray:
    k1 = -1j * (matrix @ psi)
    k2 = -1j * (matrix @ (psi + 0.5 * dt * k1))
    k3 = -1j * (matrix @ (psi + 0.5 * dt * k2))
    k4 = -1j * (matrix @ (psi + dt * k3))
    return psi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate_step(
    raw: RawHamiltonian,
    initial: np.ndarray,
    times,
    dt_max: float = 0.05,
    local_tol: float = 1e-12,
) -> np.ndarray:
    """
    经典四阶 Runge-Kutta 积分 Schrödinger 方程，步长加倍/减半控制误差

    每一步同时做一个整步和两个半步，差值作为局部误差估计；
    接受时用 Richardson 外推 half + (half - full)/15。

    Args:
        raw: 原始哈密顿量
        initial: 单位范数初态
        times: 输出时间网格
        dt_max: 最大步长
        local_tol: 每步局部误差上限

    Returns:
        (T, 2·n_fock) 复数数组

    Raises:
        StepUnderflow: 步长减半到 1e-12 以下
    """
    psi = _unit(initial).copy()
    grid = _grid(times)
    if dt_max <= 0:
        raise ValueError(f"dt_max must be positive, got {dt_max}")

    out = np.empty((grid.size, raw.dim), dtype=complex)
    t = grid[0]
    dt = dt_max
    steps = 0
    for i, target in enumerate(grid):
        while target - t > 0:
            h = min(dt, target - t)
            full = _rk4_step(raw.matrix, psi, h)
            half = _rk4_step(raw.matrix, _rk4_step(raw.matrix, psi, 0.5 * h), 0.5 * h)
            err = float(np.max(np.abs(half - full)))
            if err > local_tol:
                dt = 0.5 * h
                if dt < MIN_STEP:
                    raise StepUnderflow(
                        f"RK4 step underflow at t={t:.6g} (dt={dt:.3e}, error {err:.3e})",
                        dt=dt,
                        t=t,
                    )
                continue
            psi = half + (half - full) / 15.0
            t += h
            steps += 1
            if err < local_tol / 64.0:
                dt = min(max(dt, 2.0 * h), dt_max)
        out[i] = psi
    logger.debug("RK4 reached t=%g in %d accepted steps", t, steps)
    return out


def expectation(raw: RawHamiltonian, states: np.ndarray) -> np.ndarray:
    """<ψ(t)|H|ψ(t)>，states 形状 (T, 2·n_fock)"""
    return np.einsum("ti,ij,tj->t", states.conj(), raw.matrix, states).real


def tail_mass(states: np.ndarray, n_fock: int, width: int | None = None) -> float:
    """最高 width 个 Fock 能级上的最大概率（两原子能级合计）"""
    width = width or max(1, n_fock // 10)
    amps = np.abs(states.reshape(states.shape[0], 2, n_fock)) ** 2
    return float(np.max(amps[:, :, n_fock - width:].sum(axis=(1, 2))))


def oracle_concurrence_series(
    params1: ModelParams,
    params2: ModelParams,
    bell: BellSpec,
    times,
    n_fock: int = DEFAULT_ORACLE_FOCK,
    zero_threshold: float = 1e-9,
) -> ConcurrenceSeries:
    """
    在两个原始空间的张量积中直接求两原子约化密度矩阵与共生度

    每个分支的联合态是两条单原子轨迹的外积，对两个腔模求偏迹得到 4×4 的 ρ(t)。
    截断尾部概率超过 1e-12 时记录警告。
    """
    grid = _grid(times)
    raw1 = build_raw_hamiltonian(params1, n_fock)
    raw2 = raw1 if params2 == params1 else build_raw_hamiltonian(params2, n_fock)

    def trajectories(raw: RawHamiltonian) -> dict[str, np.ndarray]:
        return {lv: propagate_eig(raw, raw.basis_state(lv), grid) for lv in ("up", "down")}

    traj1 = trajectories(raw1)
    traj2 = traj1 if raw2 is raw1 else trajectories(raw2)

    worst_tail = max(tail_mass(states, n_fock) for tr in (traj1, traj2) for states in tr.values())
    if worst_tail > TAIL_MASS_LIMIT:
        logger.warning("Oracle tail mass %.3e exceeds %.0e at n_fock=%d", worst_tail, TAIL_MASS_LIMIT, n_fock)

    k = np.arange(n_fock, dtype=float)
    n_t = grid.size
    rho = np.empty((n_t, 4, 4), dtype=complex)
    photon1 = np.empty(n_t)
    photon2 = np.empty(n_t)
    for i in range(n_t):
        joint = np.zeros((raw1.dim, raw2.dim), dtype=complex)
        for weight, l1, l2 in bell.branches():
            joint += weight * np.outer(traj1[l1][i], traj2[l2][i])
        psi = joint.reshape(2, n_fock, 2, n_fock)
        rho[i] = np.einsum("akbl,ckdl->abcd", psi, psi.conj()).reshape(4, 4)
        prob = np.abs(psi) ** 2
        photon1[i] = float(np.einsum("akbl,k->", prob, k))
        photon2[i] = float(np.einsum("akbl,l->", prob, k))

    concurrence = np.array([wootters_concurrence(r) for r in rho])
    series = ConcurrenceSeries(
        times=grid,
        concurrence=concurrence,
        photon1=photon1,
        photon2=photon2,
        norm_error=np.abs(np.einsum("tii->t", rho).real - 1.0),
        densities=rho,
    )
    series.esd_intervals = detect_esd(series, zero_threshold)
    return series


def default_oracle_fock(g: float) -> int:
    """g ≤ 1 用 200，更强耦合按 <a⁺a> ~ g² 增长放大"""
    if g <= 1.0:
        return DEFAULT_ORACLE_FOCK
    return DEFAULT_ORACLE_FOCK + math.ceil(100.0 * g * g)
