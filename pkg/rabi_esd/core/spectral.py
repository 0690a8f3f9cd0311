"""
谱求解 - 分宇称对称本征问题、截断收敛与回变换

流程：
1. 对 ± 两个宇称块做稠密对称本征分解
2. 截断加倍直到保留能级（以及可选的探针轨迹）不再变化
3. 把位移基本征矢展开回哈密顿量 (1) 的普通 Fock 基，并撤销 π/4 旋转
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from rabi_esd.core.errors import EigenSolverError, NonConvergence, NormLoss
from rabi_esd.core.model import (
    ModelParams,
    ParitySign,
    TruncationPolicy,
    build_parity_block,
    displacement_matrix,
)

logger = logging.getLogger(__name__)

# 回变换允许的最大范数损失
NORM_LOSS_LIMIT = 1e-8
# 长时间探针网格的相位舍入下限系数
ROUNDOFF_FACTOR = 64
# 共生度判据下每个宇称比较的低能级数
LOW_LYING_LEVELS = 10

PARITIES: tuple[ParitySign, ParitySign] = ("plus", "minus")


@dataclass(frozen=True)
class EigenDecomposition:
    """升序本征值与正交归一本征矢（按列）"""
    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SpectralLevel:
    """
    位移基中的一个本征能级

    Attributes:
        energy: 本征能量 E_l
        parity: 所属宇称分支
        coeffs: 单位范数系数 c_n，长度 n_tr + 1
    """
    energy: float
    parity: ParitySign
    coeffs: np.ndarray


@dataclass(frozen=True)
class DisplacedSpectrum:
    """
    单个子系统的位移基谱

    levels 先列 plus 分支再列 minus 分支，各分支内能量升序。
    """
    params: ModelParams
    n_tr: int
    levels: tuple[SpectralLevel, ...]

    def energies(self, parity: ParitySign | None = None) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels if parity is None or lv.parity == parity])

    def sorted_energies(self) -> np.ndarray:
        return np.sort(self.energies())


@dataclass(frozen=True)
class OriginalBasisState:
    """
    普通 Fock 基下的本征态（撤销旋转之后）

    Attributes:
        energy: 本征能量，与 DisplacedSpectrum 中逐位相同
        parity: 所属分支
        phi_up: 上能级分量
        phi_down: 下能级分量
        norm_loss: 截断到 n_fock 时丢失的范数（归一化之前）
    """
    energy: float
    parity: ParitySign
    phi_up: np.ndarray
    phi_down: np.ndarray
    norm_loss: float

    @property
    def n_fock(self) -> int:
        return self.phi_up.shape[0]

    @property
    def parity_purity(self) -> float:
        """|<Π>|，纯宇称态为 1"""
        return abs(parity_of(self.phi_up, self.phi_down))


def symmetric_eig(matrix: np.ndarray) -> EigenDecomposition:
    """
    实对称矩阵的稠密本征分解（LAPACK syevr，经 scipy.linalg.eigh）

    分解后逐对检查残差 ‖Av - λv‖ ≤ 1e-10·‖A‖ 以及本征矢正交归一性，
    失败时抛出 EigenSolverError 而不是返回不可靠的结果。
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"symmetric_eig needs a square matrix, got shape {a.shape}")
    scale = float(np.linalg.norm(a))
    if a.size and np.max(np.abs(a - a.T)) > 1e-14 * max(scale, 1.0):
        raise ValueError("symmetric_eig needs a symmetric matrix")

    try:
        values, vectors = scipy.linalg.eigh(a, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(f"Dense symmetric eigensolver failed: {e}") from e

    residual = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    if residual.size and residual.max() > 1e-10 * scale:
        raise EigenSolverError(
            f"Eigenpair residual {residual.max():.3e} exceeds 1e-10·‖A‖ = {1e-10 * scale:.3e}"
        )
    ortho = np.max(np.abs(vectors.T @ vectors - np.eye(a.shape[0]))) if a.size else 0.0
    if ortho > 1e-10:
        raise EigenSolverError(f"Eigenvectors not orthonormal (deviation {ortho:.3e})")
    return EigenDecomposition(values=values, vectors=vectors)


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    """固定本征矢整体符号：最大分量为正"""
    pivot = int(np.argmax(np.abs(vector)))
    return vector if vector[pivot] >= 0 else -vector


def solve_at_truncation(params: ModelParams, n_tr: int) -> DisplacedSpectrum:
    """在固定截断 n_tr 下求解两个宇称块"""
    levels: list[SpectralLevel] = []
    for parity in PARITIES:
        block = build_parity_block(params, parity, n_tr)
        eig = symmetric_eig(block.matrix)
        for i, energy in enumerate(eig.values):
            levels.append(SpectralLevel(
                energy=float(energy),
                parity=parity,
                coeffs=_fix_sign(eig.vectors[:, i]),
            ))
    return DisplacedSpectrum(params=params, n_tr=n_tr, levels=tuple(levels))


def _retained_deviation(
    coarse: DisplacedSpectrum,
    fine: DisplacedSpectrum,
    observable: str,
) -> float:
    """
    比较保留能级

    spectrum 判据保留每个宇称最低 n_tr//2 + 1 个能级；concurrence 判据只保留
    最低 LOW_LYING_LEVELS 个，其余高能级对真空出发的动力学的影响由轨迹判据覆盖。
    """
    keep = coarse.n_tr // 2 + 1
    if observable == "concurrence":
        keep = min(keep, LOW_LYING_LEVELS)
    deviation = 0.0
    for parity in PARITIES:
        a = coarse.energies(parity)[:keep]
        b = fine.energies(parity)[:keep]
        deviation = max(deviation, float(np.max(np.abs(a - b))))
    return deviation


def branch_overlaps(spec: DisplacedSpectrum, probe: np.ndarray) -> np.ndarray:
    """
    O[t, a, σ, b, σ'] = <χ_{b,σ'}(t)|χ_{a,σ}(t)>

    χ_{a,σ} 为从 |a, 0> 出发的轨迹在原子能级 σ 上的光子分量。两原子约化密度矩阵
    只通过这些重叠依赖于子系统，因此它们收敛即共生度曲线收敛。
    """
    from rabi_esd.core.dynamics import evolve_subsystem

    trajs = [evolve_subsystem(spec, level, probe) for level in ("up", "down")]
    x = np.stack([np.stack([tr.comp_up, tr.comp_down], axis=1) for tr in trajs], axis=1)
    return np.einsum("task,tbrk->tasbr", x, x.conj())


def _trajectory_deviation(
    coarse: DisplacedSpectrum,
    fine: DisplacedSpectrum,
    probe: np.ndarray,
) -> float:
    """两种截断下分支重叠在探针网格上的最大偏差"""
    return float(np.max(np.abs(branch_overlaps(coarse, probe) - branch_overlaps(fine, probe))))


def solve_subsystem(
    params: ModelParams,
    policy: TruncationPolicy | None = None,
    horizon: float | None = None,
) -> DisplacedSpectrum:
    """
    带截断收敛控制的子系统求解

    从 policy.n_tr_initial 开始反复加倍，返回使“再加倍一次”的变化小于
    convergence_tol 的最小截断。observable 为 concurrence 时，除低能级外
    还要求探针网格上的分支重叠（完全决定约化密度矩阵）同样收敛。

    Args:
        params: 物理参数
        policy: 截断策略，默认 TruncationPolicy()
        horizon: 调用方时间网格的终点，探针网格延伸到 max(probe_t_max, horizon)

    Returns:
        DisplacedSpectrum，n_tr 为最终截断

    Raises:
        NonConvergence: 加倍后的截断将超过 n_tr_max
    """
    policy = policy or TruncationPolicy()
    probe = policy.probe_times(horizon) if policy.observable == "concurrence" else None

    n_tr = policy.n_tr_initial
    current = solve_at_truncation(params, n_tr)
    last_deviation = math.inf

    while 2 * n_tr <= policy.n_tr_max:
        refined = solve_at_truncation(params, 2 * n_tr)
        deviation = _retained_deviation(current, refined, policy.observable)
        converged = deviation < policy.convergence_tol
        if probe is not None and converged:
            # 相位舍入随 E·t 增长，长时间窗口下判据不能比它更严
            floor = ROUNDOFF_FACTOR * np.finfo(float).eps * probe[-1] * _energy_scale(refined)
            trajectory = _trajectory_deviation(current, refined, probe)
            converged = trajectory < max(policy.convergence_tol, floor)
            deviation = max(deviation, trajectory)
        logger.debug("g=%g n_tr=%d -> %d deviation %.3e", params.g, n_tr, 2 * n_tr, deviation)
        last_deviation = deviation
        if converged:
            logger.debug("g=%g converged at n_tr=%d", params.g, n_tr)
            return current
        current, n_tr = refined, 2 * n_tr

    raise NonConvergence(
        f"No convergence for g={params.g} up to n_tr_max={policy.n_tr_max} "
        f"(last deviation {last_deviation:.3e}, tolerance {policy.convergence_tol:.1e})",
        last_deviation=last_deviation,
        n_tr=n_tr,
    )


def _energy_scale(spec: DisplacedSpectrum) -> float:
    """低能级的最大 |E|，相位舍入的量级"""
    low = [spec.energies(parity)[:LOW_LYING_LEVELS] for parity in PARITIES]
    return max(1.0, float(np.max(np.abs(np.concatenate(low)))))


def default_fock_dimension(g: float, n_tr: int) -> int:
    """回变换使用的公共 Fock 维数"""
    return n_tr + math.ceil(8.0 * g) + 16 + math.ceil(8.0 * g * math.sqrt(n_tr + 1))


def to_original_basis(spec: DisplacedSpectrum, n_fock: int | None = None) -> list[OriginalBasisState]:
    """
    把位移基本征矢展开到普通 Fock 基

    旋转后上分量为 Σ c_n |n>_A，|n>_A = D(-g)|n>；下分量为 ∓(-1)^k 乘同一向量。
    V⁺ 旋转后 plus 分支只在 (↑, 偶数光子) 与 (↓, 奇数光子) 上有分量，
    即宇称 Π = σ_z(-1)^(a⁺a) 的本征值 +1；minus 分支相反。

    Args:
        spec: 位移基谱
        n_fock: 公共 Fock 维数，默认 default_fock_dimension

    Returns:
        与 spec.levels 同序的 OriginalBasisState 列表

    Raises:
        NormLoss: 任一本征态丢失的范数超过 1e-8
    """
    if n_fock is None:
        n_fock = default_fock_dimension(spec.params.g, spec.n_tr)
    if n_fock < spec.n_tr:
        raise ValueError(f"n_fock ({n_fock}) must be >= n_tr ({spec.n_tr})")

    disp = displacement_matrix(-spec.params.g, n_fock, spec.n_tr + 1)
    even = np.arange(n_fock) % 2 == 0

    states: list[OriginalBasisState] = []
    worst = 0.0
    for level in spec.levels:
        u = disp @ level.coeffs
        up_mask = even if level.parity == "plus" else ~even
        phi_up = np.where(up_mask, u, 0.0).astype(complex)
        phi_down = np.where(up_mask, 0.0, u).astype(complex)
        norm_sq = float(np.dot(u, u))
        loss = max(0.0, 1.0 - norm_sq)
        worst = max(worst, loss)
        scale = 1.0 / math.sqrt(norm_sq)
        states.append(OriginalBasisState(
            energy=level.energy,
            parity=level.parity,
            phi_up=phi_up * scale,
            phi_down=phi_down * scale,
            norm_loss=loss,
        ))

    if worst > NORM_LOSS_LIMIT:
        raise NormLoss(
            f"Back-transformation lost {worst:.3e} of norm at n_fock={n_fock} (n_tr={spec.n_tr})",
            max_loss=worst,
            n_fock=n_fock,
        )
    return states


def parity_of(phi_up: np.ndarray, phi_down: np.ndarray) -> float:
    """<Π>，Π = σ_z(-1)^(a⁺a)"""
    sign = (-1.0) ** np.arange(phi_up.shape[-1])
    return float(np.sum(sign * (np.abs(phi_up) ** 2 - np.abs(phi_down) ** 2)))
