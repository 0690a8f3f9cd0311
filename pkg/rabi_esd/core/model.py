"""
模型核心 - 物理参数与位移 Fock 基矩阵成分

为位移基本征问题构造全部矩阵成分：
1. 位移重叠 D_mn（两族相距 2g 的位移 Fock 态之间的重叠，含拟设中的 (-1)^n 因子）
2. 位移算符矩阵元 <k|D(β)|n>，D(β) = exp(β(a⁺ - a))
3. 按宇称分块的哈密顿矩阵 H^(±)_mn = ω(m - g²)δ_mn ± (Δ/2)D_mn

所有阶乘都以 log-Gamma 形式累积并单独跟踪符号，m, n 到几百仍然稳定。
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

logger = logging.getLogger(__name__)

ParitySign = Literal["plus", "minus"]
Observable = Literal["concurrence", "spectrum"]

# 显式级数的最大项（对数）不超过该值时，交错求和的绝对误差在 1e-15 量级
SERIES_LOG_LIMIT = 0.0


@dataclass(frozen=True)
class ModelParams:
    """
    单个原子-腔子系统的物理参数（ħ = 1）

    Attributes:
        omega: 腔频率 ω
        delta_atom: 原子能级劈裂 Δ
        g: 无量纲耦合 λ/ω
        alpha: Bell 态混合角（弧度）
    """
    omega: float = 1.0
    delta_atom: float = 1.0
    g: float = 0.0
    alpha: float = math.pi / 4

    def __post_init__(self) -> None:
        for name in ("omega", "delta_atom", "g", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")

    @property
    def detuning(self) -> float:
        """δ = ω - Δ，每次由另外两个量重新计算"""
        return self.omega - self.delta_atom

    @property
    def coupling(self) -> float:
        """能量量纲的耦合常数 λ = g·ω"""
        return self.g * self.omega

    @classmethod
    def from_detuning(
        cls,
        g: float,
        detuning: float = 0.0,
        omega: float = 1.0,
        alpha: float = math.pi / 4,
    ) -> "ModelParams":
        """固定 ω 的约定下由失谐构造：Δ = ω - δ"""
        return cls(omega=omega, delta_atom=omega - detuning, g=g, alpha=alpha)


@dataclass(frozen=True)
class ParityBlock:
    """
    一个宇称分支的实对称哈密顿块

    Attributes:
        sign: 拟设中的 ± 分支
        matrix: (n_tr+1) × (n_tr+1) 实对称矩阵
    """
    sign: ParitySign
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class TruncationPolicy:
    """
    截断收敛策略

    Attributes:
        n_tr_initial: 起始截断
        n_tr_max: 截断上限（加倍后的截断不得超过它）
        convergence_tol: 加倍前后允许的最大偏差
        observable: 判据所看的量，concurrence 时还比较探针网格上的子系统轨迹
        probe_t_max: 探针时间网格的最短终点
        probe_steps: 探针时间网格点数
    """
    n_tr_initial: int = 8
    n_tr_max: int = 256
    convergence_tol: float = 1e-10
    observable: Observable = "concurrence"
    probe_t_max: float = 30.0
    probe_steps: int = 301

    def __post_init__(self) -> None:
        if self.n_tr_initial < 4:
            raise ValueError(f"n_tr_initial must be >= 4, got {self.n_tr_initial}")
        if self.n_tr_max < self.n_tr_initial:
            raise ValueError(
                f"n_tr_max ({self.n_tr_max}) must be >= n_tr_initial ({self.n_tr_initial})"
            )
        if not self.convergence_tol > 0:
            raise ValueError(f"convergence_tol must be positive, got {self.convergence_tol}")
        if self.observable not in ("concurrence", "spectrum"):
            raise ValueError(f"Unknown observable: {self.observable}")
        if self.probe_t_max <= 0 or self.probe_steps < 2:
            raise ValueError("probe grid needs probe_t_max > 0 and probe_steps >= 2")

    def probe_times(self, horizon: float | None = None) -> np.ndarray:
        """探针网格；给出调用方的时间终点时延伸到 max(probe_t_max, horizon)"""
        t_end = self.probe_t_max if horizon is None else max(self.probe_t_max, float(horizon))
        return np.linspace(0.0, t_end, self.probe_steps)


def _check_index(name: str, value: int) -> None:
    if int(value) != value or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


def _displacement_kernel(beta: float, k: np.ndarray, n: np.ndarray) -> np.ndarray:
    """
    <k|D(β)|n> 的向量化核（实 β）

    k ≥ n 时为 sqrt(n!/k!) β^(k-n) e^(-β²/2) L_n^(k-n)(β²)，
    k < n 时由 <k|D(β)|n> = <n|D(-β)|k> 得到。前因子在对数空间计算。
    """
    k, n = np.broadcast_arrays(np.asarray(k, dtype=np.int64), np.asarray(n, dtype=np.int64))
    if beta == 0.0:
        return (k == n).astype(float)

    lo = np.minimum(k, n)
    hi = np.maximum(k, n)
    diff = hi - lo
    x = beta * beta

    laguerre = eval_genlaguerre(lo, diff.astype(float), x)
    log_prefactor = 0.5 * (gammaln(lo + 1.0) - gammaln(hi + 1.0)) + diff * math.log(abs(beta)) - 0.5 * x

    # 符号：k ≥ n 取 sign(β)^diff，k < n 取 (-sign(β))^diff
    base = np.where(k >= n, math.copysign(1.0, beta), -math.copysign(1.0, beta))
    sign = np.where(diff % 2 == 0, 1.0, base) * np.sign(laguerre)

    with np.errstate(divide="ignore"):
        magnitude = np.exp(log_prefactor + np.log(np.abs(laguerre)))
    return sign * magnitude


def displacement_matrix(beta: float, n_rows: int, n_cols: int | None = None) -> np.ndarray:
    """
    位移算符在普通 Fock 基下的矩形块 M[k, n] = <k|D(β)|n>

    Args:
        beta: 实位移
        n_rows: 行数（Fock 维数）
        n_cols: 列数，默认与 n_rows 相同

    Returns:
        (n_rows, n_cols) 实矩阵
    """
    n_cols = n_rows if n_cols is None else n_cols
    _check_index("n_rows", n_rows)
    _check_index("n_cols", n_cols)
    k = np.arange(n_rows)[:, None]
    n = np.arange(n_cols)[None, :]
    return _displacement_kernel(float(beta), k, n)


def displacement_matrix_element(beta: float, k: int, n: int) -> float:
    """<k|D(β)|n>，缔合 Laguerre 闭式，对数前因子"""
    _check_index("k", k)
    _check_index("n", n)
    return float(_displacement_kernel(float(beta), np.array(k), np.array(n)))


def overlap_matrix(g: float, size: int) -> np.ndarray:
    """
    D_mn 矩阵，m, n = 0..size-1

    D_mn = (-1)^n <m|D(2g)|n>，按构造严格对称。
    """
    if g < 0:
        raise ValueError(f"g must be non-negative, got {g}")
    column_sign = (-1.0) ** np.arange(size)
    return displacement_matrix(2.0 * g, size, size) * column_sign[None, :]


def _overlap_series(m: int, n: int, g: float) -> float | None:
    """
    按级数定义逐项求和（log-Gamma 累积，符号单独跟踪，math.fsum 精确求和）

    最大项超过 SERIES_LOG_LIMIT 时交错求和会发生灾难性抵消，返回 None。
    """
    log_two_g = math.log(2.0 * g)
    half_log_fact = 0.5 * (math.lgamma(m + 1) + math.lgamma(n + 1))
    log_terms: list[float] = []
    for k in range(min(m, n) + 1):
        log_terms.append(
            half_log_fact
            + (m + n - 2 * k) * log_two_g
            - math.lgamma(m - k + 1)
            - math.lgamma(n - k + 1)
            - math.lgamma(k + 1)
            - 2.0 * g * g
        )
    if max(log_terms) > SERIES_LOG_LIMIT:
        return None
    ordered = sorted(range(len(log_terms)), key=lambda i: log_terms[i], reverse=True)
    return math.fsum((-1.0) ** k * math.exp(log_terms[k]) for k in ordered)


def displacement_overlap(m: int, n: int, g: float) -> float:
    """
    计算位移重叠 D_mn

    D_mn = e^(-2g²) Σ_k (-1)^k sqrt(m!n!) (2g)^(m+n-2k) / ((m-k)!(n-k)!k!)

    抵消温和时直接按级数求和，否则改用等价的缔合 Laguerre 形式。

    Args:
        m: 光子指标
        n: 光子指标
        g: 无量纲耦合

    Returns:
        D_mn
    """
    _check_index("m", m)
    _check_index("n", n)
    if g < 0:
        raise ValueError(f"g must be non-negative, got {g}")
    if g == 0.0:
        return (-1.0) ** n if m == n else 0.0

    value = _overlap_series(m, n, g)
    if value is not None:
        return value
    return (-1.0) ** n * displacement_matrix_element(2.0 * g, m, n)


def build_parity_block(params: ModelParams, sign: ParitySign, n_tr: int) -> ParityBlock:
    """
    构造宇称分块 H^(±)_mn = ω(m - g²)δ_mn ± (Δ/2) D_mn

    Args:
        params: 物理参数
        sign: "plus" 或 "minus"
        n_tr: 截断，矩阵维数为 n_tr + 1

    Returns:
        ParityBlock
    """
    if sign not in ("plus", "minus"):
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    if n_tr < 1:
        raise ValueError(f"n_tr must be >= 1, got {n_tr}")

    s = 1.0 if sign == "plus" else -1.0
    size = n_tr + 1
    matrix = (s * 0.5 * params.delta_atom) * overlap_matrix(params.g, size)
    matrix[np.diag_indices(size)] += params.omega * (np.arange(size) - params.g ** 2)
    return ParityBlock(sign=sign, matrix=matrix)
