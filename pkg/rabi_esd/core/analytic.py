"""
闭式基线 - RWA 与幺正变换（消去反旋波项到 O(g²)）的共生度曲线

变换 e^S, S = (λξ/ω)(a⁺ - a)(σ₊ + σ₋), ξ = ω/(Δ + ω) 把哈密顿量化为
重整化的 RWA 形式：Δ_eff = Δ(1 - 2λ²/(Δ+ω)²)，g_eff = 2λΔ/(ω+Δ)。
之后每个原子只在 {|↑,0>, |↓,1>} 内做 Rabi 振荡：
    |x|² = 1 - 4N² sin²(νt/2)，|y|² = 4N² sin²(νt/2)
两原子的 Bell 态共生度只依赖这两个权重。

闭式曲线把未变换的初态直接放进变换框架演化；dressed_series 把 e^(±S)
作用回初态与读出，得到与精确引擎同一框架下的基线。
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from rabi_esd.core.bipartite import BellSpec, BranchComponents, contract_components, wootters_concurrence
from rabi_esd.core.model import ModelParams

logger = logging.getLogger(__name__)

AnalyticSource = Literal["rwa", "transformed", "dressed"]

# 一致框架求值所用的 Fock 截断
DRESSED_FOCK = 16


@dataclass(frozen=True)
class EffectiveParams:
    """
    重整化 RWA 模型的参数（能量量纲）

    Attributes:
        delta_eff: 有效原子劈裂 Δ_eff
        g_eff: 有效耦合 g_eff
        delta_detuning_eff: 有效失谐 δ_eff = ω - Δ_eff
        n_factor: 振幅因子 N = g_eff/ν
        nu: 单激发 Rabi 频率 ν = sqrt(δ_eff² + 4g_eff²)
    """
    delta_eff: float
    g_eff: float
    delta_detuning_eff: float
    n_factor: float
    nu: float


def _amplitude(coupling: float, detuning: float) -> tuple[float, float]:
    """(N, ν)；耦合与失谐同时为零时按连续性取 N = 1/2"""
    nu = math.sqrt(detuning * detuning + 4.0 * coupling * coupling)
    if nu == 0.0:
        return 0.5, 0.0
    return coupling / nu, nu


def effective_params(params: ModelParams) -> EffectiveParams:
    """
    幺正变换后的有效参数

    λ = g·ω 为能量量纲耦合。共振时 δ_eff = λ²/(2ω)，g_eff = λ。

    Raises:
        ValueError: Δ + ω = 0（即 2ω - δ = 0）
    """
    omega, delta = params.omega, params.delta_atom
    lam = params.coupling
    denom = delta + omega
    if denom == 0.0:
        raise ValueError("effective parameters undefined for Δ + ω = 0")

    delta_eff = delta * (1.0 - 2.0 * lam * lam / (denom * denom))
    g_eff = lam * 2.0 * delta / denom
    if delta_eff < 0:
        logger.warning(
            "Δ_eff = %.4g < 0 at g=%g: transformation outside its validity window",
            delta_eff, params.g,
        )
    detuning_eff = omega - delta_eff
    n_factor, nu = _amplitude(abs(g_eff), detuning_eff)
    return EffectiveParams(
        delta_eff=delta_eff,
        g_eff=g_eff,
        delta_detuning_eff=detuning_eff,
        n_factor=n_factor,
        nu=nu,
    )


def rwa_amplitude(params: ModelParams) -> tuple[float, float]:
    """RWA 的 (N, ν)：N = λ/sqrt(4λ² + δ²)，ν = sqrt(δ² + 4λ²)"""
    return _amplitude(params.coupling, params.detuning)


def _excited_loss(n_factor: float, nu: float, t) -> np.ndarray:
    """|y(t)|² = 4N² sin²(νt/2)"""
    return 4.0 * n_factor * n_factor * np.sin(0.5 * nu * np.asarray(t, dtype=float)) ** 2


def _bell_curve(
    bell: BellSpec,
    loss1: np.ndarray,
    loss2: np.ndarray,
) -> np.ndarray:
    """由两原子的 |y_i|² 组装 Bell 态共生度（X 态闭式）"""
    stay = np.sqrt(np.clip((1.0 - loss1) * (1.0 - loss2), 0.0, None))
    sin2a = abs(math.sin(2.0 * bell.alpha))
    if bell.kind == "bell1":
        return sin2a * stay
    cos2 = math.cos(bell.alpha) ** 2
    value = stay * (sin2a - 2.0 * cos2 * np.sqrt(loss1 * loss2))
    return np.maximum(0.0, value)


def _scalar_or_array(value: np.ndarray, t):
    return float(value) if np.ndim(t) == 0 else value


def concurrence_bell1_transformed(params: ModelParams, alpha: float, t):
    """C(t) = |sin2α|[1 - 4N² sin²(νt/2)]，恒非负"""
    eff = effective_params(params)
    loss = _excited_loss(eff.n_factor, eff.nu, t)
    return _scalar_or_array(_bell_curve(BellSpec("bell1", alpha), loss, loss), t)


def concurrence_bell2_transformed(params: ModelParams, alpha: float, t):
    """
    C(t) = max(0, [1 - 4N²s](|sin2α| - 8N²s cos²α))，s = sin²(νt/2)

    闭式本身可以为负，零以下截断为零。
    """
    eff = effective_params(params)
    loss = _excited_loss(eff.n_factor, eff.nu, t)
    return _scalar_or_array(_bell_curve(BellSpec("bell2", alpha), loss, loss), t)


def esd_predicate(params: ModelParams, alpha: float, t):
    """|tanα| < 4N² sin²(νt/2)"""
    eff = effective_params(params)
    dead = abs(math.tan(alpha)) < _excited_loss(eff.n_factor, eff.nu, t)
    return bool(dead) if np.ndim(t) == 0 else dead


def concurrence_rwa(params: ModelParams, bell: BellSpec, t):
    """RWA 基线；共振时 bell1 为 |sin2α|cos²(λt)"""
    n_factor, nu = rwa_amplitude(params)
    loss = _excited_loss(n_factor, nu, t)
    return _scalar_or_array(_bell_curve(bell, loss, loss), t)


def _dressed_components(params: ModelParams, times: np.ndarray, n_fock: int) -> BranchComponents:
    """
    变换框架中的单原子轨迹，换回实验室框架

    |ψ(t)> = e^(-S) e^(-iH't) e^(S) |σ, 0>，H' 为重整化 JC 哈密顿量。
    基序 σ·n_fock + k，σ = 0 为 ↑。
    """
    eff = effective_params(params)
    omega = params.omega
    xi = omega / (params.delta_atom + omega)
    a = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1)
    number = np.diag(np.arange(n_fock, dtype=float))
    eye = np.eye(n_fock)

    generator = params.coupling * xi / omega * (a.T - a)
    zero = np.zeros((n_fock, n_fock))
    s_matrix = np.block([[zero, generator], [generator, zero]])
    h_eff = np.block([
        [omega * number + 0.5 * eff.delta_eff * eye, eff.g_eff * a],
        [eff.g_eff * a.T, omega * number - 0.5 * eff.delta_eff * eye],
    ])
    dress = scipy.linalg.expm(s_matrix)
    values, vectors = scipy.linalg.eigh(h_eff)

    comps: BranchComponents = {}
    for offset, level in ((0, "up"), (n_fock, "down")):
        psi0 = dress[:, offset]
        weights = vectors.T @ psi0
        states = (np.exp(-1j * np.outer(times, values)) * weights[None, :]) @ vectors.T
        lab = states @ dress
        comps[level] = (lab[:, :n_fock], lab[:, n_fock:])
    return comps


def dressed_series(
    params: ModelParams,
    bell: BellSpec,
    times,
    params2: ModelParams | None = None,
    n_fock: int = DRESSED_FOCK,
) -> np.ndarray:
    """
    重整化 JC 模型在一致框架下的共生度

    闭式曲线只在变换框架里演化未变换的初态，忽略了 e^(±S) 引起的
    O(g) 反旋波混合；这里把初态与读出都换回实验室框架，在小 Fock 空间里数值求值。
    """
    grid = np.atleast_1d(np.asarray(times, dtype=float))
    p2 = params2 or params
    comps1 = _dressed_components(params, grid, n_fock)
    comps2 = comps1 if p2 == params else _dressed_components(p2, grid, n_fock)
    rho, _, _ = contract_components(bell, comps1, comps2)
    return np.array([wootters_concurrence(r, validate=False) for r in rho])


def analytic_series(
    params: ModelParams,
    bell: BellSpec,
    times,
    source: AnalyticSource,
    params2: ModelParams | None = None,
) -> np.ndarray:
    """
    整条时间网格上的基线曲线

    Args:
        params: 原子 1 的参数
        bell: Bell 初态
        times: 时间网格
        source: "rwa"、"transformed"（闭式）或 "dressed"（一致框架，见 dressed_series）
        params2: 原子 2 的参数，默认与原子 1 相同

    Returns:
        C(t)，与 times 同形
    """
    if source == "dressed":
        return dressed_series(params, bell, times, params2)
    grid = np.asarray(times, dtype=float)
    loss = []
    for p in (params, params2 or params):
        if source == "rwa":
            n_factor, nu = rwa_amplitude(p)
        elif source == "transformed":
            eff = effective_params(p)
            n_factor, nu = eff.n_factor, eff.nu
        else:
            raise ValueError(f"Unknown analytic source: {source!r}")
        loss.append(_excited_loss(n_factor, nu, grid))
    return _bell_curve(bell, loss[0], loss[1])


def first_death_time(
    alpha: float,
    n_factor: float,
    nu: float,
) -> float | None:
    """
    bell2 闭式第一次到零的时刻

    在 [0, π/ν] 上对 |sin2α| - 8N² sin²(νt/2) cos²α 求根（brentq）。
    |tanα| ≥ 4N² 时永不死亡，返回 None。
    """
    if nu <= 0:
        return None
    sin2a = abs(math.sin(2.0 * alpha))
    cos2 = math.cos(alpha) ** 2

    def factor(t: float) -> float:
        return sin2a - 8.0 * n_factor ** 2 * math.sin(0.5 * nu * t) ** 2 * cos2

    if factor(math.pi / nu) >= 0:
        return None
    if factor(0.0) <= 0:
        return 0.0
    return brentq(factor, 0.0, math.pi / nu, xtol=1e-14, rtol=1e-14)


def death_time_closed_form(alpha: float, n_factor: float, nu: float) -> float | None:
    """t* = (2/ν) arcsin(sqrt(|tanα|/(4N²)))"""
    if nu <= 0 or n_factor <= 0:
        return None
    ratio = abs(math.tan(alpha)) / (4.0 * n_factor ** 2)
    if ratio >= 1.0:
        return None
    return 2.0 / nu * math.asin(math.sqrt(ratio))
