"""
实验配置 - 扁平 key = value 文件的解析与序列化

文件格式是只含标量与一维数组的 TOML（不允许表），可以直接 diff。
优先级：默认值 < 配置文件 < 命令行参数。
"""

import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np
import psutil

from rabi_esd.core.bipartite import BellSpec
from rabi_esd.core.errors import ConfigError
from rabi_esd.core.model import ModelParams, TruncationPolicy

# Handle tomllib/tomli for different Python versions
if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("spectrum", "dynamics", "sweep", "validate")
GRID_FIELDS = ("g_grid", "delta_grid", "alpha_grid")
# 扫描轴在输出中的列名
AXIS_NAMES = {"g_grid": "g", "delta_grid": "delta", "alpha_grid": "alpha"}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    一次实验的完整配置（单位 ω = 1，除非显式设置 omega）

    Attributes:
        mode: spectrum / dynamics / sweep / validate
        omega: 腔频率 ω
        g: 原子 1 的无量纲耦合
        g2: 原子 2 的耦合，None 表示与原子 1 相同
        detuning: 失谐 δ = ω - Δ
        detuning2: 原子 2 的失谐，None 表示与原子 1 相同
        alpha: Bell 态混合角，None 时 bell1 取 π/4、bell2 取 π/12
        bell: 1 或 2
        t_max: 时间网格终点
        n_steps: 时间网格点数
        g_grid: 扫描轴 g
        delta_grid: 扫描轴 δ
        alpha_grid: 扫描轴 α
        n_tr_initial: 起始截断
        n_tr_max: 截断上限
        convergence_tol: 收敛容差
        observable: 收敛判据所看的量
        zero_threshold: ESD 判零阈值
        out: 输出路径，"-" 表示标准输出
        workers: 并行进程数，None 时取物理核数
        oracle_n_fock: validate 使用的暴力路径 Fock 截断
        histogram_bins: 扫描时共生度直方图的分箱数，0 表示不输出
        validate_g: validate 比较的耦合
    """
    mode: str = "dynamics"
    omega: float = 1.0
    g: float = 0.1
    g2: float | None = None
    detuning: float = 0.0
    detuning2: float | None = None
    alpha: float | None = None
    bell: int = 1
    t_max: float = 30.0
    n_steps: int = 1501
    g_grid: tuple[float, ...] = ()
    delta_grid: tuple[float, ...] = ()
    alpha_grid: tuple[float, ...] = ()
    n_tr_initial: int = 8
    n_tr_max: int = 256
    convergence_tol: float = 1e-10
    observable: str = "concurrence"
    zero_threshold: float = 1e-9
    out: str = "rabi_esd.csv"
    workers: int | None = None
    oracle_n_fock: int | None = None
    histogram_bins: int = 0
    validate_g: tuple[float, ...] = (0.01, 0.1, 0.3, 1.0)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.bell not in (1, 2):
            raise ConfigError(f"bell must be 1 or 2, got {self.bell!r}")
        if not self.t_max > 0:
            raise ConfigError(f"t_max must be positive, got {self.t_max}")
        if self.n_steps < 2:
            raise ConfigError(f"n_steps must be >= 2, got {self.n_steps}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.zero_threshold > 0:
            raise ConfigError(f"zero_threshold must be positive, got {self.zero_threshold}")
        if self.histogram_bins < 0:
            raise ConfigError(f"histogram_bins must be >= 0, got {self.histogram_bins}")
        for name in ("omega", "g", "detuning", "t_max", "convergence_tol", "zero_threshold"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        for name in (*GRID_FIELDS, "validate_g"):
            if not all(math.isfinite(v) for v in getattr(self, name)):
                raise ConfigError(f"{name} must contain finite values only")
        if not self.validate_g:
            raise ConfigError("validate_g must not be empty")
        if self.mode == "sweep" and not 1 <= len(self.sweep_axes()) <= 2:
            raise ConfigError("sweep needs one or two nonempty axes among g_grid, delta_grid, alpha_grid")
        if self.mode == "sweep" and self.g_grid and self.g2 is not None and self.g == 0:
            raise ConfigError("sweeping g with g2 set needs g > 0 to fix the ratio g2/g")
        # 物理参数与截断策略的合法性由各自的类型检查
        try:
            self.params1()
            self.params2()
            self.policy()
            self.bell_spec()
        except ValueError as e:
            raise ConfigError(str(e)) from e

    @property
    def resolved_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return math.pi / 4 if self.bell == 1 else math.pi / 12

    @property
    def resolved_workers(self) -> int:
        return self.workers or psutil.cpu_count(logical=False) or 1

    def params1(self) -> ModelParams:
        return ModelParams.from_detuning(self.g, self.detuning, self.omega, self.resolved_alpha)

    def params2(self) -> ModelParams:
        g2 = self.g if self.g2 is None else self.g2
        detuning2 = self.detuning if self.detuning2 is None else self.detuning2
        return ModelParams.from_detuning(g2, detuning2, self.omega, self.resolved_alpha)

    def bell_spec(self) -> BellSpec:
        return BellSpec(f"bell{self.bell}", self.resolved_alpha)

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(
            n_tr_initial=self.n_tr_initial,
            n_tr_max=self.n_tr_max,
            convergence_tol=self.convergence_tol,
            observable=self.observable,
        )

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)

    def sweep_axes(self) -> list[tuple[str, tuple[float, ...]]]:
        """非空的扫描轴，顺序固定为 g、delta、alpha"""
        return [(AXIS_NAMES[name], getattr(self, name)) for name in GRID_FIELDS if getattr(self, name)]


_FIELD_TYPES: dict[str, str] = {
    "mode": "str", "omega": "float", "g": "float", "g2": "float?", "detuning": "float",
    "detuning2": "float?", "alpha": "float?", "bell": "int", "t_max": "float", "n_steps": "int",
    "g_grid": "grid", "delta_grid": "grid", "alpha_grid": "grid", "n_tr_initial": "int",
    "n_tr_max": "int", "convergence_tol": "float", "observable": "str", "zero_threshold": "float",
    "out": "str", "workers": "int?", "oracle_n_fock": "int?", "histogram_bins": "int",
    "validate_g": "grid",
}


def _coerce(key: str, value: Any) -> Any:
    kind = _FIELD_TYPES[key].rstrip("?")
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, list):
        raise ConfigError(f"{key} must be an array of numbers, got {value!r}")
    return tuple(_coerce_number(key, v) for v in value)


def _coerce_number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must contain numbers only, got {value!r}")
    return float(value)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """
    解析扁平配置文本为字段字典

    Raises:
        ConfigError: 语法错误、嵌套表或未知键
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{source}: {e}") from e

    values: dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            raise ConfigError(f"{source}: nested table [{key}] is not allowed, use flat key = value lines")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def load_config(path: Path | str | None = None, **overrides: Any) -> ExperimentConfig:
    """
    读取配置文件并应用命令行覆盖（值为 None 的覆盖视为未给出）

    Raises:
        ConfigError: 文件不可读或内容非法
    """
    values: dict[str, Any] = {}
    if path is not None:
        config_path = Path(path)
        try:
            text = config_path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config {config_path}: {e}") from e
        values.update(parse_config_text(text, str(config_path)))

    for key, value in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown override {key!r}")
        if value is not None:
            values[key] = _coerce(key, list(value) if isinstance(value, tuple) else value)
    return ExperimentConfig(**values)


def _format_value(value: Any) -> str:
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(repr(float(v)) for v in value) + "]"
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    """按字段顺序写出；None 字段省略，解析后回到默认值 None"""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"

