"""Validation check base classes.

This module provides the plugin architecture for the physics
validation suite run by the ``validate`` subcommand.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from rabi_esd.core.errors import RabiError
from rabi_esd.core.model import TruncationPolicy

logger = logging.getLogger(__name__)


@dataclass
class CheckInfo:
    """Check information."""
    name: str
    description: str
    tolerance: float


@dataclass
class CheckResult:
    """
    单个参数点上的检查结果

    Attributes:
        check: 检查名称
        point: 参数点（g、bell、alpha 以及检查的性质名等）
        status: passed / failed / error
        max_deviation: 最大偏差，error 时为 NaN
        tolerance: 容差
        message: 附加说明或异常信息
    """
    check: str
    point: dict[str, Any]
    status: Literal["passed", "failed", "error"]
    max_deviation: float
    tolerance: float
    message: str = ""

    @classmethod
    def compare(
        cls,
        check: str,
        point: dict[str, Any],
        deviation: float,
        tolerance: float,
        message: str = "",
    ) -> "CheckResult":
        status = "passed" if deviation <= tolerance else "failed"
        return cls(check, point, status, float(deviation), tolerance, message)


@dataclass
class ValidationReport:
    """全部检查结果的汇总"""
    results: list[CheckResult] = field(default_factory=list)

    @property
    def stats(self) -> dict[str, int]:
        stats = {"total": len(self.results), "passed": 0, "failed": 0, "error": 0}
        for result in self.results:
            stats[result.status] += 1
        return stats

    @property
    def passed(self) -> bool:
        return all(r.status == "passed" for r in self.results)

    def by_check(self) -> dict[str, list[CheckResult]]:
        grouped: dict[str, list[CheckResult]] = {}
        for result in self.results:
            grouped.setdefault(result.check, []).append(result)
        return grouped


@dataclass(frozen=True)
class ValidationSettings:
    """
    校验套件的参数

    Attributes:
        omega: 腔频率
        delta_atom: 原子劈裂
        g_points: 参与比较的耦合
        t_max: 时间网格终点
        n_steps: 时间网格点数
        policy: 引擎截断策略
        oracle_n_fock: 暴力路径的 Fock 截断，None 时按 g 自动选择
        rwa_g: 弱耦合极限检查使用的耦合
        zero_threshold: ESD 判零阈值
    """
    omega: float = 1.0
    delta_atom: float = 1.0
    g_points: tuple[float, ...] = (0.01, 0.1, 0.3, 1.0)
    t_max: float = 30.0
    n_steps: int = 1500
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    oracle_n_fock: int | None = None
    rwa_g: float = 1e-4
    zero_threshold: float = 1e-9

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)

    def bell_points(self) -> list[tuple[str, float]]:
        """(kind, alpha)：bell1 取 π/4，bell2 取 π/12"""
        return [("bell1", math.pi / 4), ("bell2", math.pi / 12)]


class ValidationCheck(ABC):
    """Base class for validation checks."""

    @property
    @abstractmethod
    def info(self) -> CheckInfo:
        """Return check information."""
        pass

    @abstractmethod
    def run(self, settings: ValidationSettings) -> list[CheckResult]:
        """
        执行检查

        Args:
            settings: 校验参数

        Returns:
            每个参数点一条 CheckResult
        """
        pass


class CheckRegistry:
    """Registry for validation checks.

    内置检查在模块加载时调用 CheckRegistry.register() 自动注册。
    """

    _checks: dict[str, ValidationCheck] = {}  # name -> check
    _initialized: bool = False

    @classmethod
    def register(cls, check: ValidationCheck) -> None:
        """Register a check by its name (prevents duplicates)."""
        name = check.info.name
        if name not in cls._checks:
            cls._checks[name] = check

    @classmethod
    def unregister(cls, name: str) -> None:
        cls._checks.pop(name, None)

    @classmethod
    def clear(cls) -> None:
        cls._checks.clear()
        cls._initialized = False

    @classmethod
    def _ensure_initialized(cls) -> None:
        """Ensure all built-in checks are loaded."""
        if cls._initialized:
            return
        cls._initialized = True

        import importlib
        import sys
        check_modules = [
            "rabi_esd.checks.oracle_equivalence",
            "rabi_esd.checks.rwa_limit",
            "rabi_esd.checks.invariants",
        ]
        for module_name in check_modules:
            # clear() 之后模块已在 sys.modules 中，需要重新执行注册
            if module_name in sys.modules:
                importlib.reload(sys.modules[module_name])
            else:
                importlib.import_module(module_name)

    @classmethod
    def get_check(cls, name: str) -> ValidationCheck | None:
        cls._ensure_initialized()
        return cls._checks.get(name)

    @classmethod
    def get_all_checks(cls) -> list[ValidationCheck]:
        cls._ensure_initialized()
        return list(cls._checks.values())

    @classmethod
    def get_available_names(cls) -> list[str]:
        cls._ensure_initialized()
        return list(cls._checks.keys())


def run_checks(
    settings: ValidationSettings,
    only: list[str] | None = None,
) -> ValidationReport:
    """
    依次运行已注册的检查

    检查内部抛出的数值异常记为 error 结果，不中断其余检查。

    Raises:
        ValueError: only 中含有未注册的检查名
    """
    names = only or CheckRegistry.get_available_names()
    unknown = [n for n in names if CheckRegistry.get_check(n) is None]
    if unknown:
        available = ", ".join(CheckRegistry.get_available_names())
        raise ValueError(f"Unknown check(s): {', '.join(unknown)}. Available: {available}")

    report = ValidationReport()
    for name in names:
        check = CheckRegistry.get_check(name)
        logger.info("Running check %s", name)
        try:
            results = check.run(settings)
        except RabiError as e:
            results = [CheckResult(name, {}, "error", math.nan, check.info.tolerance, f"{type(e).__name__}: {e}")]
        for result in results:
            if result.status != "passed":
                logger.warning("Check %s failed at %s: %s", name, result.point, result.message or result.max_deviation)
        report.results.extend(results)
    return report
