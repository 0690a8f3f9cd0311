"""Validation check system for rabi-esd.

检查通过 CheckRegistry 自动发现和注册，无需手动 import。
"""

from rabi_esd.checks.base import (
    CheckInfo,
    CheckRegistry,
    CheckResult,
    ValidationCheck,
    ValidationReport,
    ValidationSettings,
    run_checks,
)

__all__ = [
    "CheckInfo",
    "CheckRegistry",
    "CheckResult",
    "ValidationCheck",
    "ValidationReport",
    "ValidationSettings",
    "run_checks",
]
