"""
报告器基类 - 定义报告器接口
"""

from typing import Protocol

from rabi_esd.checks.base import ValidationReport


class Reporter(Protocol):
    """报告器协议"""

    def report(self, result: ValidationReport, target: str) -> None:
        """生成报告"""
        ...
