"""
Reporters Layer - 报告层

包含 CSV 数据输出、JSON 报告器与 Rich 终端报告器。
"""

from rabi_esd.reporters.base import Reporter
from rabi_esd.reporters.rich_reporter import RichReporter
from rabi_esd.reporters.json_reporter import JsonReporter

__all__ = [
    "Reporter",
    "RichReporter",
    "JsonReporter",
]
