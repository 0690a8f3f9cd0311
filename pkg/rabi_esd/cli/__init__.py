"""
CLI Layer - 命令行接口层

提供命令行入口、实验配置与参数扫描。
"""

from rabi_esd.cli.app import app, main

__all__ = [
    "app",
    "main",
]
