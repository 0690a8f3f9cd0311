"""
JSON 报告器 - 校验报告与 ESD / 错误旁路文件
"""

import json
import math
import sys
from pathlib import Path
from typing import Any, TextIO

from rabi_esd.checks.base import ValidationReport


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def report_data(result: ValidationReport, target: str) -> dict[str, Any]:
    stats = result.stats
    return {
        "target": target,
        "results": [
            {
                "check": r.check,
                "point": r.point,
                "status": r.status,
                "max_deviation": _finite_or_none(r.max_deviation),
                "tolerance": r.tolerance,
                "message": r.message,
            }
            for r in result.results
        ],
        "stats": stats,
        "summary": {
            "total": stats["total"],
            "failed": stats["failed"],
            "errors": stats["error"],
            "passed": result.passed,
        },
    }


class JsonReporter:
    """JSON 报告器"""

    def __init__(self, output: TextIO | None = None):
        self.output = output or sys.stdout

    def report(self, result: ValidationReport, target: str) -> None:
        """生成 JSON 格式报告"""
        json_str = json.dumps(report_data(result, target), indent=2, ensure_ascii=False)
        print(json_str, file=self.output)


def write_json(path: Path | str, data: Any) -> None:
    """
    写 JSON 文件（键序固定，末尾换行）

    Raises:
        OSError: 带路径信息重新抛出
    """
    target = Path(path)
    text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(text.encode("utf-8"))
    except OSError as e:
        raise OSError(f"Failed to write {target}: {e}") from e


def esd_payload(intervals: list[tuple[float, float]]) -> list[list[float]]:
    """ESD 区间列表，[[t_start, t_end], ...]"""
    return [[float(a), float(b)] for a, b in intervals]
