"""
CSV 报告器 - 固定格式的数据输出

逗号分隔、表头行、LF 换行、UTF-8。浮点数统一为 12 位有效数字的科学计数法，
与本地化设置无关，同一配置的多次运行逐字节相同。
"""

import csv
import io
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from rabi_esd.core.bipartite import ConcurrenceSeries
from rabi_esd.core.spectral import DisplacedSpectrum

DYNAMICS_HEADER = ["t", "C_exact", "C_rwa", "C_transformed", "n_ph1", "n_ph2", "norm_err"]
SERIES_HEADER = ["t", "C", "n_ph1", "n_ph2", "norm_err"]
SPECTRUM_HEADER = ["index", "parity", "energy", "n_tr"]


def format_float(value: float) -> str:
    """12 位有效数字；-0.0 写成 0.0"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value + 0.0:.11e}"


def format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """
    写 CSV；path 为 "-" 时写到标准输出

    Raises:
        OSError: 带路径信息重新抛出
    """
    text = render_csv(header, rows)
    if str(path) == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(text.encode("utf-8"))
    except OSError as e:
        raise OSError(f"Failed to write {target}: {e}") from e


def series_rows(series: ConcurrenceSeries) -> list[list[float]]:
    return [
        [t, c, n1, n2, err]
        for t, c, n1, n2, err in zip(
            series.times, series.concurrence, series.photon1, series.photon2, series.norm_error,
        )
    ]


def dynamics_rows(
    series: ConcurrenceSeries,
    c_rwa: np.ndarray,
    c_transformed: np.ndarray,
) -> list[list[float]]:
    """t, C_exact, C_rwa, C_transformed, n_ph1, n_ph2, norm_err"""
    return [
        [t, c, r, tr, n1, n2, err]
        for t, c, r, tr, n1, n2, err in zip(
            series.times, series.concurrence, c_rwa, c_transformed,
            series.photon1, series.photon2, series.norm_error,
        )
    ]


def spectrum_rows(spec: DisplacedSpectrum) -> list[list]:
    """各宇称内按能量升序编号"""
    rows: list[list] = []
    for parity in ("plus", "minus"):
        for i, energy in enumerate(spec.energies(parity)):
            rows.append([i, parity, float(energy), spec.n_tr])
    return rows


def histogram_rows(
    axis_values: Sequence[float],
    concurrence: np.ndarray,
    bins: int,
) -> list[list]:
    """[0, 1] 上等宽直方图：axis values, bin_lo, bin_hi, count"""
    counts, edges = np.histogram(np.clip(concurrence, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    return [
        [*axis_values, float(lo), float(hi), int(n)]
        for lo, hi, n in zip(edges[:-1], edges[1:], counts)
    ]
