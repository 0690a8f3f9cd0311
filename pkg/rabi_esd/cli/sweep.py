"""
参数扫描 - 网格点并行计算与确定性输出

每个网格点是独立任务，在进程池里计算；结果按网格点序号排序后由主进程统一写出，
因此输出与 workers 数和调度顺序无关。单点失败只记录错误，不中断扫描。
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from rabi_esd.cli.config import ExperimentConfig
from rabi_esd.core.bipartite import ConcurrenceSeries, concurrence_series, time_averaged_concurrence
from rabi_esd.core.errors import RabiError
from rabi_esd.reporters.csv_reporter import histogram_rows, write_csv
from rabi_esd.reporters.json_reporter import esd_payload, write_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepPoint:
    """网格点：序号与各轴取值（按 g、delta、alpha 顺序）"""
    index: int
    values: tuple[tuple[str, float], ...]

    @property
    def as_dict(self) -> dict[str, float]:
        return dict(self.values)


@dataclass
class PointResult:
    point: SweepPoint
    series: ConcurrenceSeries | None = None
    error_type: str | None = None
    message: str | None = None

    @property
    def failed(self) -> bool:
        return self.series is None


@dataclass
class SweepOutcome:
    axes: list[str]
    results: list[PointResult] = field(default_factory=list)

    @property
    def failures(self) -> list[PointResult]:
        return [r for r in self.results if r.failed]


def build_points(config: ExperimentConfig) -> list[SweepPoint]:
    """笛卡儿积，按轴取值排序后编号"""
    axes = config.sweep_axes()
    names = [name for name, _ in axes]
    combos = sorted(itertools.product(*(sorted(set(values)) for _, values in axes)))
    return [SweepPoint(i, tuple(zip(names, combo))) for i, combo in enumerate(combos)]


def point_config(config: ExperimentConfig, point: SweepPoint) -> ExperimentConfig:
    """
    把网格点取值代入配置

    非对称原子时保持 g2/g 与 detuning2 - detuning 不变（配置已保证 g > 0）。
    """
    values = point.as_dict
    updates: dict = {"mode": "dynamics", "g_grid": (), "delta_grid": (), "alpha_grid": ()}
    if "g" in values:
        g = values["g"]
        updates["g"] = g
        if config.g2 is not None:
            updates["g2"] = g * config.g2 / config.g
    if "delta" in values:
        delta = values["delta"]
        updates["detuning"] = delta
        if config.detuning2 is not None:
            updates["detuning2"] = delta + (config.detuning2 - config.detuning)
    if "alpha" in values:
        updates["alpha"] = values["alpha"]
    return replace(config, **updates)


def evaluate_point(config: ExperimentConfig, point: SweepPoint) -> PointResult:
    """在工作进程中计算一个网格点；数值异常转为错误记录"""
    try:
        cfg = point_config(config, point)
        series = concurrence_series(
            cfg.params1(), cfg.params2(), cfg.bell_spec(), cfg.times(), cfg.policy(), cfg.zero_threshold,
        )
    except (RabiError, ValueError) as e:
        return PointResult(point, error_type=type(e).__name__, message=str(e))
    series.densities = None
    return PointResult(point, series=series)


def run_sweep(config: ExperimentConfig) -> SweepOutcome:
    """
    计算整个网格

    Args:
        config: mode=sweep 的配置

    Returns:
        按网格点序号排序的结果
    """
    points = build_points(config)
    workers = min(config.resolved_workers, len(points))
    logger.info("Sweeping %d point(s) with %d worker(s)", len(points), workers)

    if workers <= 1:
        results = [evaluate_point(config, p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(evaluate_point, config, p) for p in points]
            results = [f.result() for f in futures]

    results.sort(key=lambda r: r.point.index)
    for r in results:
        if r.failed:
            logger.warning("Sweep point %s failed: %s: %s", r.point.as_dict, r.error_type, r.message)
    return SweepOutcome(axes=[name for name, _ in config.sweep_axes()], results=results)


def sidecar(out: Path, suffix: str) -> Path:
    """run.csv -> run.<suffix>"""
    return out.with_name(f"{out.stem}.{suffix}")


def _axis_values(result: PointResult) -> list[float]:
    return [v for _, v in result.point.values]


def esd_duration(series: ConcurrenceSeries) -> float:
    return float(sum(end - start for start, end in series.esd_intervals))


def write_sweep_outputs(config: ExperimentConfig, outcome: SweepOutcome) -> list[Path]:
    """
    写出长格式 CSV 与旁路文件，返回写出的路径

    - <out>：axis values, t, C
    - <stem>.summary.csv：axis values, mean_C, esd_duration, esd_count
    - <stem>.hist.csv：共生度直方图（histogram_bins > 0 时）
    - <stem>.esd.json / <stem>.errors.json / <stem>.plot.txt
    """
    axes = outcome.axes
    ok = [r for r in outcome.results if not r.failed]

    rows = (
        [*_axis_values(r), t, c]
        for r in ok
        for t, c in zip(r.series.times, r.series.concurrence)
    )
    write_csv(config.out, [*axes, "t", "C"], rows)
    if config.out == "-":
        return []

    out = Path(config.out)
    written = [out]

    summary = sidecar(out, "summary.csv")
    write_csv(summary, [*axes, "mean_C", "esd_duration", "esd_count"], (
        [*_axis_values(r), time_averaged_concurrence(r.series), esd_duration(r.series), len(r.series.esd_intervals)]
        for r in ok
    ))
    written.append(summary)

    if config.histogram_bins > 0:
        hist = sidecar(out, "hist.csv")
        hist_rows = [
            row for r in ok
            for row in histogram_rows(_axis_values(r), r.series.concurrence, config.histogram_bins)
        ]
        write_csv(hist, [*axes, "bin_lo", "bin_hi", "count"], hist_rows)
        written.append(hist)

    esd = sidecar(out, "esd.json")
    write_json(esd, [
        {"point": r.point.as_dict, "intervals": esd_payload(r.series.esd_intervals)} for r in ok
    ])
    errors = sidecar(out, "errors.json")
    write_json(errors, [
        {"point": r.point.as_dict, "error": r.error_type, "message": r.message} for r in outcome.failures
    ])
    plot = sidecar(out, "plot.txt")
    write_plot_stub(plot, out.name, [*axes, "t", "C"], sweep_layout(axes))
    written.extend([esd, errors, plot])
    return written


def sweep_layout(axes: list[str]) -> str:
    if len(axes) == 1:
        return f"heatmap: x = t, y = {axes[0]}, color = C in [0, 1]"
    return f"one heatmap per {axes[1]}: x = t, y = {axes[0]}, color = C in [0, 1]"


def write_plot_stub(path: Path, data_name: str, columns: list[str], layout: str) -> None:
    """与绘图库无关的数据说明"""
    lines = [
        f"data: {data_name}",
        f"columns: {', '.join(columns)}",
        f"layout: {layout}",
        "",
    ]
    try:
        path.write_bytes("\n".join(lines).encode("utf-8"))
    except OSError as e:
        raise OSError(f"Failed to write {path}: {e}") from e

