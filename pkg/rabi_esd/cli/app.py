"""
CLI 入口模块 - 使用 Typer 构建命令行界面

子命令：
1. spectrum  单个子系统的分宇称能谱
2. dynamics  两原子共生度、光子数与 ESD 区间（含 RWA 与变换基线）
3. sweep     一到两个参数轴上的并行扫描
4. validate  引擎对暴力路径与解析极限的校验

退出码：0 成功，1 物理校验失败，2 用法或配置错误，3 数值不收敛
"""

import logging
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Iterator, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from rabi_esd.checks import ValidationReport, ValidationSettings, run_checks
from rabi_esd.cli.config import ExperimentConfig, load_config
from rabi_esd.cli.sweep import run_sweep, sidecar, write_plot_stub, write_sweep_outputs
from rabi_esd.core.analytic import analytic_series
from rabi_esd.core.bipartite import ConcurrenceSeries, concurrence_series
from rabi_esd.core.errors import ConfigError, NonConvergence, RabiError
from rabi_esd.core.spectral import DisplacedSpectrum, solve_subsystem
from rabi_esd.reporters import JsonReporter, Reporter, RichReporter
from rabi_esd.reporters.csv_reporter import (
    DYNAMICS_HEADER,
    SERIES_HEADER,
    SPECTRUM_HEADER,
    dynamics_rows,
    series_rows,
    spectrum_rows,
    write_csv,
)
from rabi_esd.reporters.json_reporter import esd_payload, report_data, write_json

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

app = typer.Typer(
    name="rabi-esd",
    help="rabi-esd: exact entanglement dynamics of two Jaynes-Cummings atoms without RWA.",
    add_completion=False,
    no_args_is_help=True,
)

# Rich Console 用于输出（legacy_windows=False 支持 Unicode）
console = Console(legacy_windows=False)
# 日志走 stderr，--out - 时不污染 CSV
log_console = Console(stderr=True, legacy_windows=False)

# 各子命令共用的选项
CONFIG_OPTION = typer.Option(None, "--config", "-c", help="Flat key = value config file")
G_OPTION = typer.Option(None, "--g", help="Dimensionless coupling g = λ/ω (atom 1)")
G2_OPTION = typer.Option(None, "--g2", help="Coupling of atom 2 (default: same as --g)")
DELTA_OPTION = typer.Option(None, "--delta", help="Detuning δ = ω - Δ")
ALPHA_OPTION = typer.Option(None, "--alpha", help="Bell mixing angle α in radians")
BELL_OPTION = typer.Option(None, "--bell", help="Initial Bell state: 1 or 2")
TMAX_OPTION = typer.Option(None, "--tmax", help="End of the time grid")
STEPS_OPTION = typer.Option(None, "--steps", help="Number of time samples")
NTR_OPTION = typer.Option(None, "--ntr", help="Initial truncation N_tr")
WORKERS_OPTION = typer.Option(None, "--workers", "-j", help="Worker processes (default: physical cores)")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output path ('-' for stdout)")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Log progress (INFO)")
DEBUG_OPTION = typer.Option(False, "--debug", help="Log numerical diagnostics (DEBUG)")


def setup_logging(verbose: bool, debug: bool) -> None:
    """在 rabi_esd 根 logger 上安装唯一的 RichHandler"""
    logger = logging.getLogger("rabi_esd")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = RichHandler(console=log_console, show_path=False, markup=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING)
    logger.propagate = False


@contextmanager
def handle_errors() -> Iterator[None]:
    """把领域异常映射为退出码"""
    try:
        yield
    except typer.Exit:
        raise
    except (ConfigError, ValueError) as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)
    except NonConvergence as e:
        console.print(f"[red]Error:[/red] {e}")
        console.print(
            f"[dim]Last deviation {e.last_deviation:.3e} at n_tr={e.n_tr}; "
            "raise n_tr_max or loosen convergence_tol[/dim]"
        )
        raise typer.Exit(EXIT_NUMERICAL)
    except RabiError as e:
        console.print(f"[red]Error:[/red] {type(e).__name__}: {e}")
        raise typer.Exit(EXIT_NUMERICAL)
    except OSError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)


def _parse_grid(text: Optional[str], name: str) -> Optional[tuple[float, ...]]:
    """逗号分隔的数值列表"""
    if text is None:
        return None
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as e:
        raise ConfigError(f"{name}: expected comma-separated numbers, got {text!r}") from e


def run_spectrum(config: ExperimentConfig) -> DisplacedSpectrum:
    """求解子系统 1 并写出 (index, parity, energy, n_tr)"""
    policy = replace(config.policy(), observable="spectrum")
    spec = solve_subsystem(config.params1(), policy)
    write_csv(config.out, SPECTRUM_HEADER, spectrum_rows(spec))
    return spec


def run_dynamics(config: ExperimentConfig, baselines: bool = True) -> ConcurrenceSeries:
    """
    精确引擎 + RWA + 变换基线，写出 CSV、ESD 区间 JSON 与绘图说明

    baselines 为假时只写精确引擎的 t, C, n_ph1, n_ph2, norm_err。
    变换基线取一致框架下的 dressed 求值。

    Returns:
        精确引擎的 ConcurrenceSeries
    """
    p1, p2, bell, times = config.params1(), config.params2(), config.bell_spec(), config.times()
    series = concurrence_series(p1, p2, bell, times, config.policy(), config.zero_threshold)
    if baselines:
        header = DYNAMICS_HEADER
        c_rwa = analytic_series(p1, bell, times, "rwa", p2)
        c_transformed = analytic_series(p1, bell, times, "dressed", p2)
        write_csv(config.out, header, dynamics_rows(series, c_rwa, c_transformed))
        layout = "x = t; y = C_exact, C_rwa, C_transformed in [0, 1]; secondary y = n_ph1, n_ph2"
    else:
        header = SERIES_HEADER
        write_csv(config.out, header, series_rows(series))
        layout = "x = t; y = C in [0, 1]; secondary y = n_ph1, n_ph2"
    if config.out != "-":
        out = Path(config.out)
        write_json(sidecar(out, "esd.json"), esd_payload(series.esd_intervals))
        write_plot_stub(sidecar(out, "plot.txt"), out.name, header, layout)
    return series


def run_validate(config: ExperimentConfig, only: list[str] | None = None) -> ValidationReport:
    settings = ValidationSettings(
        omega=config.omega,
        delta_atom=config.params1().delta_atom,
        g_points=config.validate_g,
        t_max=config.t_max,
        n_steps=config.n_steps,
        policy=config.policy(),
        oracle_n_fock=config.oracle_n_fock,
        zero_threshold=config.zero_threshold,
    )
    return run_checks(settings, only)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: bool = typer.Option(
        False,
        "--version",
        "-V",
        help="Show version and exit",
        is_eager=True,
    ),
) -> None:
    """
    rabi-esd: exact entanglement dynamics of two Jaynes-Cummings atoms without RWA.

    \b
    Examples:
        rabi-esd dynamics --g 0.25 --bell 1 -o g025.csv
        rabi-esd sweep --g-grid 0.05,0.1,0.25 -j 4 -o sweep.csv
        rabi-esd validate --only rwa-limit
    """
    if version:
        from rabi_esd import __version__
        console.print(f"rabi-esd v{__version__}")
        raise typer.Exit()
    if ctx.invoked_subcommand is None:
        console.print(ctx.get_help())
        raise typer.Exit()


@app.command()
def spectrum(
    config: Optional[Path] = CONFIG_OPTION,
    g: Optional[float] = G_OPTION,
    delta: Optional[float] = DELTA_OPTION,
    ntr: Optional[int] = NTR_OPTION,
    out: Optional[str] = OUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Converged per-parity spectrum of one atom-cavity subsystem."""
    setup_logging(verbose, debug)
    with handle_errors():
        cfg = load_config(config, mode="spectrum", g=g, detuning=delta, n_tr_initial=ntr, out=out)
        spec = run_spectrum(cfg)
        if cfg.out != "-":
            RichReporter(console).print_spectrum(spec)
            console.print(f"[dim]Wrote {cfg.out}[/dim]")


@app.command()
def dynamics(
    config: Optional[Path] = CONFIG_OPTION,
    g: Optional[float] = G_OPTION,
    g2: Optional[float] = G2_OPTION,
    delta: Optional[float] = DELTA_OPTION,
    alpha: Optional[float] = ALPHA_OPTION,
    bell: Optional[int] = BELL_OPTION,
    tmax: Optional[float] = TMAX_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    ntr: Optional[int] = NTR_OPTION,
    out: Optional[str] = OUT_OPTION,
    baselines: bool = typer.Option(
        True, "--baselines/--no-baselines", help="Also write the RWA and transformed-model columns",
    ),
    verbose: bool = VERBOSE_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Concurrence, photon numbers and ESD intervals from a Bell state."""
    setup_logging(verbose, debug)
    with handle_errors():
        cfg = load_config(
            config, mode="dynamics", g=g, g2=g2, detuning=delta, alpha=alpha, bell=bell,
            t_max=tmax, n_steps=steps, n_tr_initial=ntr, out=out,
        )
        series = run_dynamics(cfg, baselines)
        if cfg.out != "-":
            total = cfg.params1().g + cfg.params2().g
            RichReporter(console).print_series_summary(
                series, f"bell{cfg.bell}, G = g1 + g2 = {total:g}, α = {cfg.resolved_alpha:.4f}",
            )
            console.print(f"[dim]Wrote {cfg.out}[/dim]")


@app.command()
def sweep(
    config: Optional[Path] = CONFIG_OPTION,
    g: Optional[float] = G_OPTION,
    g2: Optional[float] = G2_OPTION,
    delta: Optional[float] = DELTA_OPTION,
    alpha: Optional[float] = ALPHA_OPTION,
    bell: Optional[int] = BELL_OPTION,
    tmax: Optional[float] = TMAX_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    ntr: Optional[int] = NTR_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    out: Optional[str] = OUT_OPTION,
    g_grid: Optional[str] = typer.Option(None, "--g-grid", help="Comma-separated g values"),
    delta_grid: Optional[str] = typer.Option(None, "--delta-grid", help="Comma-separated δ values"),
    alpha_grid: Optional[str] = typer.Option(None, "--alpha-grid", help="Comma-separated α values"),
    histogram_bins: Optional[int] = typer.Option(
        None, "--histogram-bins", help="Also write a concurrence histogram per grid point",
    ),
    verbose: bool = VERBOSE_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Parallel sweep over one or two of g, δ, α (long-format CSV)."""
    setup_logging(verbose, debug)
    with handle_errors():
        cfg = load_config(
            config, mode="sweep", g=g, g2=g2, detuning=delta, alpha=alpha, bell=bell,
            t_max=tmax, n_steps=steps, n_tr_initial=ntr, workers=workers, out=out,
            g_grid=_parse_grid(g_grid, "--g-grid"),
            delta_grid=_parse_grid(delta_grid, "--delta-grid"),
            alpha_grid=_parse_grid(alpha_grid, "--alpha-grid"),
            histogram_bins=histogram_bins,
        )
        outcome = run_sweep(cfg)
        write_sweep_outputs(cfg, outcome)
        failures = len(outcome.failures)
        if cfg.out != "-":
            RichReporter(console).print_sweep_summary(len(outcome.results), failures, cfg.out)
        if failures:
            raise typer.Exit(EXIT_NUMERICAL)


@app.command()
def validate(
    config: Optional[Path] = CONFIG_OPTION,
    g: Optional[float] = typer.Option(None, "--g", help="Validate a single coupling instead of the default grid"),
    tmax: Optional[float] = TMAX_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    ntr: Optional[int] = NTR_OPTION,
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Also write the JSON report here"),
    only: Optional[list[str]] = typer.Option(
        None, "--only", help="Run only the named check (repeatable)",
    ),
    format: str = typer.Option("rich", "--format", "-f", help="Output format: rich (default) or json"),
    verbose: bool = VERBOSE_OPTION,
    debug: bool = DEBUG_OPTION,
) -> None:
    """Cross-check the engine against the brute-force oracle and analytic limits."""
    setup_logging(verbose, debug)
    with handle_errors():
        cfg = load_config(
            config, mode="validate", t_max=tmax, n_steps=steps, n_tr_initial=ntr,
            validate_g=None if g is None else (g,),
        )
        report = run_validate(cfg, only)
        target = str(config) if config else "default grid"
        reporter: Reporter = JsonReporter() if format == "json" else RichReporter(console)
        reporter.report(report, target)
        if out is not None:
            write_json(out, report_data(report, target))

    stats = report.stats
    if stats["failed"]:
        raise typer.Exit(EXIT_VALIDATION)
    if stats["error"]:
        raise typer.Exit(EXIT_NUMERICAL)
    raise typer.Exit(EXIT_OK)


if __name__ == "__main__":
    app()
