"""
Rich Terminal Reporter - validation reports and run summaries on the terminal
"""

import math

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from rabi_esd.checks.base import CheckResult, ValidationReport
from rabi_esd.core.bipartite import ConcurrenceSeries, photon_concurrence_correlation, time_averaged_concurrence
from rabi_esd.core.spectral import DisplacedSpectrum

STATUS_STYLE = {
    "passed": ("✓", "green"),
    "failed": ("✗", "red"),
    "error": ("⚠", "yellow"),
}


def _format_point(point: dict) -> str:
    parts = []
    for key, value in point.items():
        if isinstance(value, float):
            parts.append(f"{key}={value:.4g}")
        else:
            parts.append(f"{key}={value}")
    return ", ".join(parts)


class RichReporter:
    """Rich Terminal Reporter"""

    def __init__(self, console: Console | None = None):
        self.console = console or Console()

    def report(self, result: ValidationReport, target: str) -> None:
        """Generate Rich format validation report"""
        self.console.print()
        self.console.print("─" * 80, style="dim")
        self.console.print("rabi-esd validation report", style="bold cyan", justify="center")
        self.console.print("─" * 80, style="dim")

        for name, results in result.by_check().items():
            self._print_check(name, results)
        self._print_conclusion(result, target)

    def _print_check(self, name: str, results: list[CheckResult]) -> None:
        self.console.print()
        self.console.print(f"[bold]◆ {name}[/bold]")

        table = Table(show_header=True, header_style="bold cyan", box=None)
        table.add_column("Point", style="cyan")
        table.add_column("Deviation", justify="right", width=12)
        table.add_column("Tolerance", justify="right", width=10)
        table.add_column("Status", width=10)

        for r in results:
            icon, color = STATUS_STYLE[r.status]
            deviation = "-" if math.isnan(r.max_deviation) else f"{r.max_deviation:.3e}"
            status = f"[{color}]{icon} {r.status}[/{color}]"
            if r.message and r.status != "passed":
                status += f" [dim]{r.message}[/dim]"
            table.add_row(_format_point(r.point), deviation, f"{r.tolerance:.0e}", status)

        self.console.print(table)

    def _print_conclusion(self, result: ValidationReport, target: str) -> None:
        stats = result.stats
        color = "green" if result.passed else "red"
        content = Text()
        content.append("Passed: ", style="bold")
        content.append(f"{stats['passed']}", style="green")
        content.append(f" / {stats['total']}\n", style="dim")
        if stats["failed"]:
            content.append(f"Failed: {stats['failed']}\n", style="red")
        if stats["error"]:
            content.append(f"Errors: {stats['error']}\n", style="yellow")
        content.append(f"Target: {target}", style="dim")

        self.console.print()
        self.console.print(Panel(
            content,
            title=f"[bold]{'Validation passed' if result.passed else 'Validation failed'}[/bold]",
            border_style=color,
        ))
        self.console.print()

    def print_series_summary(self, series: ConcurrenceSeries, title: str) -> None:
        """单次动力学运行的摘要"""
        table = Table(show_header=False, box=None)
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("n_tr", f"{series.n_tr[0]}, {series.n_tr[1]}")
        table.add_row("samples", str(series.times.size))
        table.add_row("C(0)", f"{series.concurrence[0]:.6f}")
        table.add_row("min C", f"{np.min(series.concurrence):.6f}")
        table.add_row("mean C", f"{time_averaged_concurrence(series):.6f}")
        table.add_row("max norm error", f"{np.max(series.norm_error):.3e}")
        table.add_row("corr(C, n1+n2)", f"{photon_concurrence_correlation(series):+.4f}")
        table.add_row("ESD intervals", str(len(series.esd_intervals)))
        for start, end in series.esd_intervals[:5]:
            table.add_row("", f"[{start:.4g}, {end:.4g}]")
        if len(series.esd_intervals) > 5:
            table.add_row("", f"[dim]... and {len(series.esd_intervals) - 5} more[/dim]")
        self.console.print(Panel(table, title=f"[bold]{title}[/bold]", border_style="cyan"))

    def print_spectrum(self, spec: DisplacedSpectrum, n_levels: int = 10) -> None:
        """每个宇称最低 n_levels 个能级"""
        table = Table(show_header=True, header_style="bold cyan", box=None)
        table.add_column("#", justify="right")
        table.add_column("plus", justify="right")
        table.add_column("minus", justify="right")
        plus = spec.energies("plus")
        minus = spec.energies("minus")
        for i in range(min(n_levels, plus.size, minus.size)):
            table.add_row(str(i), f"{plus[i]:.10f}", f"{minus[i]:.10f}")
        self.console.print(Panel(
            table,
            title=f"[bold]Spectrum g={spec.params.g:g}, n_tr={spec.n_tr}[/bold]",
            border_style="cyan",
        ))

    def print_sweep_summary(self, points: int, failures: int, out: str) -> None:
        color = "green" if failures == 0 else "yellow"
        self.console.print(Panel(
            f"{points} grid point(s), [{'red' if failures else 'green'}]{failures} failed[/]\n"
            f"[dim]Output: {out}[/dim]",
            title="[bold]Sweep[/bold]",
            border_style=color,
        ))
