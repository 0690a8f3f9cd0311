"""端到端物理验收（较慢，pytest -m slow）"""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import trapezoid

from rabi_esd.checks import ValidationSettings, run_checks
from rabi_esd.cli.config import ExperimentConfig
from rabi_esd.cli.sweep import run_sweep, write_sweep_outputs
from rabi_esd.core.analytic import analytic_series, effective_params
from rabi_esd.core.bipartite import (
    BellSpec,
    concurrence_series,
    photon_concurrence_correlation,
    time_averaged_concurrence,
)
from rabi_esd.core.model import ModelParams, TruncationPolicy

pytestmark = pytest.mark.slow

BELL1 = BellSpec("bell1", math.pi / 4)
BELL2 = BellSpec("bell2", math.pi / 12)
GRID = np.linspace(0.0, 30.0, 1500)


def failures(report):
    return [r for r in report.results if r.status != "passed"]


def test_engine_matches_oracle_on_default_grid():
    report = run_checks(ValidationSettings(), ["oracle-equivalence"])
    assert report.stats["total"] == 12
    assert report.passed, failures(report)


def test_weak_coupling_limits():
    report = run_checks(ValidationSettings(), ["rwa-limit"])
    assert report.passed, failures(report)


def test_invariants_on_default_grid():
    report = run_checks(ValidationSettings(), ["invariants"])
    assert report.passed, failures(report)


@pytest.mark.parametrize("g", [0.25, 0.5])
def test_sudden_death_at_moderate_coupling(g):
    """G = 2g ≥ 0.5 时最大纠缠的 bell1 也会在有限区间内完全解纠缠"""
    p = ModelParams(g=g)
    series = concurrence_series(p, p, BELL1, GRID)
    assert series.esd_intervals
    start, end = series.esd_intervals[0]
    assert end > start


def test_asymmetric_atoms_recover_less():
    identical = ModelParams(g=0.45)
    strong, weak = ModelParams(g=0.6), ModelParams(g=0.3)
    symmetric = concurrence_series(identical, identical, BELL1, GRID)
    asymmetric = concurrence_series(strong, weak, BELL1, GRID)
    assert asymmetric.esd_intervals
    assert time_averaged_concurrence(asymmetric) < time_averaged_concurrence(symmetric)


def test_strong_asymmetric_pair_converges():
    """g1 = 2g2，G = g1 + g2 = 2"""
    strong, weak = ModelParams(g=4 / 3), ModelParams(g=2 / 3)
    series = concurrence_series(strong, weak, BELL1, GRID)
    assert series.n_tr[0] <= TruncationPolicy().n_tr_max // 2
    assert np.max(series.norm_error) <= 1e-9


def test_no_sudden_death_for_weak_coupling():
    """cos² 的横截零点是孤立点，不构成区间"""
    g = 1e-4
    p = ModelParams(g=g)
    times = np.linspace(0.0, 5 * math.pi / g, 4001)
    series = concurrence_series(p, p, BELL1, times)
    assert series.esd_intervals == []
    assert series.concurrence.min() < 1e-3


def baseline_deviation(g: float, source: str) -> float:
    p = ModelParams(g=g)
    nu = effective_params(p).nu
    times = np.linspace(0.0, 4 * math.pi / nu, 1500)
    exact = concurrence_series(p, p, BELL1, times).concurrence
    return float(np.max(np.abs(exact - analytic_series(p, BELL1, times, source))))


def test_transformed_baseline_accuracy_window():
    weak = baseline_deviation(0.05, "dressed")
    strong = baseline_deviation(0.3, "dressed")
    assert weak <= 0.02
    assert strong >= 5 * weak


def test_closed_form_misses_frame_dressing():
    """闭式曲线在 g=0.05 的偏差主要来自未变换的初态"""
    assert baseline_deviation(0.05, "transformed") > baseline_deviation(0.05, "dressed")


@pytest.mark.parametrize("bell", [BELL1, BELL2], ids=["bell1", "bell2"])
@pytest.mark.parametrize("g", [0.01, 1.0])
def test_photons_anticorrelated_with_entanglement(g, bell):
    p = ModelParams(g=g)
    series = concurrence_series(p, p, bell, GRID)
    assert photon_concurrence_correlation(series) < 0


def test_detuning_sign_breaks_symmetry_beyond_rwa():
    """
    g=0.1 时时间平均共生度随正失谐减小、随负失谐增大

    未作初态修饰的闭式变换曲线给出相反的排序，因此单独断言。
    """
    times = np.linspace(0.0, 60.0, 3001)
    exact, closed_form = {}, {}
    for delta in (-0.3, 0.3):
        p = ModelParams.from_detuning(0.1, delta)
        exact[delta] = time_averaged_concurrence(concurrence_series(p, p, BELL1, times))
        curve = analytic_series(p, BELL1, times, "transformed")
        closed_form[delta] = float(trapezoid(curve, times) / times[-1])
    assert exact[-0.3] > exact[0.3] + 0.01
    assert closed_form[0.3] > closed_form[-0.3]


def test_detuning_sign_irrelevant_in_weak_coupling():
    curves = []
    for delta in (-0.3, 0.3):
        p = ModelParams.from_detuning(1e-4, delta)
        curves.append(concurrence_series(p, p, BELL1, GRID).concurrence)
    assert np.max(np.abs(curves[0] - curves[1])) <= 1e-3


@pytest.mark.parametrize("g", [0.3, 1.0])
def test_truncation_doubling_leaves_concurrence(g):
    p = ModelParams(g=g)
    coarse = concurrence_series(p, p, BELL2, GRID)
    policy = TruncationPolicy(n_tr_initial=2 * coarse.n_tr[0], n_tr_max=4 * coarse.n_tr[0])
    fine = concurrence_series(p, p, BELL2, GRID, policy)
    assert fine.n_tr[0] >= 2 * coarse.n_tr[0]
    assert np.max(np.abs(coarse.concurrence - fine.concurrence)) < 1e-8


def test_sweep_output_independent_of_workers(tmp_path):
    base = ExperimentConfig(
        mode="sweep",
        g_grid=(0.05, 0.1, 0.25, 0.5),
        alpha_grid=(0.3, 0.785),
        t_max=5.0,
        n_steps=31,
        histogram_bins=5,
    )
    contents = []
    for workers in (1, 8):
        cfg = replace(base, workers=workers, out=str(tmp_path / f"w{workers}" / "sweep.csv"))
        written = write_sweep_outputs(cfg, run_sweep(cfg))
        contents.append({p.name: p.read_bytes() for p in written})
    assert contents[0] == contents[1]
