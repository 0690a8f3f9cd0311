"""参数扫描：网格展开、单点失败记录与输出文件"""

import json

import pytest

from rabi_esd.cli.config import ExperimentConfig
from rabi_esd.cli.sweep import (
    build_points,
    evaluate_point,
    point_config,
    run_sweep,
    sidecar,
    sweep_layout,
    write_sweep_outputs,
)


def sweep_config(tmp_path, **kwargs) -> ExperimentConfig:
    base = {
        "mode": "sweep",
        "t_max": 4.0,
        "n_steps": 21,
        "workers": 1,
        "out": str(tmp_path / "sweep.csv"),
    }
    base.update(kwargs)
    return ExperimentConfig(**base)


class TestGrid:
    def test_points_sorted_and_deduplicated(self, tmp_path):
        cfg = sweep_config(tmp_path, g_grid=(0.3, 0.1, 0.3), alpha_grid=(0.5, 0.2))
        points = build_points(cfg)
        assert [p.index for p in points] == [0, 1, 2, 3]
        assert [p.as_dict for p in points] == [
            {"g": 0.1, "alpha": 0.2},
            {"g": 0.1, "alpha": 0.5},
            {"g": 0.3, "alpha": 0.2},
            {"g": 0.3, "alpha": 0.5},
        ]

    def test_point_config_keeps_asymmetry(self, tmp_path):
        cfg = sweep_config(tmp_path, g=0.2, g2=0.1, detuning=0.0, detuning2=0.2, g_grid=(0.6,), delta_grid=(0.1,))
        point = build_points(cfg)[0]
        cfg_point = point_config(cfg, point)
        assert cfg_point.mode == "dynamics"
        assert cfg_point.g == pytest.approx(0.6)
        assert cfg_point.g2 == pytest.approx(0.3)
        assert cfg_point.detuning == pytest.approx(0.1)
        assert cfg_point.detuning2 == pytest.approx(0.3)

    def test_sidecar_names(self, tmp_path):
        assert sidecar(tmp_path / "run.csv", "esd.json").name == "run.esd.json"

    def test_layout(self):
        assert "y = g" in sweep_layout(["g"])
        assert "per alpha" in sweep_layout(["g", "alpha"])


class TestRunSweep:
    def test_failed_point_is_recorded(self, tmp_path):
        cfg = sweep_config(tmp_path, g_grid=(0.1,), n_tr_initial=8, n_tr_max=8)
        result = evaluate_point(cfg, build_points(cfg)[0])
        assert result.failed
        assert result.error_type == "NonConvergence"

    def test_outputs(self, tmp_path):
        cfg = sweep_config(tmp_path, g_grid=(0.05, 0.2), histogram_bins=4)
        outcome = run_sweep(cfg)
        assert outcome.axes == ["g"]
        assert not outcome.failures
        assert all(r.series.densities is None for r in outcome.results)

        written = write_sweep_outputs(cfg, outcome)
        names = sorted(p.name for p in written)
        assert names == sorted([
            "sweep.csv", "sweep.summary.csv", "sweep.hist.csv",
            "sweep.esd.json", "sweep.errors.json", "sweep.plot.txt",
        ])

        lines = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "g,t,C"
        assert len(lines) == 1 + 2 * 21
        assert lines[1].startswith("5.00000000000e-02,0.00000000000e+00,")

        summary = (tmp_path / "sweep.summary.csv").read_text(encoding="utf-8").splitlines()
        assert summary[0] == "g,mean_C,esd_duration,esd_count"
        assert len(summary) == 3
        weak, strong = (float(line.split(",")[1]) for line in summary[1:])
        assert weak > strong
        hist = (tmp_path / "sweep.hist.csv").read_text(encoding="utf-8").splitlines()
        assert len(hist) == 1 + 2 * 4
        assert json.loads((tmp_path / "sweep.errors.json").read_text(encoding="utf-8")) == []

    def test_errors_sidecar(self, tmp_path):
        cfg = sweep_config(tmp_path, g_grid=(0.1, 0.2), n_tr_initial=8, n_tr_max=8)
        outcome = run_sweep(cfg)
        assert len(outcome.failures) == 2
        write_sweep_outputs(cfg, outcome)
        errors = json.loads((tmp_path / "sweep.errors.json").read_text(encoding="utf-8"))
        assert [e["point"] for e in errors] == [{"g": 0.1}, {"g": 0.2}]
        assert (tmp_path / "sweep.csv").read_text(encoding="utf-8") == "g,t,C\n"
