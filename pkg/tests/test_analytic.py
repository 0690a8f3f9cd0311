"""闭式基线：RWA 与变换后的 O(g²) 曲线"""

import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabi_esd.core.analytic import (
    analytic_series,
    concurrence_bell1_transformed,
    concurrence_bell2_transformed,
    concurrence_rwa,
    death_time_closed_form,
    dressed_series,
    effective_params,
    esd_predicate,
    first_death_time,
    rwa_amplitude,
)
from rabi_esd.core.bipartite import BellSpec
from rabi_esd.core.model import ModelParams


class TestEffectiveParams:
    def test_weak_resonant(self, resonant):
        eff = effective_params(resonant(0.1))
        assert eff.delta_eff == pytest.approx(0.995)
        assert eff.delta_detuning_eff == pytest.approx(0.005)
        assert eff.g_eff == pytest.approx(0.1)

    def test_strong_resonant(self, resonant):
        eff = effective_params(resonant(1.0))
        assert eff.delta_eff == pytest.approx(0.5)
        assert eff.nu == pytest.approx(math.sqrt(0.25 + 4.0))
        assert eff.n_factor == pytest.approx(0.485071, abs=1e-6)

    def test_uncoupled_resonant_limit(self, resonant):
        assert effective_params(resonant(0.0)).n_factor == 0.5

    def test_uncoupled_detuned(self):
        eff = effective_params(ModelParams(delta_atom=0.7, g=0.0))
        assert eff.n_factor == 0.0
        assert eff.nu == pytest.approx(0.3)

    def test_negative_splitting_warns(self, resonant, caplog):
        with caplog.at_level(logging.WARNING, logger="rabi_esd.core.analytic"):
            eff = effective_params(resonant(1.5))
        assert eff.delta_eff < 0
        assert "validity" in caplog.text

    def test_singular_denominator(self):
        with pytest.raises(ValueError):
            effective_params(ModelParams(omega=1.0, delta_atom=-1.0, g=0.1))

    @given(g=st.floats(min_value=0.0, max_value=1.2), detuning=st.floats(min_value=-0.5, max_value=0.5))
    @settings(max_examples=100, deadline=None)
    def test_amplitude_bounded(self, g, detuning):
        eff = effective_params(ModelParams.from_detuning(g, detuning))
        assert 0.0 <= eff.n_factor <= 0.5 + 1e-15


class TestRwa:
    def test_resonant_amplitude(self, resonant):
        n_factor, nu = rwa_amplitude(resonant(0.2))
        assert n_factor == pytest.approx(0.5)
        assert nu == pytest.approx(0.4)

    def test_cos_squared_law(self, resonant):
        p = resonant(1e-4)
        t = np.linspace(0.0, math.pi / 1e-4, 501)
        c = concurrence_rwa(p, BellSpec("bell1", math.pi / 4), t)
        assert np.allclose(c, np.cos(1e-4 * t) ** 2, atol=1e-12)

    def test_scalar_time(self, resonant):
        value = concurrence_rwa(resonant(0.1), BellSpec("bell1", math.pi / 4), 0.0)
        assert isinstance(value, float)
        assert value == pytest.approx(1.0)


class TestTransformedCurves:
    def test_bell1_nonnegative(self, resonant):
        t = np.linspace(0.0, 60.0, 2001)
        c = concurrence_bell1_transformed(resonant(0.5), math.pi / 4, t)
        assert np.all(c >= 0.0)
        assert c[0] == pytest.approx(1.0)

    def test_bell2_clipped(self, resonant):
        t = np.linspace(0.0, 60.0, 2001)
        c = concurrence_bell2_transformed(resonant(0.5), math.pi / 12, t)
        assert np.all(c >= 0.0)
        assert np.any(c == 0.0)
        assert c[0] == pytest.approx(0.5)

    @pytest.mark.parametrize("g,alpha", [(0.5, math.pi / 12), (0.25, math.pi / 8), (0.1, math.pi / 4)])
    def test_predicate_matches_zero_region(self, resonant, g, alpha):
        p = resonant(g)
        t = np.linspace(0.013, 80.0, 997)
        dead = esd_predicate(p, alpha, t)
        c = concurrence_bell2_transformed(p, alpha, t)
        assert np.array_equal(dead, c == 0.0)

    def test_predicate_scalar(self, resonant):
        assert esd_predicate(resonant(0.5), math.pi / 12, 0.0) is False

    def test_series_matches_pointwise(self, resonant):
        p = resonant(0.3)
        t = np.linspace(0.0, 20.0, 101)
        bell = BellSpec("bell2", math.pi / 12)
        assert np.array_equal(analytic_series(p, bell, t, "transformed"),
                              concurrence_bell2_transformed(p, math.pi / 12, t))

    def test_asymmetric_atoms(self):
        p1, p2 = ModelParams(g=0.2), ModelParams(g=0.1)
        t = np.linspace(0.0, 30.0, 301)
        c = analytic_series(p1, BellSpec("bell1", math.pi / 4), t, "transformed", params2=p2)
        e1, e2 = effective_params(p1), effective_params(p2)
        y1 = 4 * e1.n_factor ** 2 * np.sin(e1.nu * t / 2) ** 2
        y2 = 4 * e2.n_factor ** 2 * np.sin(e2.nu * t / 2) ** 2
        assert np.allclose(c, np.sqrt((1 - y1) * (1 - y2)), atol=1e-12)

    def test_unknown_source(self, resonant):
        with pytest.raises(ValueError):
            analytic_series(resonant(0.1), BellSpec("bell1", 0.3), [0.0, 1.0], "exact")


class TestDressedSeries:
    """一致框架下的重整化 JC 基线"""

    @pytest.mark.parametrize("kind", ["bell1", "bell2"])
    def test_starts_from_bell_value(self, resonant, kind):
        bell = BellSpec(kind, math.pi / 12)
        c = dressed_series(resonant(0.3), bell, [0.0])
        assert c[0] == pytest.approx(abs(math.sin(math.pi / 6)), abs=1e-10)

    def test_uncoupled_is_constant(self, resonant):
        t = np.linspace(0.0, 20.0, 41)
        c = dressed_series(resonant(0.0), BellSpec("bell1", 0.3), t)
        assert np.allclose(c, abs(math.sin(0.6)), atol=1e-10)

    def test_bounded(self, resonant):
        t = np.linspace(0.0, 40.0, 161)
        c = dressed_series(resonant(0.4), BellSpec("bell2", math.pi / 8), t)
        assert np.all(c >= 0.0)
        assert np.all(c <= 1.0 + 1e-12)

    def test_dispatch(self, resonant):
        t = np.linspace(0.0, 10.0, 21)
        bell = BellSpec("bell1", math.pi / 4)
        assert np.array_equal(analytic_series(resonant(0.2), bell, t, "dressed"),
                              dressed_series(resonant(0.2), bell, t))

    def test_asymmetric_atoms_commute_for_symmetric_state(self):
        p1, p2 = ModelParams(g=0.2), ModelParams.from_detuning(0.1, 0.2)
        t = np.linspace(0.0, 15.0, 31)
        bell = BellSpec("bell2", math.pi / 4)
        forward = dressed_series(p1, bell, t, params2=p2)
        backward = dressed_series(p2, bell, t, params2=p1)
        assert np.allclose(forward, backward, atol=1e-10)
        assert not np.allclose(forward, dressed_series(p1, bell, t), atol=1e-3)

    def test_weak_coupling_close_to_closed_form(self, resonant):
        t = np.linspace(0.0, 10.0, 51)
        bell = BellSpec("bell1", math.pi / 4)
        closed = analytic_series(resonant(1e-3), bell, t, "transformed")
        assert np.max(np.abs(dressed_series(resonant(1e-3), bell, t) - closed)) < 1e-2


class TestDeathTime:
    @pytest.mark.parametrize("g,alpha", [(1e-3, math.pi / 12), (0.3, math.pi / 12), (0.5, math.pi / 8)])
    def test_root_matches_closed_form(self, resonant, g, alpha):
        eff = effective_params(resonant(g))
        root = first_death_time(alpha, eff.n_factor, eff.nu)
        closed = death_time_closed_form(alpha, eff.n_factor, eff.nu)
        assert root is not None
        assert root == pytest.approx(closed, abs=1e-10 * max(1.0, closed))

    def test_curve_vanishes_at_death(self, resonant):
        p = resonant(0.3)
        eff = effective_params(p)
        t_star = first_death_time(math.pi / 12, eff.n_factor, eff.nu)
        assert concurrence_bell2_transformed(p, math.pi / 12, t_star) == pytest.approx(0.0, abs=1e-10)
        assert concurrence_bell2_transformed(p, math.pi / 12, 0.9 * t_star) > 0.0

    def test_maximally_entangled_never_dies(self, resonant):
        eff = effective_params(resonant(0.3))
        assert first_death_time(math.pi / 4, eff.n_factor, eff.nu) is None
        assert death_time_closed_form(math.pi / 4, eff.n_factor, eff.nu) is None

    def test_degenerate_frequency(self):
        assert first_death_time(0.2, 0.5, 0.0) is None
        assert death_time_closed_form(0.2, 0.5, 0.0) is None
