import math

import numpy as np
import pytest

from commspec.closedform import density_identity, support_params
from commspec.fixedpoint import ModelSpec, SolverConfig
from commspec.inversion import (
    DensityCurve,
    EpsSchedule,
    curve_to_cdf,
    density_at,
    density_grid,
    interval_mass,
    point_mass_zero,
)
from commspec.measures import BivariateSpectralMeasure

CFG = SolverConfig()
SCHED = EpsSchedule()

FOUR_ATOM = BivariateSpectralMeasure(
    [(1, 1, 0.25), (1, 2, 0.25), (2, 1, 0.25), (2, 2, 0.25)])
MIX_03_07 = BivariateSpectralMeasure([(0.0, 0.0, 0.3), (1.0, 1.0, 0.7)])


class TestEpsSchedule:
    def test_default(self):
        assert SCHED.eps_list == (1e-2, 1e-3, 1e-4)

    def test_must_decrease(self):
        with pytest.raises(ValueError):
            EpsSchedule(eps_list=(1e-3, 1e-2))
        with pytest.raises(ValueError):
            EpsSchedule(eps_list=(1e-2, -1e-3))


class TestDensityAt:
    def test_identity_c1_center(self):
        f = density_at(ModelSpec.identity(1.0), 0.0, SCHED, CFG)
        assert f == pytest.approx(1.0 / math.pi, abs=1e-3)

    def test_identity_c1_outside_support(self):
        f = density_at(ModelSpec.identity(1.0), 5.0, SCHED, CFG)
        assert f == pytest.approx(0.0, abs=1e-3)

    def test_symmetry(self):
        model = ModelSpec.identity(1.0)
        assert density_at(model, 1.0, SCHED, CFG) == pytest.approx(
            density_at(model, -1.0, SCHED, CFG), abs=1e-6)

    @pytest.mark.parametrize("c", (0.5, 1.0, 3.0))
    def test_matches_closed_form_interior(self, c):
        model = ModelSpec.identity(c)
        sp = support_params(c)
        lo = max(sp.L_c + 0.05, 0.05)
        for x in np.linspace(lo, sp.U_c - 0.05, 12):
            assert density_at(model, x, SCHED, CFG) == pytest.approx(
                density_identity(c, x), abs=1e-3)

    def test_spread_warning_on_divergent_sequence(self):
        # at x = 0 with an atom present the eps sequence diverges
        with pytest.warns(RuntimeWarning):
            density_at(ModelSpec.identity(4.0), 0.0, SCHED, CFG)


class TestPointMassZero:
    def test_identity_c1_none(self):
        assert point_mass_zero(ModelSpec.identity(1.0), SCHED, CFG) == 0.0

    def test_identity_c4(self):
        pm = point_mass_zero(ModelSpec.identity(4.0), SCHED, CFG)
        assert pm == pytest.approx(0.5, abs=5e-3)

    def test_bivariate_mixture_small_c(self):
        pm = point_mass_zero(ModelSpec.general(1.0, MIX_03_07), SCHED, CFG)
        assert pm == pytest.approx(0.3, abs=5e-3)

    def test_bivariate_mixture_large_c(self):
        pm = point_mass_zero(ModelSpec.general(3.0, MIX_03_07), SCHED, CFG)
        assert pm == pytest.approx(1.0 / 3.0, abs=5e-3)


class TestIntervalMass:
    def test_identity_c1_full_support(self):
        sp = support_params(1.0)
        m = interval_mass(ModelSpec.identity(1.0), -sp.U_c - 0.01, sp.U_c + 0.01,
                          SCHED, CFG)
        assert m == pytest.approx(1.0, abs=0.01)

    def test_outside_support(self):
        sp = support_params(1.0)
        m = interval_mass(ModelSpec.identity(1.0), sp.U_c + 0.2, sp.U_c + 1.2,
                          SCHED, CFG, n_points=201)
        assert m == pytest.approx(0.0, abs=1e-3)

    def test_identity_c4_complement_of_atom(self):
        sp = support_params(4.0)
        m = interval_mass(ModelSpec.identity(4.0), -sp.U_c - 0.01, sp.U_c + 0.01,
                          SCHED, CFG)
        assert m == pytest.approx(0.5, abs=0.01)


class TestDensityGrid:
    def test_identity_c2_matches_closed_form(self):
        model = ModelSpec.identity(2.0)
        grid = np.arange(-4.5, 4.5 + 1e-9, 0.05)
        grid = grid[np.abs(np.abs(grid) - 0.0) > 0.04]  # keep off the blow-up at 0
        curve = density_grid(model, grid, SCHED, CFG)
        assert not curve.failures
        for x, f in zip(curve.xs, curve.fs):
            assert f == pytest.approx(density_identity(2.0, x), abs=1e-3)

    def test_empty_grid(self):
        curve = density_grid(ModelSpec.identity(4.0), [], SCHED, CFG)
        assert curve.xs.size == 0
        assert curve.point_mass_zero == pytest.approx(0.5, abs=5e-3)

    def test_four_atom_mass_conservation(self):
        model = ModelSpec.general(1.0, FOUR_ATOM)
        grid = np.linspace(-8.0, 8.0, 401)
        curve = density_grid(model, grid, SCHED, CFG)
        mass = np.trapezoid(curve.fs, curve.xs) + curve.point_mass_zero
        assert mass == pytest.approx(1.0, abs=0.02)
        assert np.all(curve.fs >= 0)
        np.testing.assert_allclose(curve.fs, curve.fs[::-1], atol=1e-8)

    def test_support_markers(self):
        sp = support_params(1.0)
        curve = density_grid(ModelSpec.identity(1.0), [0.0], SCHED, CFG)
        assert curve.support_hi == pytest.approx(sp.U_c)
        curve = density_grid(ModelSpec.general(1.0, FOUR_ATOM), [0.0], SCHED, CFG)
        assert math.isinf(curve.support_hi)


class TestCurveToCdf:
    def test_cdf_with_atom(self):
        model = ModelSpec.general(3.0, FOUR_ATOM)
        grid = np.linspace(-14.0, 14.0, 701)
        curve = density_grid(model, grid, SCHED, CFG)
        cdf = curve_to_cdf(curve)
        assert cdf(-15.0) == 0.0
        assert cdf(14.0) == pytest.approx(1.0, abs=0.02)
        assert cdf(0.0) - cdf(-1e-12) == pytest.approx(1.0 / 3.0, abs=5e-3)

    def test_too_few_points(self):
        curve = DensityCurve(
            xs=np.array([0.0]), fs=np.array([1.0]), point_mass_zero=0.0,
            support_lo=-1, support_hi=1, model=None)
        with pytest.raises(ValueError):
            curve_to_cdf(curve)


class TestHerglotzClamp:
    def test_preclamp_floor(self):
        # outside the support the pre-clamp estimate may be slightly
        # negative but only at rounding scale
        model = ModelSpec.identity(1.0)
        sp = support_params(1.0)
        from commspec.inversion import _extrapolate, _re_s_sequence

        for x in np.linspace(sp.U_c + 0.1, sp.U_c + 2.0, 7):
            vals, _ = _re_s_sequence(model, x, SCHED, CFG)
            est = _extrapolate(SCHED, SCHED.eps_list, vals) / math.pi
            assert est >= -1e-6
