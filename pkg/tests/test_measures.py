import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commspec.measures import (
    BivariateSpectralMeasure,
    ImagSpectrum,
    SingularUpdateError,
    UnivariateSpectralMeasure,
    empirical_stieltjes,
    esd_cdf_eval,
    ks_distance,
    rank2_inverse_apply,
)


class TestMeasures:
    def test_weights_renormalized_within_tolerance(self):
        m = UnivariateSpectralMeasure([(1.0, 0.5 + 2e-10), (2.0, 0.5)])
        assert m.w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_weights_rejected_beyond_tolerance(self):
        with pytest.raises(ValueError):
            UnivariateSpectralMeasure([(1.0, 0.5), (2.0, 0.4)])

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            UnivariateSpectralMeasure([(1.0, 1.5), (2.0, -0.5)])

    def test_negative_location_rejected(self):
        with pytest.raises(ValueError):
            BivariateSpectralMeasure([(-1.0, 1.0, 1.0)])

    def test_first_moments(self):
        m = BivariateSpectralMeasure([(1, 2, 0.25), (3, 0, 0.75)])
        assert m.first_moments() == pytest.approx((2.5, 0.5))

    def test_quantile_discretization(self):
        # exponential(1) quantiles; 64 atoms, mean close to 1
        m = UnivariateSpectralMeasure.from_quantile_fn(
            lambda q: -math.log1p(-q), n_atoms=64)
        assert len(m.lam) == 64
        assert m.first_moment() == pytest.approx(1.0, abs=0.05)

    def test_degenerate_marker(self):
        assert BivariateSpectralMeasure.point(0.0, 0.0).is_degenerate_at_zero()
        assert not BivariateSpectralMeasure.point(0.0, 1.0).is_degenerate_at_zero()


class TestEmpiricalStieltjes:
    def test_all_zero_spectrum(self):
        spec = ImagSpectrum(np.zeros(5))
        assert empirical_stieltjes(spec, -1.0) == pytest.approx(1.0)

    def test_symmetric_pair_is_real(self):
        a, u = 1.3, 0.7
        spec = ImagSpectrum([-a, a])
        val = empirical_stieltjes(spec, -u)
        assert val.imag == pytest.approx(0.0, abs=1e-15)
        assert val.real == pytest.approx(u / (u * u + a * a))

    def test_direct_summation_oracle(self):
        # frozen from the independent per-term summation
        spec = ImagSpectrum([1.0, 2.0, 3.0])
        val = empirical_stieltjes(spec, complex(-0.5, 1.0))
        assert val == pytest.approx(0.8392156862745098 - 0.4235294117647059j)

    def test_rejects_right_half_plane(self):
        spec = ImagSpectrum([1.0])
        with pytest.raises(ValueError):
            empirical_stieltjes(spec, 0.5)
        with pytest.raises(ValueError):
            empirical_stieltjes(spec, 1j)

    @given(
        vals=st.lists(st.floats(-50, 50), min_size=1, max_size=30),
        re=st.floats(-20, -1e-3),
        im=st.floats(-20, 20),
    )
    @settings(max_examples=200, deadline=None)
    def test_maps_left_to_right_and_bounded(self, vals, re, im):
        spec = ImagSpectrum(vals)
        z = complex(re, im)
        s = empirical_stieltjes(spec, z)
        assert s.real > 0
        assert abs(s) <= 1.0 / abs(z.real) + 1e-12

    @given(
        vals=st.lists(st.floats(0.0, 40.0), min_size=1, max_size=15),
        re=st.floats(-10, -0.01),
        im=st.floats(0.01, 10),
    )
    @settings(max_examples=100, deadline=None)
    def test_conjugate_symmetry_for_symmetric_spectra(self, vals, re, im):
        sym = sorted(vals + [-v for v in vals])
        spec = ImagSpectrum(sym)
        z = complex(re, im)
        assert empirical_stieltjes(spec, z.conjugate()) == pytest.approx(
            empirical_stieltjes(spec, z).conjugate())


class TestEsdCdf:
    def test_counting(self):
        spec = ImagSpectrum([1.0, 2.0, 3.0])
        assert esd_cdf_eval(spec, 2.0) == pytest.approx(2 / 3)

    def test_tails(self):
        spec = ImagSpectrum([1.0, 2.0, 3.0])
        assert esd_cdf_eval(spec, 1e12) == 1.0
        assert esd_cdf_eval(spec, 0.999) == 0.0


class TestKsDistance:
    def test_matching_step_is_zero(self):
        spec = ImagSpectrum([0.0])
        assert ks_distance(spec, lambda x: 1.0 if x >= 0 else 0.0) == 0.0

    def test_half_against_centered_step(self):
        # hand evaluation: both step functions disagree by 1/2 on one side
        spec = ImagSpectrum([-1.0, 1.0])
        assert ks_distance(spec, lambda x: 1.0 if x >= 0 else 0.0) == pytest.approx(0.5)

    def test_self_distance_zero(self):
        vals = np.array([-2.0, -1.0, 0.5, 3.0])
        spec = ImagSpectrum(vals)
        assert ks_distance(spec, lambda x: esd_cdf_eval(spec, x)) == 0.0

    def test_colocated_atom_no_spurious_gap(self):
        # a third of the spectrum exactly at 0 against a CDF with a 1/3 atom
        spec = ImagSpectrum([-1.0, 0.0, 1.0])

        def cdf(x):
            base = 1.0 / 3 if x >= -1 else 0.0
            if x >= 1:
                base = 2.0 / 3
            return base + (1.0 / 3 if x >= 0 else 0.0)

        assert ks_distance(spec, cdf) == pytest.approx(0.0, abs=1e-15)


def _random_skew_hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A - A.conj().T) / 2


class TestRankTwoUpdate:
    def test_zero_u_reduces_to_plain_solve(self):
        rng = np.random.default_rng(0)
        B = _random_skew_hermitian(rng, 6) - (-1.0 + 0.4j) * np.eye(6)
        u = np.zeros(6, dtype=complex)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        co = rank2_inverse_apply(B, u, v)
        lhs = np.linalg.solve(B + np.outer(u, v.conj()) - np.outer(v, u.conj()), v)
        rhs = np.linalg.solve(B, co.alpha2 * v + co.beta2 * u)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_scalar_case_matches_direct_inverse(self):
        z = complex(-0.8, 0.3)
        B = np.array([[-z]])
        u = np.array([1.5 + 0.2j])
        v = np.array([-0.7 + 1.1j])
        co = rank2_inverse_apply(B, u, v)
        M = B + np.outer(u, v.conj()) - np.outer(v, u.conj())
        np.testing.assert_allclose(
            np.linalg.solve(M, u), np.linalg.solve(B, co.alpha1 * u + co.beta1 * v),
            rtol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_dense_solve_oracle_8x8(self, seed):
        rng = np.random.default_rng(seed)
        n = 8
        z = complex(-1.0, 0.3)
        B = _random_skew_hermitian(rng, n) - z * np.eye(n)
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        co = rank2_inverse_apply(B, u, v)
        M = B + np.outer(u, v.conj()) - np.outer(v, u.conj())
        for w, a, b in ((u, co.alpha1, co.beta1), (v, co.alpha2, co.beta2)):
            other = v if w is u else u
            lhs = np.linalg.solve(M, w)
            rhs = np.linalg.solve(B, a * w + b * other)
            err = np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs)
            assert err <= 1e-10

    def test_denominator_recomputation_invariant(self):
        rng = np.random.default_rng(3)
        n = 5
        B = _random_skew_hermitian(rng, n) - (-2.0 + 1j) * np.eye(n)
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        co = rank2_inverse_apply(B, u, v)
        sol = np.linalg.solve(B, np.column_stack([u, v]))
        uv = u.conj() @ sol[:, 1]
        vu = v.conj() @ sol[:, 0]
        uu = u.conj() @ sol[:, 0]
        vv = v.conj() @ sol[:, 1]
        D = 1.0 / ((1 - uv) * (1 + vu) + uu * vv)
        assert co.D == pytest.approx(D, rel=1e-12)

    def test_singular_denominator_signalled(self):
        # denominator (1-<u,v>)(1+<v,u>) + <u,u><v,v> = (1)(1) + (1)(-1) = 0
        B = np.diag([1.0, -1.0]).astype(complex)
        u = np.array([1.0, 0.0], dtype=complex)
        v = np.array([0.0, 1.0], dtype=complex)
        with pytest.raises(SingularUpdateError):
            rank2_inverse_apply(B, u, v)
