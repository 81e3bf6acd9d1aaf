import math

import numpy as np
import pytest

from commspec.closedform import identity_cdf
from commspec.measures import BivariateSpectralMeasure, ks_distance
from commspec.simulate import (
    InnovationSpec,
    ScalingSpec,
    anticommutator,
    build_scaling,
    commutator,
    eigenvalues_skew,
    gen_innovations,
    run_experiment,
    run_experiment_config,
)

DELTA_1_4 = BivariateSpectralMeasure.point(1.0, 4.0)
FOUR_ATOM = BivariateSpectralMeasure(
    [(1, 1, 0.25), (1, 2, 0.25), (2, 1, 0.25), (2, 2, 0.25)])


class TestInnovations:
    def test_deterministic(self):
        spec = InnovationSpec(kind="gaussian", seed=42)
        A = gen_innovations(30, 20, spec)
        B = gen_innovations(30, 20, spec)
        np.testing.assert_array_equal(A, B)

    def test_uniform_range_and_variance(self):
        spec = InnovationSpec(kind="uniform", seed=1)
        Z = gen_innovations(400, 400, spec)
        assert np.all(np.abs(Z) <= math.sqrt(3.0))
        assert Z.var() == pytest.approx(1.0, rel=0.02)

    def test_mixed_variance(self):
        Z = gen_innovations(2000, 2000, InnovationSpec(kind="mixed", seed=7))
        assert Z.var() == pytest.approx(1.0, rel=0.02)
        assert Z.mean() == pytest.approx(0.0, abs=0.002)

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            InnovationSpec(kind="cauchy")


class TestBuildScaling:
    def test_identity(self):
        s1, s2 = build_scaling(ScalingSpec(kind="identity"), 5, seed=0)
        np.testing.assert_array_equal(s1, np.eye(5))
        np.testing.assert_array_equal(s2, np.eye(5))

    def test_commuting_diag_scalar_pair(self):
        s1, s2 = build_scaling(ScalingSpec(kind="commuting_diag", H=DELTA_1_4),
                               6, seed=0)
        np.testing.assert_allclose(s1, np.eye(6))
        np.testing.assert_allclose(s2, 2.0 * np.eye(6))

    def test_householder_low_rank_commutation_defect(self):
        spec = ScalingSpec(kind="householder_lowrank", H=FOUR_ATOM, k=3)
        s1, s2 = build_scaling(spec, 60, seed=2)
        sig1, sig2 = s1 @ s1, s2 @ s2
        # different reflectors: generically non-commuting, but the defect
        # rank is bounded by 8k (rank(P1 - P2) <= 2k enters twice per side)
        defect = sig1 @ sig2 - sig2 @ sig1
        assert np.linalg.norm(defect) > 1e-8
        assert np.linalg.matrix_rank(defect, tol=1e-8) <= 8 * 3

    def test_haar_noncommuting(self):
        spec = ScalingSpec(kind="haar_noncommuting", H=FOUR_ATOM)
        s1, s2 = build_scaling(spec, 40, seed=3)
        sig1, sig2 = s1 @ s1, s2 @ s2
        assert np.linalg.norm(sig1 @ sig2 - sig2 @ sig1) > 1e-6
        # square roots are symmetric psd with eigenvalues from the atom set
        np.testing.assert_allclose(s1, s1.T, atol=1e-10)
        w = np.linalg.eigvalsh(sig1)
        assert set(np.round(w).tolist()) <= {1.0, 2.0}

    def test_measure_required(self):
        with pytest.raises(ValueError):
            ScalingSpec(kind="haar_noncommuting")


class TestCommutatorOps:
    def test_scalar_real_commutes(self):
        a = np.array([[2.0]])
        b = np.array([[3.0]])
        assert commutator(a, b) == pytest.approx(0.0)

    def test_self_commutator_zero(self):
        X = np.random.default_rng(0).standard_normal((4, 6))
        np.testing.assert_array_equal(commutator(X, X), np.zeros((4, 4)))

    def test_exact_skew_symmetry(self):
        rng = np.random.default_rng(1)
        S = commutator(rng.standard_normal((4, 6)), rng.standard_normal((4, 6)))
        np.testing.assert_array_equal(S, -S.T)

    def test_anticommutator_psd_for_equal_args(self):
        X = np.random.default_rng(2).standard_normal((5, 8))
        S = anticommutator(X, X)
        np.testing.assert_allclose(S, 2.0 * X @ X.T / 8, atol=1e-14)
        assert np.all(np.linalg.eigvalsh(S) >= -1e-12)

    def test_rotation_relation(self):
        # [X1, i X2] = -i {X1, X2}
        rng = np.random.default_rng(3)
        X1 = rng.standard_normal((5, 7)).astype(complex)
        X2 = rng.standard_normal((5, 7)).astype(complex)
        lhs = commutator(X1, 1j * X2)
        rhs = -1j * anticommutator(X1, X2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)

    def test_zero_anticommutator(self):
        X = np.random.default_rng(4).standard_normal((3, 5))
        np.testing.assert_array_equal(anticommutator(X, np.zeros_like(X)),
                                      np.zeros((3, 3)))

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            commutator(np.zeros((3, 4)), np.zeros((3, 5)))


class TestEigenvaluesSkew:
    def test_2x2_closed_form(self):
        a = 1.7
        S = np.array([[0.0, a], [-a, 0.0]])
        spec = eigenvalues_skew(S)
        np.testing.assert_allclose(spec.vals, [-a, a])

    def test_zero_matrix(self):
        spec = eigenvalues_skew(np.zeros((4, 4)))
        np.testing.assert_array_equal(spec.vals, np.zeros(4))

    def test_plus_minus_pairing(self):
        rng = np.random.default_rng(5)
        S = commutator(rng.standard_normal((31, 40)), rng.standard_normal((31, 40)))
        v = eigenvalues_skew(S).vals
        np.testing.assert_allclose(v, -v[::-1], atol=1e-10)

    def test_rejects_non_skew(self):
        with pytest.raises(ValueError):
            eigenvalues_skew(np.eye(3))


class TestRunExperiment:
    def test_determinism(self):
        kw = dict(p=40, n=80, innovation=InnovationSpec(kind="mixed"),
                  scaling=ScalingSpec(kind="identity"), seed=9)
        a = run_experiment(**kw)
        b = run_experiment(**kw)
        np.testing.assert_array_equal(a.spectrum.vals, b.spectrum.vals)

    def test_config_round_trip(self):
        sample = run_experiment(
            p=30, n=60, innovation=InnovationSpec(kind="uniform", seed=3),
            scaling=ScalingSpec(kind="haar_noncommuting", H=FOUR_ATOM),
            rho=0.4, seed=3)
        again = run_experiment_config(sample.config)
        np.testing.assert_array_equal(sample.spectrum.vals, again.spectrum.vals)
        assert again.config == sample.config

    def test_second_moment_matches_law(self):
        # (1/p) sum lam^2 -> 2c for identity scalings
        p, n = 800, 400
        sample = run_experiment(p=p, n=n, innovation=InnovationSpec(kind="gaussian"),
                                scaling=ScalingSpec(kind="identity"), seed=21)
        m2 = float(np.mean(sample.spectrum.vals ** 2))
        assert m2 == pytest.approx(2.0 * p / n, rel=0.03)

    def test_ks_against_theory_moderate_p(self):
        sample = run_experiment(p=600, n=600,
                                innovation=InnovationSpec(kind="mixed"),
                                scaling=ScalingSpec(kind="identity"), seed=13)
        ks = ks_distance(sample.spectrum, identity_cdf(1.0))
        assert ks <= 0.06

    def test_anti_spectrum_real_and_rotation_consistent(self):
        sample = run_experiment(p=1200, n=1200,
                                innovation=InnovationSpec(kind="gaussian"),
                                scaling=ScalingSpec(kind="identity"),
                                anti=True, seed=4)
        # anti-commutator limit is the rotated commutator limit: same CDF
        # on the real line
        ks = ks_distance(sample.spectrum, identity_cdf(1.0))
        assert ks <= 0.03

    def test_shrinkage_effect(self):
        rho = 0.7
        kw = dict(p=500, n=250, innovation=InnovationSpec(kind="gaussian"),
                  scaling=ScalingSpec(kind="identity"))
        t1 = math.sqrt(np.mean(run_experiment(rho=rho, seed=5, **kw).spectrum.vals ** 2))
        t0 = math.sqrt(np.mean(run_experiment(rho=0.0, seed=5, **kw).spectrum.vals ** 2))
        assert t1 / t0 == pytest.approx(math.sqrt(1 - rho ** 2), abs=0.03)

    def test_rho_validation(self):
        with pytest.raises(ValueError):
            run_experiment(p=4, n=4, innovation=InnovationSpec(),
                           scaling=ScalingSpec(), rho=1.0)
