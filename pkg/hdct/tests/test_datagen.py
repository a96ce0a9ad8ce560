from unittest import TestCase

import numpy as np
import scipy.stats

from hdct import rng as rngs
from hdct.core import LogBasisMatrix
from hdct.datagen import (
    Covariance,
    CovarianceSpec,
    Distribution,
    DistributionSpec,
    SignalSpec,
    ar_covariance,
    build_covariance,
    generate_log_basis,
    matrix_sqrt_sym,
    rook_matrix,
    sample_innovations,
    signal_vector,
    spatial_factor_covariance,
    spike_count,
    to_composition,
)
from hdct.errors import DomainError, NonSymmetric, NotPSD


class TestCovariances(TestCase):
    def test_ar_entries(self):
        sigma = ar_covariance(5)
        self.assertEqual(sigma[0, 0], 1.0)
        self.assertEqual(sigma[0, 1], 0.5)
        self.assertEqual(sigma[1, 4], 0.125)
        np.testing.assert_array_equal(sigma, sigma.T)

    def test_spike_count(self):
        self.assertEqual(spike_count(200, 0.3), 4)
        self.assertEqual(spike_count(1000, 1 / 3), 10)
        self.assertEqual(spike_count(2, 0.3), 1)

    def test_spiked_structure(self):
        sigma = build_covariance(CovarianceSpec("B2", p=50, build_seed=1))
        diag = np.diag(sigma)
        self.assertTrue(np.all((diag >= 1.0) & (diag <= 2.0)))
        k = spike_count(50, 0.3)
        # off-diagonal mass only inside the leading k x k block
        off = sigma - np.diag(diag)
        self.assertTrue(np.all(off[k:, :] == 0))
        self.assertTrue(np.all(off[:k, :k][~np.eye(k, dtype=bool)] > 0))
        self.assertGreater(np.linalg.eigvalsh(sigma).min(), 0)

    def test_build_seed_fixes_the_draw(self):
        a = build_covariance(CovarianceSpec("B3", p=30, build_seed=7))
        b = build_covariance(CovarianceSpec("B3", p=30, build_seed=7))
        c = build_covariance(CovarianceSpec("B3", p=30, build_seed=8))
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_spatial_factor_is_spd(self):
        sigma = build_covariance(CovarianceSpec("B3", p=40, build_seed=3))
        np.testing.assert_allclose(sigma, sigma.T, atol=0)
        self.assertGreater(np.linalg.eigvalsh(sigma).min(), 0)

    def test_spatial_factor_without_autocorrelation(self):
        p = 4
        sigma = spatial_factor_covariance(p, rngs.stream(5), rho_eps=0.0)
        gen = rngs.stream(5)
        gamma = np.zeros(p)
        k = spike_count(p, 0.3)
        gamma[:k] = gen.uniform(0.7, 0.9, size=k)
        np.testing.assert_allclose(sigma, np.outer(gamma, gamma) + np.eye(p), atol=1e-14)

    def test_rook_rows(self):
        w = rook_matrix(4)
        np.testing.assert_array_equal(w.sum(axis=1), np.ones(4))
        self.assertEqual(w[0, 1], 1.0)
        self.assertEqual(w[1, 0], 0.5)

    def test_missing_build_seed(self):
        with self.assertRaises(DomainError):
            build_covariance(CovarianceSpec("B2", p=10))

    def test_explicit(self):
        spec = CovarianceSpec(Covariance.Explicit, matrix=[[2.0, 0.5], [0.5, 1.0]])
        self.assertEqual(spec.p, 2)
        np.testing.assert_array_equal(build_covariance(spec), [[2.0, 0.5], [0.5, 1.0]])
        with self.assertRaises(NonSymmetric):
            CovarianceSpec(Covariance.Explicit, matrix=[[2.0, 0.5], [0.4, 1.0]])

    def test_lookup_by_label(self):
        self.assertIs(CovarianceSpec("b1", p=3).kind, Covariance.B1_AR)
        self.assertIs(DistributionSpec("A3").kind, Distribution.A3_MixtureNormal)
        with self.assertRaises(DomainError):
            DistributionSpec("A9")


class TestMatrixSqrt(TestCase):
    def test_squares_back(self):
        sigma = build_covariance(CovarianceSpec("B2", p=25, build_seed=4))
        root = matrix_sqrt_sym(sigma)
        np.testing.assert_allclose(root @ root, sigma, atol=1e-10)
        np.testing.assert_array_equal(root, root.T)

    def test_diagonal_cases(self):
        np.testing.assert_allclose(matrix_sqrt_sym(np.eye(5)), np.eye(5), atol=1e-14)
        np.testing.assert_allclose(matrix_sqrt_sym(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_singular_psd(self):
        sigma = np.ones((3, 3))
        root = matrix_sqrt_sym(sigma)
        np.testing.assert_allclose(root @ root, sigma, atol=1e-12)

    def test_indefinite(self):
        with self.assertRaises(NotPSD):
            matrix_sqrt_sym(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestSampling(TestCase):
    def test_innovation_laws(self):
        gen = rngs.stream(11)
        laws = {
            "A1": scipy.stats.norm(),
            "A2": scipy.stats.t(df=3, scale=1 / np.sqrt(3)),
        }
        for label, law in laws.items():
            u = sample_innovations(DistributionSpec(label), 200, 100, gen)
            self.assertGreater(scipy.stats.kstest(u.ravel(), law.cdf).pvalue, 1e-3)
            self.assertAlmostEqual(u.mean(), 0.0, delta=0.02)

    def test_mixture_variance(self):
        u = sample_innovations(DistributionSpec("A3"), 400, 200, rngs.stream(12))
        self.assertAlmostEqual(u.var() / 1.8, 1.0, delta=0.1)
        # about a tenth of the draws come from the wide component
        self.assertAlmostEqual(np.mean(np.abs(u) > 4.0), 0.1 * 2 * scipy.stats.norm.sf(4.0 / 3.0), delta=0.01)

    def test_same_stream_same_data(self):
        spec = DistributionSpec("A2")
        a = sample_innovations(spec, 5, 4, rngs.replication_stream(3, 17, rngs.GROUP_TWO))
        b = sample_innovations(spec, 5, 4, rngs.replication_stream(3, 17, rngs.GROUP_TWO))
        c = sample_innovations(spec, 5, 4, rngs.replication_stream(3, 17, rngs.GROUP_ONE))
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_log_basis_mean(self):
        p = 10
        mu = signal_vector(SignalSpec(3, 0.5), p)
        w = generate_log_basis(mu, matrix_sqrt_sym(ar_covariance(p)), DistributionSpec("A1"), 10000, rngs.stream(2))
        np.testing.assert_allclose(w.values.mean(axis=0), mu, atol=0.06)

    def test_to_composition_rows_close(self):
        w = generate_log_basis(np.zeros(6), np.eye(6) * 30, DistributionSpec("A1"), 10, rngs.stream(5))
        x = to_composition(w)
        np.testing.assert_allclose(x.values.sum(axis=1), 1.0, atol=1e-12)
        self.assertTrue(np.all(x.values > 0))


    def test_zero_root_gives_the_mean(self):
        mu = np.array([0.3, -1.0, 2.0, 0.0])
        w = generate_log_basis(mu, np.zeros((4, 4)), DistributionSpec("A1"), 6, rngs.stream(9))
        np.testing.assert_array_equal(w.values, np.tile(mu, (6, 1)))

    def test_constant_row_is_uniform(self):
        x = to_composition(LogBasisMatrix([[1e5] * 4, [-3.0] * 4]))
        np.testing.assert_array_equal(x.values, np.full((2, 4), 0.25))

    def test_wide_row_stays_positive(self):
        x = to_composition(LogBasisMatrix([[0.0, -800.0, 800.0]]))
        self.assertTrue(np.all(x.values > 0))
        self.assertAlmostEqual(float(x.values.sum()), 1.0, places=14)
        self.assertAlmostEqual(float(x.values[0, 2]), 1.0, places=14)


class TestSignal(TestCase):
    def test_energy_split(self):
        mu = signal_vector(SignalSpec(4, 0.5), 10)
        self.assertAlmostEqual(float(np.sum(mu**2)), 0.5, places=14)
        self.assertEqual(np.count_nonzero(mu), 4)

    def test_bounds(self):
        with self.assertRaises(DomainError):
            SignalSpec(0)
        with self.assertRaises(DomainError):
            SignalSpec(2, energy=0.0)
        with self.assertRaises(DomainError):
            signal_vector(SignalSpec(11), 10)
