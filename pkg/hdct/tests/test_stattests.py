import math
from unittest import TestCase

import numpy as np

from hdct import nulldist
from hdct.clr import clr_transform
from hdct.core import ClrMatrix, close
from hdct.datagen import ar_covariance
from hdct.errors import (
    DimensionMismatch,
    DomainError,
    NegativeVarianceEstimate,
    NonCenteredMu0,
    NonPositiveDiagonal,
    NonSymmetric,
)
from hdct.estimators import MomentSummary, one_sample_moments
from hdct.stattests import (
    Family,
    TestOutcome,
    all_tests_one,
    all_tests_two,
    combine,
    combo_test_one,
    effective_n,
    max_test_one,
    max_test_two,
    sum_statistic,
    sum_test_one,
    sum_test_two,
    theoretical_power_sum,
    theoretical_power_sum_two,
)
from hdct.tests import oracle

F1 = [[1, 0, -1], [0, 1, -1], [2, -1, -1], [-1, 1, 0], [3, -1, -2]]
F2B = [[0, 0, 0], [1, -1, 0], [-1, 1, 0], [0, 1, -1], [0, -1, 1]]
LOGLOG3 = -2 * math.log(3) + math.log(math.log(3))


def outcome(family, statistic, pvalue, threshold):
    return TestOutcome(
        statistic=statistic,
        pvalue=pvalue,
        threshold=threshold,
        alpha=0.05,
        reject=statistic >= threshold,
        family=family,
        n_effective=10,
        p=3,
    )


def assert_rel(case, a, b, tol):
    case.assertLessEqual(abs(a - b), tol * max(1.0, abs(b)), f"{a!r} != {b!r}")


class TestGoldens(TestCase):
    """
    Hand-derived closed forms for the fixtures (see fixtures/README.md).
    """

    def test_f1_one_sample(self):
        s, m, c = all_tests_one(ClrMatrix(F1), None, 0.05)
        assert_rel(self, s.statistic, 9 / math.sqrt(10.3), 1e-12)
        assert_rel(self, m.statistic, 12.5 + LOGLOG3, 1e-12)
        self.assertEqual(s.family, Family.SumOne)
        self.assertEqual(m.family, Family.MaxOne)
        self.assertEqual(c.family, Family.ComboOne)
        assert_rel(self, s.pvalue, 0.5 * math.erfc(9 / math.sqrt(10.3) / math.sqrt(2)), 1e-12)
        self.assertEqual(c.statistic, min(s.pvalue, m.pvalue))
        self.assertTrue(s.reject)
        self.assertTrue(m.reject)
        self.assertEqual((s.n_effective, s.p), (5, 3))

    def test_f2a_identical_groups(self):
        s, m, c = all_tests_two(ClrMatrix(F1), ClrMatrix(F1), 0.05)
        cpn = 1 + 7.4 / 3**1.5
        assert_rel(self, s.statistic, -4 / math.sqrt(2 * 6.275 * cpn), 1e-12)
        assert_rel(self, m.statistic, LOGLOG3, 1e-12)
        self.assertLess(s.statistic, 0)
        self.assertFalse(s.reject or m.reject or c.reject)
        self.assertGreater(m.pvalue, 0.5)

    def test_f2b(self):
        s, m, c = all_tests_two(ClrMatrix(F1), ClrMatrix(F2B), 0.05)
        cpn = 1 + 5 / (3 * math.sqrt(3))
        assert_rel(self, s.statistic, (13 / 3) / math.sqrt((31 / 4) * cpn), 1e-12)
        assert_rel(self, m.statistic, 6.25 + LOGLOG3, 1e-12)
        self.assertEqual(s.family, Family.SumTwo)
        self.assertEqual(c.family, Family.ComboTwo)
        self.assertEqual(s.n_effective, 10)

    def test_single_tests_match_all_tests(self):
        y = ClrMatrix(F1)
        s, m, c = all_tests_one(y, None, 0.05)
        self.assertEqual(sum_test_one(y, None, 0.05), s)
        self.assertEqual(max_test_one(y, None, 0.05), m)
        self.assertEqual(combo_test_one(y, None, 0.05), c)
        self.assertEqual(sum_test_two(y, ClrMatrix(F2B), 0.05).family, Family.SumTwo)
        self.assertEqual(max_test_two(y, ClrMatrix(F2B), 0.05).family, Family.MaxTwo)

    def test_repeatable(self):
        y = ClrMatrix(F1)
        self.assertEqual(all_tests_one(y, None, 0.05), all_tests_one(y, None, 0.05))


class TestOracle(TestCase):
    def test_one_sample_random(self):
        rng = np.random.default_rng(21)
        for n, p in ((12, 8), (40, 6)):
            x = rng.uniform(0.1, 3.0, size=(n, p))
            expected = oracle.one_sample(oracle.clr_rows(x.tolist()))
            s, m, _ = all_tests_one(clr_transform(close(x)), None, 0.05)
            assert_rel(self, s.statistic, expected["t_sum"], 1e-8)
            assert_rel(self, m.statistic, expected["t_max"], 1e-8)

    def test_one_sample_with_mu0(self):
        rng = np.random.default_rng(22)
        x = rng.uniform(0.1, 3.0, size=(15, 7))
        mu0 = rng.normal(size=7)
        mu0 -= mu0.mean()
        expected = oracle.one_sample(oracle.clr_rows(x.tolist()), mu0=mu0.tolist())
        s, m, _ = all_tests_one(clr_transform(close(x)), mu0, 0.05)
        assert_rel(self, s.statistic, expected["t_sum"], 1e-8)
        assert_rel(self, m.statistic, expected["t_max"], 1e-8)

    def test_two_sample_random(self):
        rng = np.random.default_rng(23)
        x1 = rng.uniform(0.1, 3.0, size=(9, 11))
        x2 = rng.uniform(0.1, 3.0, size=(6, 11))
        expected = oracle.two_sample(oracle.clr_rows(x1.tolist()), oracle.clr_rows(x2.tolist()))
        s, m, _ = all_tests_two(clr_transform(close(x1)), clr_transform(close(x2)), 0.05)
        assert_rel(self, s.statistic, expected["t_sum"], 1e-8)
        assert_rel(self, m.statistic, expected["t_max"], 1e-8)

    def test_unbiased_variant(self):
        rows = [list(map(float, r)) for r in F1]
        expected = oracle.one_sample(rows, unbiased=True)
        s = sum_test_one(ClrMatrix(F1), None, 0.05, unbiased=True)
        assert_rel(self, s.statistic, expected["t_sum"], 1e-12)


class TestInvariance(TestCase):
    """
    Statistics see CLR data only: per-row basis rescaling, a common
    log-basis shift and a column permutation change nothing.
    """

    def statistics(self, w1, w2):
        one = all_tests_one(clr_transform(close(np.exp(w1))), None, 0.05)
        two = all_tests_two(clr_transform(close(np.exp(w1))), clr_transform(close(np.exp(w2))), 0.05)
        return [o.statistic for o in one + two]

    def test_randomized_trials(self):
        rng = np.random.default_rng(1234)
        for _ in range(100):
            n = int(rng.integers(6, 20))
            p = int(rng.integers(3, n - 1))
            w1 = rng.normal(size=(n, p))
            w2 = rng.normal(0.3, 1.0, size=(n + 2, p))
            base = self.statistics(w1, w2)

            scaled = self.statistics(w1 + np.log(rng.uniform(0.1, 10.0, size=(n, 1))), w2)
            shift = rng.normal()
            shifted = self.statistics(w1 + shift, w2 + shift)
            perm = rng.permutation(p)
            permuted = self.statistics(w1[:, perm], w2[:, perm])

            for variant in (scaled, shifted, permuted):
                for a, b in zip(variant, base):
                    assert_rel(self, a, b, 1e-10)


class TestCombo(TestCase):
    def test_min_of_pvalues(self):
        s = outcome(Family.SumOne, 0.5, 0.3, 1.64)
        m = outcome(Family.MaxOne, 1.0, 0.2, 4.8)
        c = combine(s, m, 0.05)
        self.assertEqual(c.statistic, 0.2)
        self.assertFalse(c.reject)
        self.assertAlmostEqual(c.pvalue, 1 - 0.8**2)

    def test_threshold_edges(self):
        eps = 1e-6
        threshold = nulldist.combo_threshold(0.05)
        below = combine(outcome(Family.SumTwo, 0, threshold - eps, 0), outcome(Family.MaxTwo, 0, 0.9, 0), 0.05)
        above = combine(outcome(Family.SumTwo, 0, threshold + eps, 0), outcome(Family.MaxTwo, 0, 0.9, 0), 0.05)
        self.assertTrue(below.reject)
        self.assertFalse(above.reject)
        self.assertEqual(below.family, Family.ComboTwo)

    def test_small_sum_pvalue_rejects(self):
        c = combine(outcome(Family.SumTwo, 3.0, 0.01, 1.64), outcome(Family.MaxTwo, 0.0, 0.5, 4.8), 0.05)
        self.assertEqual(c.statistic, 0.01)
        self.assertTrue(c.reject)


class TestErrors(TestCase):
    def test_non_centered_mu0(self):
        with self.assertRaises(NonCenteredMu0):
            sum_test_one(ClrMatrix(F1), [1.0, 0.0, 0.0], 0.05)

    def test_mu0_length(self):
        with self.assertRaises(DimensionMismatch):
            sum_test_one(ClrMatrix(F1), [1.0, -1.0], 0.05)

    def test_alpha_domain(self):
        with self.assertRaises(DomainError):
            all_tests_one(ClrMatrix(F1), None, 1.0)

    def test_negative_variance_estimate(self):
        moments = MomentSummary(
            mean=np.array([1.0, 0.0, -1.0]),
            var_diag=np.ones(3),
            corr_trace_sq=2.0,
            n_effective=5,
        )
        with self.assertRaises(NegativeVarianceEstimate) as ctx:
            sum_statistic(moments)
        self.assertEqual(ctx.exception.exit_code, 3)


class TestTheoreticalPower(TestCase):
    def test_constant_shift_gives_alpha(self):
        sigma = ar_covariance(20)
        for c in (0.0, 1.7, -3.0):
            self.assertAlmostEqual(theoretical_power_sum(sigma, np.full(20, c), 100, 0.05), 0.05, places=12)

    def test_monotone_in_n(self):
        sigma = ar_covariance(30)
        mu = np.zeros(30)
        mu[:3] = 0.2
        powers = [theoretical_power_sum(sigma, mu, n, 0.05) for n in (10, 50, 100, 400)]
        self.assertEqual(powers, sorted(powers))
        self.assertGreater(powers[-1], powers[0])

    def test_two_sample_uses_effective_n(self):
        sigma = ar_covariance(10)
        mu1 = np.linspace(0, 0.5, 10)
        mu2 = np.zeros(10)
        self.assertEqual(effective_n(100, 100), 50)
        self.assertEqual(
            theoretical_power_sum_two(sigma, mu1, mu2, 100, 100, 0.05),
            theoretical_power_sum(sigma, mu1 - mu2, 50, 0.05),
        )

    def test_bad_sigma(self):
        with self.assertRaises(NonSymmetric):
            theoretical_power_sum(np.array([[1.0, 0.5], [0.0, 1.0]]), [0.0, 0.0], 10, 0.05)
        with self.assertRaises(NonPositiveDiagonal):
            # constant covariance vanishes under centering
            theoretical_power_sum(np.ones((3, 3)), [0.0, 0.0, 0.0], 10, 0.05)

    def test_non_positive_n_eff(self):
        sigma = ar_covariance(5)
        for n_eff in (0, -10, float("nan")):
            with self.assertRaises(DomainError):
                theoretical_power_sum(sigma, np.ones(5), n_eff, 0.05)
        with self.assertRaises(ValueError):
            theoretical_power_sum(sigma, np.ones(5), 0, 0.05)


class TestMomentsReuse(TestCase):
    def test_sum_uses_moments(self):
        moments = one_sample_moments(ClrMatrix(F1))
        self.assertAlmostEqual(moments.corr_trace_sq - 9 / 4, 5.15, places=12)
