"""
Mean tests for compositional data

One- and two-sample tests on CLR data:

    sum    - studentized quadratic form, standard normal under H0;
             powerful against dense, weak mean shifts.
    max    - largest studentized squared mean coordinate, centered by
             2 log p - log log p, Gumbel under H0; powerful against
             sparse, strong shifts.
    combo  - min of the sum and max p-values; the two are asymptotically
             independent, so the min has null density 2(1 - w).

All tests return a TestOutcome. Hypotheses are on the log-basis mean up
to an additive constant, which is exactly what CLR data can see.

"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from hdct import nulldist
from hdct.conf import settings
from hdct.core import ClrMatrix
from hdct.errors import (
    DimensionMismatch,
    DomainError,
    NegativeVarianceEstimate,
    NonCenteredMu0,
    NonPositiveDiagonal,
    NonSymmetric,
)
from hdct.estimators import MomentSummary, one_sample_moments, two_sample_moments


class Family(enum.Enum):
    SumOne = "sum"
    MaxOne = "max"
    ComboOne = "com"
    SumTwo = "sum2"
    MaxTwo = "max2"
    ComboTwo = "com2"

    @property
    def is_combo(self):
        return self in (Family.ComboOne, Family.ComboTwo)

    @property
    def short(self):
        return self.value.rstrip("2")


@dataclass(frozen=True)
class TestOutcome:
    """
    Result of one test at level alpha.

    For combo families `statistic` is the min p-value itself and the test
    rejects when it falls below `threshold`; sum and max families reject
    when the statistic reaches `threshold`.
    """

    __test__ = False  # not a pytest class

    statistic: float
    pvalue: float
    threshold: float
    alpha: float
    reject: bool
    family: Family
    n_effective: int
    p: int


def _outcome(family, statistic, pvalue, threshold, alpha, moments):
    if family.is_combo:
        reject = statistic < threshold
    else:
        reject = statistic >= threshold
    return TestOutcome(
        statistic=float(statistic),
        pvalue=float(min(max(pvalue, 0.0), 1.0)),
        threshold=float(threshold),
        alpha=float(alpha),
        reject=bool(reject),
        family=family,
        n_effective=int(moments.n_effective),
        p=int(moments.p),
    )


def _check_alpha(alpha):
    nulldist._check_probability(alpha, "alpha")


def _centered_mean(moments, mu0_clr):
    if mu0_clr is None:
        return moments.mean
    mu0 = np.asarray(mu0_clr, dtype=np.float64).ravel()
    if mu0.shape[0] != moments.p:
        raise DimensionMismatch(
            f"mu0 has {mu0.shape[0]} entries, data has {moments.p} components",
            module="stattests",
        )
    if abs(mu0.sum()) > settings.MU0_CENTER_TOL:
        raise NonCenteredMu0(
            f"mu0 must be CLR-centered (sum to 0), sums to {mu0.sum()!r}"
        )
    return moments.mean - mu0


# -------------------------------------------------------------
# Statistics from moments
# -------------------------------------------------------------


def sum_statistic(moments: MomentSummary, diff=None, two_sample=False):
    """
    Studentized quadratic form.

    One-sample:
        [n d' D^-1 d - (n-1)p/(n-3)] / sqrt(2[tr(R^2) - p^2/(n-1)])
    Two-sample:
        [(n1 n2/N) d' D^-1 d - (N-2)p/(N-4)] / sqrt(2[tr(R^2) - p^2/(N-2)] c_pN)

    Raises:
        NegativeVarianceEstimate: the bracket under the root is not positive.

    """
    diff = moments.mean if diff is None else diff
    p = moments.p
    quad = float(np.sum(diff * diff / moments.var_diag))
    if two_sample:
        big_n = moments.n_effective
        scale = moments.n1 * moments.n2 / big_n
        center = (big_n - 2) * p / (big_n - 4)
        bracket = moments.corr_trace_sq - p * p / (big_n - 2)
        cpn = moments.cpn
    else:
        n = moments.n_effective
        scale = n
        center = (n - 1) * p / (n - 3)
        bracket = moments.corr_trace_sq - p * p / (n - 1)
        cpn = 1.0
    if bracket <= 0:
        raise NegativeVarianceEstimate(
            f"tr(R^2) - p^2/(n-1) = {bracket!r} <= 0; "
            f"sample size {moments.n_effective} is too small for p = {p}"
        )
    return (scale * quad - center) / math.sqrt(2.0 * bracket * cpn)


def max_statistic(moments: MomentSummary, diff=None, two_sample=False):
    """
    Max statistic centered by 2 log p - log log p.

    Returns:
        tuple: (centered, raw)

    """
    diff = moments.mean if diff is None else diff
    p = moments.p
    scale = moments.n1 * moments.n2 / moments.n_effective if two_sample else moments.n_effective
    raw = scale * float(np.max(diff * diff / moments.var_diag))
    return raw - 2.0 * math.log(p) + math.log(math.log(p)), raw


def _sum_outcome(moments, diff, alpha, two_sample):
    stat = sum_statistic(moments, diff, two_sample)
    family = Family.SumTwo if two_sample else Family.SumOne
    return _outcome(
        family,
        stat,
        nulldist.std_normal_sf(stat),
        nulldist.std_normal_quantile(1.0 - alpha),
        alpha,
        moments,
    )


def _max_outcome(moments, diff, alpha, two_sample):
    stat, _ = max_statistic(moments, diff, two_sample)
    family = Family.MaxTwo if two_sample else Family.MaxOne
    return _outcome(
        family,
        stat,
        nulldist.gumbel_pvalue(stat),
        nulldist.gumbel_quantile(alpha),
        alpha,
        moments,
    )


def combine(sum_outcome: TestOutcome, max_outcome: TestOutcome, alpha):
    """
    Combo outcome from already computed sum and max outcomes.
    """
    two_sample = sum_outcome.family is Family.SumTwo
    stat = min(sum_outcome.pvalue, max_outcome.pvalue)
    family = Family.ComboTwo if two_sample else Family.ComboOne
    threshold = nulldist.combo_threshold(alpha)
    return TestOutcome(
        statistic=float(stat),
        pvalue=nulldist.combo_pvalue(stat),
        threshold=threshold,
        alpha=float(alpha),
        reject=bool(stat < threshold),
        family=family,
        n_effective=sum_outcome.n_effective,
        p=sum_outcome.p,
    )


def all_tests_from_moments(moments, alpha, diff=None, two_sample=False):
    """
    (sum, max, combo) outcomes sharing one set of moments.
    """
    _check_alpha(alpha)
    s = _sum_outcome(moments, diff, alpha, two_sample)
    m = _max_outcome(moments, diff, alpha, two_sample)
    return s, m, combine(s, m, alpha)


# -------------------------------------------------------------
# One-sample tests
# -------------------------------------------------------------


def sum_test_one(y: ClrMatrix, mu0_clr, alpha, unbiased=None) -> TestOutcome:
    """
    Sum-type one-sample test of H0: E[Y] = G mu0.

    Args:
        y (ClrMatrix): CLR data, n >= 5.
        mu0_clr (array-like or None): G mu0, summing to zero; None or zeros
            for the standard H0.
        alpha (float): Level.

    """
    _check_alpha(alpha)
    moments = one_sample_moments(y, unbiased=unbiased)
    return _sum_outcome(moments, _centered_mean(moments, mu0_clr), alpha, False)


def max_test_one(y: ClrMatrix, mu0_clr, alpha, unbiased=None) -> TestOutcome:
    """
    Max-type one-sample test; the stored statistic is already centered.
    """
    _check_alpha(alpha)
    moments = one_sample_moments(y, unbiased=unbiased)
    return _max_outcome(moments, _centered_mean(moments, mu0_clr), alpha, False)


def combo_test_one(y: ClrMatrix, mu0_clr, alpha, unbiased=None) -> TestOutcome:
    return all_tests_one(y, mu0_clr, alpha, unbiased)[2]


def all_tests_one(y: ClrMatrix, mu0_clr, alpha, unbiased=None):
    """
    Run sum, max and combo on one sample with a single pass over the data.
    """
    _check_alpha(alpha)
    moments = one_sample_moments(y, unbiased=unbiased)
    return all_tests_from_moments(moments, alpha, _centered_mean(moments, mu0_clr))


# -------------------------------------------------------------
# Two-sample tests
# -------------------------------------------------------------


def sum_test_two(y1: ClrMatrix, y2: ClrMatrix, alpha, unbiased=None) -> TestOutcome:
    _check_alpha(alpha)
    moments = two_sample_moments(y1, y2, unbiased=unbiased)
    return _sum_outcome(moments, None, alpha, True)


def max_test_two(y1: ClrMatrix, y2: ClrMatrix, alpha, unbiased=None) -> TestOutcome:
    _check_alpha(alpha)
    moments = two_sample_moments(y1, y2, unbiased=unbiased)
    return _max_outcome(moments, None, alpha, True)


def combo_test_two(y1: ClrMatrix, y2: ClrMatrix, alpha, unbiased=None) -> TestOutcome:
    return all_tests_two(y1, y2, alpha, unbiased)[2]


def all_tests_two(y1: ClrMatrix, y2: ClrMatrix, alpha, unbiased=None):
    _check_alpha(alpha)
    moments = two_sample_moments(y1, y2, unbiased=unbiased)
    return all_tests_from_moments(moments, alpha, two_sample=True)


# -------------------------------------------------------------
# Theoretical power of the sum test
# -------------------------------------------------------------


def effective_n(n1, n2):
    return n1 * n2 / (n1 + n2)


def _centered_covariance(sigma):
    """
    G sigma G, built by centering rows and columns.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NonSymmetric(f"sigma must be square, got shape {sigma.shape}", module="stattests")
    scale = max(float(np.max(np.abs(sigma))), 1.0)
    if np.max(np.abs(sigma - sigma.T)) > settings.SYMMETRY_TOL * scale:
        raise NonSymmetric("sigma is not symmetric", module="stattests")
    gamma = sigma - sigma.mean(axis=0, keepdims=True)
    return gamma - gamma.mean(axis=1, keepdims=True)


def theoretical_power_sum(sigma, mu_w_diff, n_eff, alpha):
    """
    Asymptotic power of the sum test:

        Phi(-z_{1-alpha} + n_eff mu' G D^-1 G mu / sqrt(2 tr(R^2)))

    with Gamma = G sigma G, D = diag(Gamma) and R its correlation matrix.
    Use n_eff = n for one sample and n1 n2 / (n1 + n2) for two.

    Args:
        sigma (array-like): p x p log-basis covariance.
        mu_w_diff (array-like): Log-basis mean (minus mu0), or the
            difference of group means.
        n_eff (float): Effective sample size, > 0.
        alpha (float): Level.

    Raises:
        NonSymmetric, NonPositiveDiagonal
        DomainError: n_eff is not positive (also a ValueError).

    """
    _check_alpha(alpha)
    if not n_eff > 0:
        raise DomainError(f"n_eff must be positive, got {n_eff!r}", module="stattests")
    gamma = _centered_covariance(sigma)
    diag = np.diag(gamma).copy()
    if np.any(diag <= settings.DEGENERATE_VARIANCE_TOL):
        raise NonPositiveDiagonal("G sigma G has a non-positive diagonal entry")
    corr_sq = float(np.sum(gamma * gamma / np.outer(diag, diag)))
    mu = np.asarray(mu_w_diff, dtype=np.float64).ravel()
    g_mu = mu - mu.mean()
    signal = n_eff * float(np.sum(g_mu * g_mu / diag))
    z = nulldist.std_normal_quantile(1.0 - alpha)
    return nulldist.std_normal_cdf(-z + signal / math.sqrt(2.0 * corr_sq))


def theoretical_power_sum_two(sigma, mu1_w, mu2_w, n1, n2, alpha):
    diff = np.asarray(mu1_w, dtype=np.float64) - np.asarray(mu2_w, dtype=np.float64)
    return theoretical_power_sum(sigma, diff, effective_n(n1, n2), alpha)
