"""
Sample moments used by the test statistics.

Only the diagonal of the sample covariance and the trace of the squared
sample correlation are ever needed, so the full p x p covariance is built
only on the naive trace path and never returned.

"""

from dataclasses import dataclass

import numpy as np

from hdct.conf import settings
from hdct.core import ClrMatrix
from hdct.errors import DegenerateVariance, DimensionMismatch, TooFewSamples


@dataclass(frozen=True)
class MomentSummary:
    """
    Moments entering the sum and max statistics.

    mean is the sample mean (one-sample) or the difference of group means;
    var_diag the covariance diagonal; corr_trace_sq = tr(R^2) of the sample
    correlation; n_effective is n or N = n1 + n2; cpn the two-sample
    correction 1 + tr(R^2) / p^(3/2) (1 for one-sample).
    """

    mean: np.ndarray
    var_diag: np.ndarray
    corr_trace_sq: float
    n_effective: int
    cpn: float = 1.0
    n1: int = 0
    n2: int = 0

    @property
    def p(self):
        return self.mean.shape[0]


def _check_variances(var_diag):
    bad = var_diag <= settings.DEGENERATE_VARIANCE_TOL
    if bad.any():
        col = int(np.argmax(bad))
        raise DegenerateVariance(col, float(var_diag[col]))


def corr_trace_sq_gram(y_centered, var_diag, divisor):
    """
    tr(R^2) through the n x n Gram matrix of standardized deviations.

    sum_ij g_ij^2 / (g_ii g_jj) = sum_kl (y_k^T D^-1 y_l)^2 / divisor^2,
    which costs O(n^2 p) instead of O(n p^2).

    Args:
        y_centered (array-like): Deviation rows (observation minus its mean).
        var_diag (array-like): Covariance diagonal.
        divisor (int): Covariance divisor (n, N, or the unbiased variant).

    Returns:
        float

    """
    y_centered = np.atleast_2d(np.asarray(y_centered, dtype=np.float64))
    z = y_centered / np.sqrt(np.asarray(var_diag, dtype=np.float64))
    gram = z @ z.T
    return float(np.sum(gram * gram) / float(divisor) ** 2)


def corr_trace_sq_naive(y_centered, var_diag, divisor):
    """
    tr(R^2) from the full p x p covariance. O(n p^2).
    """
    y_centered = np.atleast_2d(np.asarray(y_centered, dtype=np.float64))
    cov = (y_centered.T @ y_centered) / float(divisor)
    var_diag = np.asarray(var_diag, dtype=np.float64)
    return float(np.sum(cov * cov / np.outer(var_diag, var_diag)))


def corr_trace_sq(y_centered, var_diag, divisor, path=None):
    path = path or settings.TRACE_PATH
    if path == "auto":
        n, p = np.shape(y_centered)
        path = "gram" if n < p else "naive"
    if path == "gram":
        return corr_trace_sq_gram(y_centered, var_diag, divisor)
    return corr_trace_sq_naive(y_centered, var_diag, divisor)


def one_sample_moments(y: ClrMatrix, unbiased=None, path=None) -> MomentSummary:
    """
    Mean, covariance diagonal and tr(R^2) of one CLR sample.

    Args:
        y (ClrMatrix): n x p CLR data, n >= 5.
        unbiased (bool, optional): Use divisor n - 1 instead of n.
            Defaults to settings.UNBIASED_COV.
        path (str, optional): "auto", "gram" or "naive" trace computation.

    Raises:
        TooFewSamples, DegenerateVariance

    """
    unbiased = settings.UNBIASED_COV if unbiased is None else unbiased
    values = y.values
    n = values.shape[0]
    if n < settings.MIN_SAMPLES:
        raise TooFewSamples(f"need n >= {settings.MIN_SAMPLES}, got {n}")

    mean = values.mean(axis=0)
    dev = values - mean
    divisor = n - 1 if unbiased else n
    var_diag = np.einsum("ij,ij->j", dev, dev) / divisor
    _check_variances(var_diag)
    trace = corr_trace_sq(dev, var_diag, divisor, path)
    return MomentSummary(
        mean=mean, var_diag=var_diag, corr_trace_sq=trace, n_effective=n
    )


def two_sample_moments(y1: ClrMatrix, y2: ClrMatrix, unbiased=None, path=None) -> MomentSummary:
    """
    Difference of means with the pooled covariance diagonal and tr(R^2).

    The pooled covariance divides the summed within-group scatter by
    n1 + n2 (n1 + n2 - 2 with `unbiased`).

    Raises:
        DimensionMismatch, TooFewSamples, DegenerateVariance

    """
    unbiased = settings.UNBIASED_COV if unbiased is None else unbiased
    a, b = y1.values, y2.values
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            f"samples have {a.shape[1]} and {b.shape[1]} components"
        )
    n1, n2 = a.shape[0], b.shape[0]
    total = n1 + n2
    if min(n1, n2) < settings.MIN_GROUP_SAMPLES:
        raise TooFewSamples(
            f"need n1, n2 >= {settings.MIN_GROUP_SAMPLES}, got {n1} and {n2}"
        )
    if total < settings.MIN_SAMPLES:
        raise TooFewSamples(f"need n1 + n2 >= {settings.MIN_SAMPLES}, got {total}")

    mean1 = a.mean(axis=0)
    mean2 = b.mean(axis=0)
    dev = np.vstack([a - mean1, b - mean2])
    divisor = total - 2 if unbiased else total
    var_diag = np.einsum("ij,ij->j", dev, dev) / divisor
    _check_variances(var_diag)
    trace = corr_trace_sq(dev, var_diag, divisor, path)
    p = a.shape[1]
    return MomentSummary(
        mean=mean1 - mean2,
        var_diag=var_diag,
        corr_trace_sq=trace,
        n_effective=total,
        cpn=1.0 + trace / p**1.5,
        n1=n1,
        n2=n2,
    )
