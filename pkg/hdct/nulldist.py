"""
Null distributions: standard normal, the Gumbel limit of the max
statistic, and the law of the min of two independent p-values.

The Gumbel law here has cdf F(x) = exp(-exp(-x / 2) / sqrt(pi)); it is
the limit of the max statistic after subtracting 2 log p - log log p.

"""

import math

from hdct.errors import DomainError

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
# largest argument math.exp accepts without overflow
_EXP_MAX = 709.0


def _check_probability(q, name="q"):
    if not (0.0 < q < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {q!r}")


def std_normal_cdf(x):
    """
    Phi(x) via the complementary error function; accurate in both tails.
    """
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_pdf(x):
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def std_normal_sf(x):
    """
    1 - Phi(x) without cancellation for large x.
    """
    return 0.5 * math.erfc(x / _SQRT2)


def std_normal_quantile(q):
    """
    Inverse of std_normal_cdf by a safeguarded Newton iteration.

    Newton steps are taken while they stay inside the current bracket;
    otherwise the bracket is bisected.

    Raises:
        DomainError: q outside (0, 1).

    """
    _check_probability(q)
    if q == 0.5:
        return 0.0
    lo, hi = -40.0, 40.0
    x = 0.0
    for _ in range(200):
        f = std_normal_cdf(x) - q
        if f == 0.0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        dens = std_normal_pdf(x)
        step = f / dens if dens > 0 else math.inf
        candidate = x - step
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        if abs(candidate - x) <= 1e-15 * max(1.0, abs(x)):
            return candidate
        x = candidate
    return x


def gumbel_cdf(x):
    if -x / 2.0 > _EXP_MAX:
        return 0.0
    return math.exp(-math.exp(-x / 2.0) / _SQRT_PI)


def gumbel_quantile(alpha):
    """
    Upper alpha point q_alpha = -log(pi) - 2 log log (1 - alpha)^-1,
    i.e. gumbel_cdf(q_alpha) = 1 - alpha.
    """
    _check_probability(alpha, "alpha")
    return -math.log(math.pi) - 2.0 * math.log(-math.log1p(-alpha))


def gumbel_pvalue(x):
    """
    1 - gumbel_cdf(x), through expm1 so large statistics keep their
    (tiny) p-values.
    """
    if -x / 2.0 > _EXP_MAX:
        return 1.0
    return -math.expm1(-math.exp(-x / 2.0) / _SQRT_PI)


def combo_threshold(alpha):
    """
    Rejection boundary 1 - sqrt(1 - alpha) for the min of two
    independent uniform p-values.
    """
    _check_probability(alpha, "alpha")
    return 1.0 - math.sqrt(1.0 - alpha)


def combo_pvalue(w):
    """
    P(min(U1, U2) <= w) = 1 - (1 - w)^2 for independent uniforms.
    """
    w = min(max(w, 0.0), 1.0)
    return 1.0 - (1.0 - w) ** 2


def combo_density(w):
    """
    Null density 2(1 - w) on [0, 1].
    """
    return 2.0 * (1.0 - w) if 0.0 <= w <= 1.0 else 0.0
