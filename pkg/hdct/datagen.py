"""
Data-generating processes for the simulation study.

Log bases follow the product structure log W_i = mu + Sigma^(1/2) U_i
where the entries of U_i are i.i.d. from one of three innovation laws
(A1-A3) and Sigma is one of three covariance designs (B1-B3) or an
explicit matrix. Compositions are the closures of exp(log W_i).

"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from hdct import rng as rngs
from hdct.conf import settings
from hdct.core import CompositionMatrix, LogBasisMatrix, close
from hdct.errors import DomainError, NonSymmetric, NotPSD, ShapeError, SingularSystem


class Distribution(enum.Enum):
    A1_Normal = "A1"
    A2_ScaledT3 = "A2"
    A3_MixtureNormal = "A3"


class Covariance(enum.Enum):
    B1_AR = "B1"
    B2_SpikedCorrelation = "B2"
    B3_SpatialFactor = "B3"
    Explicit = "explicit"


def _lookup(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    for member in enum_cls:
        if str(value).upper() in (member.value.upper(), member.name.upper()):
            return member
    valid = ", ".join(m.value for m in enum_cls)
    raise DomainError(f"unknown {enum_cls.__name__.lower()} {value!r}; valid: {valid}", module="datagen")


@dataclass(frozen=True)
class DistributionSpec:
    kind: Distribution = Distribution.A1_Normal

    def __post_init__(self):
        object.__setattr__(self, "kind", _lookup(Distribution, self.kind))

    @property
    def label(self):
        return self.kind.value


@dataclass(frozen=True)
class CovarianceSpec:
    """
    Recipe for a p x p log-basis covariance.

    B2 and B3 draw their random parameters once from `build_seed`.
    `matrix` is only used by the Explicit kind.
    """

    kind: Covariance = Covariance.B1_AR
    p: int = 2
    build_seed: int | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    rho_eps: float = settings.B3_RHO_EPS
    delta_gamma: float = settings.B3_DELTA_GAMMA

    def __post_init__(self):
        kind = _lookup(Covariance, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Covariance.Explicit:
            if self.matrix is None:
                raise DomainError("explicit covariance needs a matrix", module="datagen")
            matrix = np.array(self.matrix, dtype=np.float64)
            _check_symmetric(matrix)
            if np.any(np.diag(matrix) <= 0):
                raise DomainError("explicit covariance needs a positive diagonal", module="datagen")
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)
            object.__setattr__(self, "p", matrix.shape[0])
        if self.p < 2:
            raise DomainError(f"p must be >= 2, got {self.p}", module="datagen")

    @property
    def label(self):
        return self.kind.value


@dataclass(frozen=True)
class SignalSpec:
    """
    m leading coordinates share `energy` equally: each equals sqrt(energy / m).
    """

    m: int
    energy: float = settings.DEFAULT_ENERGY

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}", module="datagen")
        if not self.energy > 0:
            raise DomainError(f"energy must be > 0, got {self.energy}", module="datagen")


# -------------------------------------------------------------
# Covariances
# -------------------------------------------------------------


def _check_symmetric(matrix):
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSymmetric(f"matrix must be square, got shape {matrix.shape}")
    scale = max(float(np.max(np.abs(matrix))), 1.0)
    if np.max(np.abs(matrix - matrix.T)) > settings.SYMMETRY_TOL * scale:
        raise NonSymmetric("matrix is not symmetric")


def spike_count(p, exponent):
    """
    Integer part of p ** exponent. The small epsilon keeps exact powers
    (say 1000 ** (1/3)) from rounding down.
    """
    return int(math.floor(p**exponent + 1e-9))


def rook_matrix(p):
    """
    Rook-form weights: interior rows put 0.5 on both neighbours, the two
    boundary rows put 1 on their single neighbour.
    """
    w = np.zeros((p, p))
    idx = np.arange(1, p - 1)
    w[idx, idx - 1] = 0.5
    w[idx, idx + 1] = 0.5
    w[0, 1] = 1.0
    w[p - 1, p - 2] = 1.0
    return w


def ar_covariance(p, rho=settings.B1_RHO):
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :]).astype(np.float64)


def spiked_covariance(p, gen):
    """
    D^(1/2) (I + b b' - diag(b^2)) D^(1/2) with variances ~ U(1, 2) and
    the first [p^0.3] loadings ~ U(0.7, 0.9).
    """
    variances = gen.uniform(*settings.B2_VAR_RANGE, size=p)
    b = np.zeros(p)
    k = spike_count(p, settings.B2_SPIKE_EXPONENT)
    b[:k] = gen.uniform(*settings.B2_LOADING_RANGE, size=k)
    corr = np.eye(p) + np.outer(b, b) - np.diag(b * b)
    sd = np.sqrt(variances)
    return sd[:, None] * corr * sd[None, :]


def spatial_factor_covariance(p, gen, rho_eps=settings.B3_RHO_EPS, delta_gamma=settings.B3_DELTA_GAMMA):
    """
    gamma gamma' + (I - rho W)^-1 (I - rho W')^-1 with a rook-form W.
    """
    gamma = np.zeros(p)
    k = spike_count(p, delta_gamma)
    gamma[:k] = gen.uniform(*settings.B3_LOADING_RANGE, size=k)
    system = np.eye(p) - rho_eps * rook_matrix(p)
    try:
        lu = scipy.linalg.lu_factor(system, check_finite=True)
        inv = scipy.linalg.lu_solve(lu, np.eye(p))
    except (np.linalg.LinAlgError, ValueError) as err:
        raise SingularSystem(f"I - rho W is singular ({err})")
    if not np.all(np.isfinite(inv)):
        raise SingularSystem("I - rho W is singular")
    sigma = np.outer(gamma, gamma) + inv @ inv.T
    # inv @ inv.T is symmetric in exact arithmetic only
    return 0.5 * (sigma + sigma.T)


def build_covariance(spec: CovarianceSpec, gen=None):
    """
    Assemble the covariance a CovarianceSpec describes.

    Args:
        spec (CovarianceSpec): The recipe.
        gen (numpy.random.Generator, optional): Parameter stream for B2/B3;
            defaults to a stream derived from spec.build_seed.

    Returns:
        numpy.ndarray: p x p symmetric matrix.

    """
    kind, p = spec.kind, spec.p
    if kind is Covariance.Explicit:
        return np.array(spec.matrix)
    if kind is Covariance.B1_AR:
        return ar_covariance(p)
    if gen is None:
        if spec.build_seed is None:
            raise DomainError(f"{kind.value} needs a build_seed", module="datagen")
        gen = rngs.stream(spec.build_seed)
    if kind is Covariance.B2_SpikedCorrelation:
        return spiked_covariance(p, gen)
    return spatial_factor_covariance(p, gen, spec.rho_eps, spec.delta_gamma)


def matrix_sqrt_sym(sigma):
    """
    Symmetric PSD square root by eigendecomposition. Slightly negative
    eigenvalues (rounding) are clamped to zero.

    Raises:
        NonSymmetric, NotPSD

    """
    sigma = np.asarray(sigma, dtype=np.float64)
    _check_symmetric(sigma)
    vals, vecs = np.linalg.eigh(sigma)
    norm = float(np.max(np.abs(vals))) if vals.size else 0.0
    if vals.size and vals.min() < -settings.PSD_TOL * norm:
        raise NotPSD(f"smallest eigenvalue {vals.min()!r} is negative")
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return 0.5 * (root + root.T)


# -------------------------------------------------------------
# Sampling
# -------------------------------------------------------------


def sample_innovations(dist: DistributionSpec, n, p, gen):
    """
    n x p i.i.d. innovations.

    A1: N(0, 1).  A2: t(3) / sqrt(3), a normal over sqrt(chi2_3 / 3),
    variance 1.  A3: 0.1 N(0, 9) + 0.9 N(0, 1), variance 1.8 (left
    unstandardized).
    """
    kind = dist.kind
    if kind is Distribution.A1_Normal:
        return gen.standard_normal((n, p))
    if kind is Distribution.A2_ScaledT3:
        z = gen.standard_normal((n, p))
        chi = gen.chisquare(3.0, size=(n, p))
        return z / np.sqrt(chi / 3.0) / math.sqrt(3.0)
    wide = gen.random((n, p)) < settings.A3_WEIGHT
    z = gen.standard_normal((n, p))
    return np.where(wide, math.sqrt(settings.A3_WIDE_VAR) * z, z)


def generate_log_basis(mu, sigma_sqrt, dist: DistributionSpec, n, gen) -> LogBasisMatrix:
    """
    n rows of mu + sigma_sqrt @ U_i.
    """
    mu = np.asarray(mu, dtype=np.float64).ravel()
    sigma_sqrt = np.asarray(sigma_sqrt, dtype=np.float64)
    p = mu.shape[0]
    if sigma_sqrt.shape != (p, p):
        raise ShapeError(
            f"sigma_sqrt has shape {sigma_sqrt.shape}, expected ({p}, {p})",
            module="datagen",
        )
    u = sample_innovations(dist, n, p, gen)
    return LogBasisMatrix(u @ sigma_sqrt.T + mu)


def to_composition(w: LogBasisMatrix) -> CompositionMatrix:
    """
    Close exp(log W) row by row. Each row's max is subtracted first so
    exp never overflows; closure does not see the shift. Entries more
    than ~745 below their row max would underflow to zero and are floored
    at the smallest normal float instead.
    """
    values = w.values
    bases = np.exp(values - values.max(axis=1, keepdims=True))
    return close(np.maximum(bases, np.finfo(np.float64).tiny))


def signal_vector(spec: SignalSpec, p):
    if spec.m > p:
        raise DomainError(f"m = {spec.m} exceeds p = {p}", module="datagen")
    mu = np.zeros(p)
    mu[: spec.m] = math.sqrt(spec.energy / spec.m)
    return mu
