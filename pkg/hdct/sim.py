"""
Monte-Carlo experiment engine.

An experiment is a pure function of its ExperimentConfig: every
replication draws from its own stream keyed by (seed, replication, group)
and results are merged by replication index, so the report does not
depend on how many workers ran it.

Three kinds of experiment:

    size          - rejection rates under H0 for sum, max and combo.
    power         - rejection rates along a grid of sparsity levels m.
    null-check    - calibration of the null laws: KS distance of the sum
                    statistic to N(0, 1), exceedance of the Gumbel
                    quantile, chi-square fit of the combo statistic to
                    the density 2(1 - w), and the sum/max correlation.

"""

import enum
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.stats

from hdct import nulldist
from hdct import rng as rngs
from hdct.clr import clr_transform
from hdct.conf import settings
from hdct.data import STATISTICS
from hdct.datagen import (
    CovarianceSpec,
    DistributionSpec,
    SignalSpec,
    build_covariance,
    generate_log_basis,
    matrix_sqrt_sym,
    signal_vector,
    to_composition,
)
from hdct.errors import ConfigError, HdctError, ReplicationError
from hdct.estimators import one_sample_moments, two_sample_moments
from hdct.stattests import all_tests_from_moments
from hdct.utils import logger


class Mode(enum.Enum):
    SizeOne = "size-one"
    SizeTwo = "size-two"
    PowerOne = "power-one"
    PowerTwo = "power-two"
    NullDiagnostics = "null-check"

    @property
    def is_size(self):
        return self in (Mode.SizeOne, Mode.SizeTwo)

    @property
    def is_power(self):
        return self in (Mode.PowerOne, Mode.PowerTwo)


def resolve_threads(threads=None):
    """
    Worker count from an explicit value, HDCT_THREADS, or the settings
    default. "auto" means one worker per CPU.
    """
    if threads is None:
        threads = os.environ.get("HDCT_THREADS", settings.THREADS)
    if isinstance(threads, str):
        if threads.strip().lower() == "auto":
            return os.cpu_count() or 1
        try:
            threads = int(threads)
        except ValueError:
            raise ConfigError(f"threads must be an integer or 'auto', got {threads!r}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return threads


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything that determines an experiment's report.

    Give `n` for one-sample modes and `n1`, `n2` for two-sample ones;
    NullDiagnostics runs the two-sample statistics when n1/n2 are set.
    `threads` only affects speed, never results.
    """

    mode: Mode
    dist: DistributionSpec
    cov: CovarianceSpec
    alpha: float = settings.DEFAULT_ALPHA
    reps: int = 1000
    master_seed: int = 0
    n: int | None = None
    n1: int | None = None
    n2: int | None = None
    m_grid: tuple = ()
    energy: float = settings.DEFAULT_ENERGY
    threads: int | str | None = None
    redraw_cov_per_rep: bool = False
    unbiased_cov: bool = False

    @property
    def p(self):
        return self.cov.p

    @property
    def two_sample(self):
        if self.mode is Mode.NullDiagnostics:
            return self.n1 is not None
        return self.mode in (Mode.SizeTwo, Mode.PowerTwo)

    @property
    def n_label(self):
        if self.two_sample:
            return f"{self.n1}+{self.n2}"
        return str(self.n)

    def validate(self):
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.master_seed is None or self.master_seed < 0:
            raise ConfigError("a non-negative seed is required")
        if self.two_sample:
            if self.n1 is None or self.n2 is None:
                raise ConfigError(f"{self.mode.value} needs n1 and n2")
            if min(self.n1, self.n2) < settings.MIN_GROUP_SAMPLES or self.n1 + self.n2 < settings.MIN_SAMPLES:
                raise ConfigError(f"sample sizes too small: n1={self.n1}, n2={self.n2}")
        else:
            if self.n is None:
                raise ConfigError(f"{self.mode.value} needs n")
            if self.n < settings.MIN_SAMPLES:
                raise ConfigError(f"n must be >= {settings.MIN_SAMPLES}, got {self.n}")
        if self.mode.is_power:
            if not self.m_grid:
                raise ConfigError("power experiments need a non-empty m grid")
            bad = [m for m in self.m_grid if not 1 <= m <= self.p]
            if bad:
                raise ConfigError(f"m values outside 1..p={self.p}: {bad}")
            if self.energy < 0:
                raise ConfigError(f"energy must be >= 0, got {self.energy}")
        resolve_threads(self.threads)
        return self

    @property
    def build_seed(self):
        return self.cov.build_seed if self.cov.build_seed is not None else self.master_seed


@dataclass
class ExperimentReport:
    """
    Rejection rates (size), an (statistic, m) power matrix (power) or a
    diagnostics block (null-check), with binomial standard errors.
    """

    config: ExperimentConfig
    rates: dict = field(default_factory=dict)
    power: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict, repr=False)
    wall_clock: float = 0.0

    def se(self, rate):
        return math.sqrt(rate * (1.0 - rate) / self.config.reps)

    def _provenance(self):
        cfg = self.config
        return {
            "mode": cfg.mode.value,
            "energy": cfg.energy,
            "build_seed": cfg.build_seed,
            "redraw_cov_per_rep": cfg.redraw_cov_per_rep,
            "unbiased_cov": cfg.unbiased_cov,
        }

    def rows(self, combo_bound=False):
        """
        Flat records for the CSV report. Threads and wall-clock time are
        left out so a report depends on its config alone.
        """
        cfg = self.config
        common = {"dist": cfg.dist.label, "cov": cfg.cov.label, "n": cfg.n_label, "p": cfg.p, "alpha": cfg.alpha, "reps": cfg.reps}
        tail = {"seed": cfg.master_seed, **self._provenance()}
        if cfg.mode is Mode.NullDiagnostics:
            return [
                {"diagnostic": name, "value": value, **common, **tail}
                for name, value in self.diagnostics.items()
            ]
        records = []
        if cfg.mode.is_size:
            for name, rate in self.rates.items():
                records.append({"statistic": name, **common, "rate": rate, "se": self.se(rate), **tail})
            return records
        names = STATISTICS + (("bound",) if combo_bound else ())
        for name in names:
            for m in cfg.m_grid:
                rate = self.bounds[m] if name == "bound" else self.power[(name, m)]
                records.append({"statistic": name, **common, "m": m, "rate": rate, "se": self.se(rate), **tail})
        return records


# -------------------------------------------------------------
# Replications
# -------------------------------------------------------------


class _Context:
    """
    Read-only state shared by every replication of one experiment.
    """

    def __init__(self, config):
        self.config = config
        self.cov_spec = replace(config.cov, build_seed=config.build_seed)
        if config.redraw_cov_per_rep:
            self.sigma_sqrt = None
        else:
            self.sigma_sqrt = matrix_sqrt_sym(build_covariance(self.cov_spec))
        p = config.p
        self.mu_grid = []
        for m in config.m_grid:
            if config.energy == 0:
                mu = np.zeros(p)
            else:
                mu = signal_vector(SignalSpec(m, config.energy), p)
            self.mu_grid.append(mu - mu.mean())

    def sigma_sqrt_for(self, rep):
        if self.sigma_sqrt is not None:
            return self.sigma_sqrt
        gen = rngs.stream(self.config.master_seed, rep, rngs.COVARIANCE)
        return matrix_sqrt_sym(build_covariance(self.cov_spec, gen))

    def clr_sample(self, rep, group, n, sigma_sqrt):
        gen = rngs.replication_stream(self.config.master_seed, rep, group)
        w = generate_log_basis(np.zeros(self.config.p), sigma_sqrt, self.config.dist, n, gen)
        return clr_transform(to_composition(w))

    def moments(self, rep):
        cfg = self.config
        sigma_sqrt = self.sigma_sqrt_for(rep)
        if cfg.two_sample:
            y1 = self.clr_sample(rep, rngs.GROUP_ONE, cfg.n1, sigma_sqrt)
            y2 = self.clr_sample(rep, rngs.GROUP_TWO, cfg.n2, sigma_sqrt)
            return two_sample_moments(y1, y2, unbiased=cfg.unbiased_cov)
        y = self.clr_sample(rep, rngs.GROUP_ONE, cfg.n, sigma_sqrt)
        return one_sample_moments(y, unbiased=cfg.unbiased_cov)


def _run_null(ctx, rep):
    cfg = ctx.config
    outcomes = all_tests_from_moments(ctx.moments(rep), cfg.alpha, two_sample=cfg.two_sample)
    return (
        np.array([o.reject for o in outcomes], dtype=bool),
        np.array([o.statistic for o in outcomes]),
    )


def _run_power(ctx, rep):
    """
    One replication over the whole m grid. The innovations are drawn once
    and only the mean moves with m; CLR is linear in the log basis, so the
    shift enters the mean (difference) as G mu and leaves the covariance
    estimates untouched.
    """
    cfg = ctx.config
    base = ctx.moments(rep)
    rejects = np.zeros((len(ctx.mu_grid), 3), dtype=bool)
    bound = np.zeros((len(ctx.mu_grid), 2), dtype=bool)
    for i, g_mu in enumerate(ctx.mu_grid):
        moments = replace(base, mean=base.mean + g_mu)
        outcomes = all_tests_from_moments(moments, cfg.alpha, two_sample=cfg.two_sample)
        rejects[i] = [o.reject for o in outcomes]
        half = all_tests_from_moments(moments, cfg.alpha / 2.0, two_sample=cfg.two_sample)
        bound[i] = [half[0].reject, half[1].reject]
    return rejects, bound


def _map_replications(config, work):
    ctx = _Context(config)
    threads = min(resolve_threads(config.threads), config.reps)

    def guarded(rep):
        try:
            return work(ctx, rep)
        except Exception as err:
            failure = ReplicationError(rep, rngs.stream_id(config.master_seed, rep), err)
            logger.log_err("%s", failure)
            raise failure from err

    if threads == 1:
        return [guarded(rep) for rep in range(config.reps)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        try:
            return list(pool.map(guarded, range(config.reps)))
        except ReplicationError:
            pool.shutdown(wait=False, cancel_futures=True)
            raise


def _start(config, expected):
    config.validate()
    if config.mode not in expected:
        raise ConfigError(
            f"mode {config.mode.value} is not one of {[m.value for m in expected]}"
        )
    logger.log_info(
        "simulate %s: dist=%s cov=%s n=%s p=%s reps=%s alpha=%s seed=%s",
        config.mode.value, config.dist.label, config.cov.label, config.n_label,
        config.p, config.reps, config.alpha, config.master_seed,
    )
    return time.perf_counter()


def _finish(report, started):
    report.wall_clock = time.perf_counter() - started
    logger.log_info("simulate %s: done in %.2fs", report.config.mode.value, report.wall_clock)
    return report


# -------------------------------------------------------------
# Experiments
# -------------------------------------------------------------


def run_size_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Empirical size of sum, max and combo under H0 (zero log-basis mean).
    All three statistics see the same dataset in each replication.
    """
    started = _start(config, (Mode.SizeOne, Mode.SizeTwo))
    results = _map_replications(config, _run_null)
    rejects = np.array([r[0] for r in results])
    report = ExperimentReport(config=config)
    for j, name in enumerate(STATISTICS):
        report.rates[name] = float(rejects[:, j].mean())
    report.samples["statistics"] = np.array([r[1] for r in results])
    return _finish(report, started)


def run_power_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Empirical power along config.m_grid. One-sample data get mean
    signal_vector(m); in two-sample runs group one is shifted by it.
    """
    started = _start(config, (Mode.PowerOne, Mode.PowerTwo))
    results = _map_replications(config, _run_power)
    rejects = np.array([r[0] for r in results])
    bound = np.array([r[1] for r in results])
    report = ExperimentReport(config=config)
    for i, m in enumerate(config.m_grid):
        for j, name in enumerate(STATISTICS):
            report.power[(name, m)] = float(rejects[:, i, j].mean())
        report.bounds[m] = float(max(bound[:, i, 0].mean(), bound[:, i, 1].mean()))
    return _finish(report, started)


def combo_gof_pvalue(combo, bins=10):
    """
    Chi-square goodness of fit of min-p-values to the density 2(1 - w)
    on equal-width bins of [0, 1].
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    observed, _ = np.histogram(np.clip(combo, 0.0, 1.0), bins=edges)
    cdf = 1.0 - (1.0 - edges) ** 2
    expected = len(combo) * np.diff(cdf)
    return float(scipy.stats.chisquare(observed, expected).pvalue)


def run_null_diagnostics(config: ExperimentConfig) -> ExperimentReport:
    """
    Null-law calibration from the statistics of many null replications.
    Reports raw distances and rates; pass/fail thresholds belong to the
    caller.
    """
    started = _start(config, (Mode.NullDiagnostics,))
    if config.reps < 2000:
        logger.log_warn("null-check with %d replications; 2000 or more recommended", config.reps)
    results = _map_replications(config, _run_null)
    rejects = np.array([r[0] for r in results])
    stats = np.array([r[1] for r in results])
    sums, maxes, combos = stats[:, 0], stats[:, 1], stats[:, 2]

    report = ExperimentReport(config=config)
    diag = report.diagnostics
    diag["ks_distance"] = float(scipy.stats.kstest(sums, "norm").statistic)
    diag["ks_critical"] = 1.36 / math.sqrt(config.reps)
    q_alpha = nulldist.gumbel_quantile(config.alpha)
    diag["gumbel_exceedance"] = float(np.mean(maxes >= q_alpha))
    diag["combo_gof_pvalue"] = combo_gof_pvalue(combos)
    diag["combo_rate"] = float(rejects[:, 2].mean())
    diag["sum_rate"] = float(rejects[:, 0].mean())
    diag["max_rate"] = float(rejects[:, 1].mean())
    if np.std(sums) > 0 and np.std(maxes) > 0:
        diag["sum_max_corr"] = float(np.corrcoef(sums, maxes)[0, 1])
    else:
        diag["sum_max_corr"] = float("nan")
    report.samples["statistics"] = stats
    return _finish(report, started)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    if config.mode.is_size:
        return run_size_experiment(config)
    if config.mode.is_power:
        return run_power_experiment(config)
    return run_null_diagnostics(config)


def make_config(mode, dist, cov, p, build_seed=None, **kwargs):
    """
    Convenience constructor taking labels: make_config("size-one", "A1", "B1", 200, n=200, ...).
    """
    if not isinstance(mode, Mode):
        try:
            mode = Mode(mode)
        except ValueError:
            raise ConfigError(f"unknown mode {mode!r}")
    if "m_grid" in kwargs:
        kwargs["m_grid"] = tuple(int(m) for m in kwargs["m_grid"])
    try:
        dist_spec = dist if isinstance(dist, DistributionSpec) else DistributionSpec(dist)
        cov_spec = cov if isinstance(cov, CovarianceSpec) else CovarianceSpec(cov, p, build_seed)
    except HdctError as err:
        raise ConfigError(str(err)) from err
    return ExperimentConfig(mode=mode, dist=dist_spec, cov=cov_spec, **kwargs)
