"""Normal approximation of CPB, p-values, significant intervals and random baselines."""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .scoring import CpsTable, cpb
from .seqcore import as_distribution, as_protein, check_consistent, random_synonymous_encoding

DEFAULT_BASELINE_SAMPLES = 100


class DegenerateDistributionError(ValueError):
    """Zero variance: the CPB distribution is a point mass."""


@dataclass(frozen=True)
class CpbDistribution:
    mean: float
    variance: float
    source: str = ""

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


# values computed from the published human CPS table
HUMAN = CpbDistribution(0.075, 0.132, "human ORFeome (published)")


@dataclass(frozen=True)
class Baseline:
    mean: float
    std: float
    samples: int
    values: tuple[float, ...]

    def rank(self, value: float) -> int:
        """How many sampled designs score strictly below ``value``."""
        return sum(v < value for v in self.values)


@dataclass(frozen=True)
class SignificanceReport:
    cpb: float
    n_pairs: int
    p_value: float
    z_score: float
    interval_95: tuple[float, float]
    baseline_mean: float | None = None
    baseline_std: float | None = None
    baseline_samples: int | None = None
    baseline_rank: int | None = None


def distribution_from_table(table: CpsTable) -> CpbDistribution:
    """Observed-count weighted mean and variance of the table's scores."""
    if not table.has_counts:
        raise ValueError("table carries no observed counts")
    items = [(table.scores[p], w) for p, w in table.observed.items() if w > 0]
    total = math.fsum(w for _, w in items)
    if not total:
        raise ValueError("all observed counts are zero")
    mean = math.fsum(s * w for s, w in items) / total
    var = math.fsum((s - mean) ** 2 * w for s, w in items) / total
    return CpbDistribution(mean, var, table.source)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _sigma(n_pairs: int, dist: CpbDistribution) -> float:
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    return math.sqrt(dist.variance / n_pairs)


def pvalue(c: float, n_pairs: int, dist: CpbDistribution) -> float:
    """Two-tailed probability of a CPB at least as far from the mean as ``c``."""
    sigma = _sigma(n_pairs, dist)
    if sigma == 0:
        raise DegenerateDistributionError("variance is zero")
    # 2 * Phi(-|c - mean| / sigma), written so c and its mirror image share one code path
    return min(1.0, math.erfc(abs(c - dist.mean) / (sigma * math.sqrt(2.0))))


def z_score(c: float, n_pairs: int, dist: CpbDistribution) -> float:
    sigma = _sigma(n_pairs, dist)
    if sigma == 0:
        raise DegenerateDistributionError("variance is zero")
    return (c - dist.mean) / sigma


def significant_interval(n_pairs: int, alpha: float = 0.05,
                         dist: CpbDistribution = HUMAN) -> tuple[float, float]:
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    half = NormalDist().inv_cdf(1 - alpha / 2) * _sigma(n_pairs, dist)
    return dist.mean - half, dist.mean + half


def baseline_sample(protein, dist, table: CpsTable, samples: int = DEFAULT_BASELINE_SAMPLES,
                    seed: int = 0) -> Baseline:
    """CPB of ``samples`` random encodings sharing the codon distribution ``dist``.

    Sample ``k`` draws from its own stream derived from ``(seed, k)``, so
    results do not depend on evaluation order.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    protein, dist = as_protein(protein), as_distribution(dist)
    check_consistent(protein, dist)
    streams = np.random.SeedSequence(seed).spawn(samples)
    values = []
    for ss in streams:
        rng = random.Random(int(ss.generate_state(1, np.uint64)[0]))
        values.append(cpb(random_synonymous_encoding(protein, dist, rng), table))
    return Baseline(statistics.mean(values), statistics.stdev(values), samples, tuple(values))


def significance(c: float, n_pairs: int, dist: CpbDistribution,
                 baseline: Baseline | None = None) -> SignificanceReport:
    extra = {}
    if baseline is not None:
        extra = dict(baseline_mean=baseline.mean, baseline_std=baseline.std,
                     baseline_samples=baseline.samples, baseline_rank=baseline.rank(c))
    return SignificanceReport(c, n_pairs, pvalue(c, n_pairs, dist), z_score(c, n_pairs, dist),
                              significant_interval(n_pairs, 0.05, dist), **extra)
