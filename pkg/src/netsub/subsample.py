"""Subsampling schemes, empirical distributions, and confidence intervals.

Given a graph statistic theta_hat, each replicate draws a subsample (a
uniform b-vertex induced subgraph, or an independent-inclusion p-sample
with isolated vertices removed), evaluates the statistic there, and
records sqrt(B) * (theta_hat_sub - theta_hat_full) with B the realized
subsample size.  The sorted values form the empirical sampling-
distribution approximation; quantiles of it invert into confidence
intervals for the population parameter.

When the statistic is normalized by an estimated density, every subsample
evaluation reuses the density estimated once on the full graph (the
estimate is frozen, not re-estimated per subsample).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import as_generator, spawn_generator
from .counts import normalized_count
from .graph import Graph, induced_subgraph
from .spectral import (CountStat, DegenerateStatisticError, EstimatedRho,
                       KnownRho, StatisticSpec, eigen_statistic, rho_hat)

MIN_REPLICATES = 50
MAX_DEGENERATE_FRACTION = 0.2


class SubsamplingError(RuntimeError):
    """Too many replicates were degenerate to form a usable distribution."""


@dataclass(frozen=True)
class VertexScheme:
    """Uniformly random induced subgraph on b vertices."""

    b: int

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("vertex subsample size must be at least 2")

    def label(self) -> str:
        return f"vertex:b={self.b}"


@dataclass(frozen=True)
class PSampleScheme:
    """Independent vertex inclusion with probability p, isolated removed."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("inclusion probability must lie in (0, 1)")

    def label(self) -> str:
        return f"psample:p={self.p:g}"


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Sorted subsampling draws plus realized-size bookkeeping.

    values holds sqrt(B_i) * (theta_sub_i - theta_full), sorted ascending.
    replicate_sizes are the subsample vertex counts actually used for the
    sqrt(B) scaling (post isolated-vertex deletion for p-sampling);
    pre_deletion_sizes are the binomial inclusion counts, kept for the
    size-concentration diagnostic.  Replicates with fewer than 2 surviving
    vertices record the statistic as zero and are tallied in
    degenerate_count.
    """

    values: np.ndarray
    replicate_sizes: np.ndarray
    pre_deletion_sizes: np.ndarray
    degenerate_count: int

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    statistic_value: float
    scheme: object
    replicates: int
    seed: int
    provenance: dict = field(default_factory=dict)

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def width(self) -> float:
        return self.upper - self.lower


# ---------------------------------------------------------------------------
# drawing subsamples


def vertex_subsample(graph: Graph, b: int, rng) -> Graph:
    """Induced subgraph on a uniformly random b-subset, relabeled 0..b-1."""
    if not 2 <= b <= graph.n:
        raise ValueError(f"subsample size {b} out of range for n={graph.n}")
    rng = as_generator(rng)
    chosen = rng.choice(graph.n, size=b, replace=False)
    return induced_subgraph(graph, chosen)


def p_subsample(graph: Graph, p: float, rng):
    """One p-sample: include vertices independently, drop isolated ones.

    Returns (subgraph, pre_deletion_size) where the second entry is the
    inclusion count before isolated-vertex removal (a Binomial(n, p) draw),
    used by the size-concentration diagnostic.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("inclusion probability must lie in (0, 1)")
    rng = as_generator(rng)
    included = np.nonzero(rng.random(graph.n) < p)[0]
    pre_size = int(included.size)
    sub = induced_subgraph(graph, included)
    occupied = np.nonzero(sub.degrees > 0)[0]
    if occupied.size < sub.n:
        sub = induced_subgraph(sub, occupied)
    return sub, pre_size


# ---------------------------------------------------------------------------
# statistic evaluation


def evaluate_statistic(graph: Graph, spec: StatisticSpec) -> float:
    """Evaluate any statistic spec (eigenvalue-based or motif count)."""
    if isinstance(spec.functional, CountStat):
        return normalized_count(graph, spec.functional.motif, spec.normalization)
    return eigen_statistic(graph, spec)


def _freeze_normalization(spec: StatisticSpec, graph: Graph) -> StatisticSpec:
    """Pin EstimatedRho to the full-graph estimate for subsample reuse."""
    if isinstance(spec.normalization, EstimatedRho):
        value = rho_hat(graph)
        if value <= 0.0:
            raise DegenerateStatisticError("estimated rho is zero (empty graph)")
        return replace(spec, normalization=KnownRho(value))
    return spec


def _distribution_with_center(graph, spec, scheme, replicates, seed, workers):
    if replicates < MIN_REPLICATES:
        raise ValueError(f"need at least {MIN_REPLICATES} replicates for "
                         "stable quantiles")
    center = evaluate_statistic(graph, spec)
    frozen = _freeze_normalization(spec, graph)

    def one_replicate(i: int):
        rng = spawn_generator(seed, i)
        if isinstance(scheme, VertexScheme):
            sub = vertex_subsample(graph, scheme.b, rng)
            pre_size = scheme.b
        else:
            sub, pre_size = p_subsample(graph, scheme.p, rng)
        size = sub.n
        degenerate = False
        if size < 2:
            value_sub = 0.0
            degenerate = True
        else:
            try:
                value_sub = evaluate_statistic(sub, frozen)
            except (DegenerateStatisticError, ValueError):
                value_sub = 0.0
                degenerate = True
        draw = math.sqrt(size) * (value_sub - center)
        return draw, size, pre_size, degenerate

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_replicate, range(replicates)))
    else:
        results = [one_replicate(i) for i in range(replicates)]

    draws = np.array([r[0] for r in results])
    sizes = np.array([r[1] for r in results], dtype=np.int64)
    pre_sizes = np.array([r[2] for r in results], dtype=np.int64)
    degenerate_count = sum(r[3] for r in results)
    if degenerate_count > MAX_DEGENERATE_FRACTION * replicates:
        raise SubsamplingError(
            f"statistic degenerate on {degenerate_count} of {replicates} "
            f"replicates (sizes min={sizes.min()}, max={sizes.max()})")
    dist = EmpiricalDistribution(values=np.sort(draws),
                                 replicate_sizes=sizes,
                                 pre_deletion_sizes=pre_sizes,
                                 degenerate_count=degenerate_count)
    return dist, center


def subsample_distribution(graph: Graph, spec: StatisticSpec, scheme,
                           replicates: int, seed: int,
                           workers: int = 1) -> EmpiricalDistribution:
    """Empirical subsampling distribution of the centered, scaled statistic.

    Deterministic in (inputs, seed): replicate i draws from its own stream
    keyed by (seed, i), so the result is identical under any worker count.
    """
    return _distribution_with_center(graph, spec, scheme, replicates, seed,
                                     workers)[0]


def quantile(dist: EmpiricalDistribution, level: float) -> float:
    """Smallest sample value at which the empirical CDF reaches the level.

    Computed as the ceil(level * N)-th order statistic.  A 1e-9 guard
    absorbs float drift in level (e.g. from 1 - alpha/2 arithmetic) so that
    mathematically integer level * N never rounds up an extra step.
    """
    if not 0.0 < level <= 1.0:
        raise ValueError("quantile level must lie in (0, 1]")
    n = len(dist)
    if n == 0:
        raise ValueError("empty distribution")
    k = max(1, math.ceil(level * n - 1e-9))
    return float(dist.values[min(k, n) - 1])


def one_sided_lower_bound(dist: EmpiricalDistribution, statistic_value: float,
                          n: int, level: float) -> float:
    """Lower confidence bound from the one-sided quantile inversion."""
    return statistic_value - quantile(dist, level) / math.sqrt(n)


def confidence_interval(graph: Graph, spec: StatisticSpec, scheme,
                        replicates: int, level: float, seed: int,
                        workers: int = 1) -> ConfidenceInterval:
    """Equal-tailed two-sided interval for the statistic's population value.

    With q_a the subsampling-distribution quantiles, the interval is
    [theta_hat - q_{1-alpha/2} / sqrt(n), theta_hat - q_{alpha/2} / sqrt(n)]
    at level 1 - alpha.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie in (0, 1)")
    dist, center = _distribution_with_center(graph, spec, scheme, replicates,
                                             seed, workers)
    alpha = 1.0 - level
    q_lo = quantile(dist, alpha / 2.0)
    q_hi = quantile(dist, 1.0 - alpha / 2.0)
    tau_n = math.sqrt(graph.n)
    estimated = isinstance(spec.normalization, EstimatedRho)
    provenance = {
        "statistic": spec.label(),
        "scheme": scheme.label(),
        "rho_mode": "estimated" if estimated else "known",
        "rho_value": rho_hat(graph) if estimated else spec.normalization.rho,
        "tau": "sqrt(subsample size)",
        "construction": "equal-tailed quantile inversion",
        "degenerate_count": dist.degenerate_count,
    }
    if estimated and isinstance(spec.functional, CountStat):
        provenance["estimated_rho_count_caveat"] = (
            "density estimation is a non-negligible perturbation for "
            "count statistics")
    return ConfidenceInterval(lower=center - q_hi / tau_n,
                              upper=center - q_lo / tau_n,
                              level=level, statistic_value=center,
                              scheme=scheme, replicates=replicates, seed=seed,
                              provenance=provenance)
