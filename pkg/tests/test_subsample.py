import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from netsub.counts import EDGE
from netsub.graph import complete_graph, empty_graph, graph_from_edges
from netsub.models import (BlockKernel, ConstantSparsity, GraphonModel,
                           sample_graph)
from netsub.spectral import (CountStat, Eigenvalue, EstimatedRho, KnownRho,
                             StatisticSpec, rho_hat)
from netsub.subsample import (EmpiricalDistribution,
                              PSampleScheme, SubsamplingError, VertexScheme,
                              confidence_interval, evaluate_statistic,
                              one_sided_lower_bound, p_subsample, quantile,
                              subsample_distribution, vertex_subsample)

import oracles

rng = np.random.default_rng(60601)

EIG1 = StatisticSpec(Eigenvalue(1), EstimatedRho())


def er_model(prob, nu=1.0):
    return GraphonModel(kernel=BlockKernel(B=np.array([[prob]]),
                                           pi=np.array([1.0])),
                        sparsity=ConstantSparsity(nu))


def make_distribution(values):
    values = np.sort(np.asarray(values, dtype=np.float64))
    n = values.shape[0]
    return EmpiricalDistribution(values=values,
                                 replicate_sizes=np.full(n, 2, dtype=np.int64),
                                 pre_deletion_sizes=np.full(n, 2, dtype=np.int64),
                                 degenerate_count=0)


# ---------------------------------------------------------------------------
# vertex subsampling


def test_vertex_subsample_full_size_is_identity():
    g = oracles.random_graph(12, 0.5, np.random.default_rng(3))
    sub = vertex_subsample(g, 12, rng=0)
    assert np.array_equal(sub.indptr, g.indptr)
    assert np.array_equal(sub.indices, g.indices)


def test_vertex_subsample_of_complete_graph():
    sub = vertex_subsample(complete_graph(10), 4, rng=1)
    assert sub.n == 4 and sub.edge_count == 6


def test_vertex_subsample_range_checks():
    with pytest.raises(ValueError):
        vertex_subsample(complete_graph(5), 1, rng=0)
    with pytest.raises(ValueError):
        vertex_subsample(complete_graph(5), 6, rng=0)


def test_path_two_subsets_edge_frequency():
    """All three 2-subsets of a path: the edge appears in exactly two."""
    path = graph_from_edges(3, [0, 1], [1, 2])
    from netsub.graph import induced_subgraph
    counts = [induced_subgraph(path, list(pair)).edge_count
              for pair in itertools.combinations(range(3), 2)]
    assert sorted(counts) == [0, 1, 1]


# ---------------------------------------------------------------------------
# p-sampling


def test_p_subsample_near_one_keeps_everything():
    kept = 0
    for seed in range(200):
        sub, pre = p_subsample(complete_graph(10), 0.999, rng=seed)
        kept += (sub.n == 10 and sub.edge_count == 45)
    assert kept >= 195


def test_p_subsample_empty_graph_collapses():
    sub, pre = p_subsample(empty_graph(20), 0.5, rng=7)
    assert sub.n == 0 and sub.edge_count == 0
    assert 0 <= pre <= 20


def test_p_subsample_star_sizes_match_enumeration():
    """Returned sizes on a 5-leaf star follow the exhaustive-pattern law."""
    star = graph_from_edges(6, [0, 0, 0, 0, 0], [1, 2, 3, 4, 5])
    pmf = np.zeros(7)
    for pattern in itertools.product([0, 1], repeat=6):
        if pattern[0] == 0 or sum(pattern[1:]) == 0:
            size = 0  # no center or no leaves: everyone isolated
        else:
            size = 1 + sum(pattern[1:])
        pmf[size] += 1 / 64
    draws = np.zeros(7)
    trials = 4000
    for seed in range(trials):
        sub, _ = p_subsample(star, 0.5, rng=seed)
        draws[sub.n] += 1
    support = pmf > 0
    chi2 = stats.chisquare(draws[support], trials * pmf[support])
    assert chi2.pvalue > 0.01


def test_p_subsample_validation():
    with pytest.raises(ValueError):
        p_subsample(complete_graph(4), 0.0, rng=0)
    with pytest.raises(ValueError):
        p_subsample(complete_graph(4), 1.0, rng=0)


# ---------------------------------------------------------------------------
# quantiles


def test_quantile_examples():
    dist = make_distribution([1.0, 2.0, 3.0, 4.0])
    assert quantile(dist, 0.5) == 2.0
    assert quantile(dist, 1.0) == 4.0
    assert quantile(dist, 0.01) == 1.0


def test_quantile_validation():
    dist = make_distribution([1.0])
    with pytest.raises(ValueError):
        quantile(dist, 0.0)
    with pytest.raises(ValueError):
        quantile(dist, 1.1)
    with pytest.raises(ValueError):
        quantile(make_distribution([]), 0.5)


@given(values=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=400),
       level_grid=st.integers(1, 999))
@settings(max_examples=200, deadline=None)
def test_quantile_matches_linear_scan(values, level_grid):
    level = level_grid / 1000.0
    # stay away from exact rank boundaries, where the two float routes may
    # legitimately disagree by one ulp; those are pinned by example tests
    product = level * len(values)
    if abs(product - round(product)) < 1e-6:
        level = level + 0.5 / len(values) / 1000.0
    dist = make_distribution(values)
    assert quantile(dist, level) == oracles.linear_scan_quantile(
        dist.values, level)


@given(values=st.lists(st.floats(-100, 100), min_size=1, max_size=100),
       a=st.integers(1, 1000), b=st.integers(1, 1000))
@settings(max_examples=150, deadline=None)
def test_quantile_monotone_in_level(values, a, b):
    lo, hi = sorted((a, b))
    dist = make_distribution(values)
    assert quantile(dist, lo / 1000.0) <= quantile(dist, hi / 1000.0)


def test_quantile_on_large_random_sample():
    sample = np.random.default_rng(12).normal(size=1000)
    dist = make_distribution(sample)
    for level in (0.01, 0.025, 0.3, 0.5, 0.777, 0.975, 1.0):
        assert quantile(dist, level) == oracles.linear_scan_quantile(
            dist.values, level)


# ---------------------------------------------------------------------------
# the subsampling distribution


def test_full_overlap_scheme_gives_constant_zero():
    g = complete_graph(12)
    dist = subsample_distribution(g, StatisticSpec(Eigenvalue(1), KnownRho(1.0)),
                                  VertexScheme(12), replicates=60, seed=4)
    assert np.all(dist.values == 0.0)
    assert quantile(dist, 0.5) == 0.0 and quantile(dist, 0.99) == 0.0


def test_distribution_is_sorted_and_sized():
    g = sample_graph(er_model(0.4), 120, seed=6)
    dist = subsample_distribution(g, EIG1, VertexScheme(40), 80, seed=0)
    assert len(dist) == 80
    assert np.all(np.diff(dist.values) >= 0)
    assert np.all(dist.replicate_sizes == 40)
    assert dist.degenerate_count == 0


def test_minimum_replicates_enforced():
    g = complete_graph(20)
    with pytest.raises(ValueError):
        subsample_distribution(g, EIG1, VertexScheme(5), 49, seed=0)


def test_estimated_rho_is_frozen_from_full_graph():
    """Subsample draws coincide bit for bit with the pinned known-rho run."""
    g = sample_graph(er_model(0.5), 100, seed=9)
    est = subsample_distribution(g, EIG1, VertexScheme(30), 60, seed=5)
    known = subsample_distribution(
        g, StatisticSpec(Eigenvalue(1), KnownRho(rho_hat(g))),
        VertexScheme(30), 60, seed=5)
    np.testing.assert_array_equal(est.values, known.values)


def test_seed_determinism_across_worker_counts():
    g = sample_graph(er_model(0.4), 150, seed=2)
    kwargs = dict(spec=EIG1, scheme=PSampleScheme(0.25), replicates=64, seed=11)
    serial = subsample_distribution(g, **kwargs, workers=1)
    threaded = subsample_distribution(g, **kwargs, workers=4)
    np.testing.assert_array_equal(serial.values, threaded.values)
    np.testing.assert_array_equal(serial.replicate_sizes,
                                  threaded.replicate_sizes)
    other = subsample_distribution(g, spec=EIG1, scheme=PSampleScheme(0.25),
                                   replicates=64, seed=12)
    assert not np.array_equal(serial.values, other.values)


def test_mostly_degenerate_psamples_error_out():
    path = graph_from_edges(50, np.arange(49), np.arange(1, 50))
    with pytest.raises(SubsamplingError):
        subsample_distribution(path, EIG1, PSampleScheme(0.02), 60, seed=3)


def test_degenerate_replicates_follow_zero_convention():
    """Empty p-samples are tolerated, tallied, and recorded as zero draws."""
    path = graph_from_edges(3, [0, 1], [1, 2])
    dist = subsample_distribution(path, EIG1, PSampleScheme(0.9), 400, seed=8)
    assert len(dist) == 400
    assert dist.degenerate_count > 0
    # a surviving singleton is impossible (it would be isolated), so every
    # degenerate replicate has size 0 and contributes sqrt(0) * (0 - c) = 0
    degenerate_sizes = dist.replicate_sizes[dist.replicate_sizes < 2]
    assert np.all(degenerate_sizes == 0)
    assert np.count_nonzero(dist.values == 0.0) >= dist.degenerate_count


def test_psample_sizes_concentrate():
    """Pre-deletion sizes behave like Binomial(n, p) draws."""
    n, p = 1000, 0.2
    g = sample_graph(er_model(0.3), n, seed=1)
    dist = subsample_distribution(g, StatisticSpec(CountStat(EDGE)),
                                  PSampleScheme(p), 1000, seed=2)
    sizes = dist.pre_deletion_sizes
    assert abs(sizes.mean() - n * p) < 3 * math.sqrt(n * p)
    half_width = 3 * math.sqrt(n * p * math.log(n))
    outside = np.mean((sizes < n * p - half_width) | (sizes > n * p + half_width))
    assert outside <= 2 * n ** -3 + 0.005


def test_disjoint_subsample_statistics_uncorrelated():
    """Statistics on disjoint vertex sets behave independently."""
    g = sample_graph(er_model(0.6), 200, seed=14)
    reps = 300
    first = np.empty(reps)
    second = np.empty(reps)
    from netsub.graph import induced_subgraph
    frozen = StatisticSpec(Eigenvalue(1), KnownRho(rho_hat(g)))
    pick = np.random.default_rng(21)
    for t in range(reps):
        chosen = pick.choice(200, size=100, replace=False)
        first[t] = evaluate_statistic(induced_subgraph(g, chosen[:50]), frozen)
        second[t] = evaluate_statistic(induced_subgraph(g, chosen[50:]), frozen)
    corr = np.corrcoef(first, second)[0, 1]
    assert abs(corr) <= 3 / math.sqrt(reps)


def test_subsample_distribution_matches_fresh_resampling():
    """Dense regime: subsample draws match fresh same-size generation."""
    model = er_model(0.5)
    n, b, draws = 400, 80, 2000
    g = sample_graph(model, n, seed=33)
    spec = StatisticSpec(Eigenvalue(1), KnownRho(0.5))
    dist = subsample_distribution(g, spec, VertexScheme(b), draws, seed=34)
    center = evaluate_statistic(g, spec)
    fresh = np.empty(draws)
    for t in range(draws):
        fresh_graph = sample_graph(model, b, seed=100_000 + t)
        fresh[t] = math.sqrt(b) * (evaluate_statistic(fresh_graph, spec) - center)
    ks = stats.ks_2samp(dist.values, fresh).statistic
    assert ks < 0.08


# ---------------------------------------------------------------------------
# confidence intervals


def test_constant_statistic_gives_zero_width_interval():
    g = complete_graph(15)
    spec = StatisticSpec(Eigenvalue(1), KnownRho(1.0))
    ci = confidence_interval(g, spec, VertexScheme(15), 60, 0.95, seed=0)
    assert ci.lower == ci.upper == ci.statistic_value == pytest.approx(14 / 15)


def test_interval_orientation_and_provenance():
    g = sample_graph(er_model(0.4), 120, seed=3)
    ci = confidence_interval(g, EIG1, VertexScheme(36), 100, 0.9, seed=7)
    assert ci.lower <= ci.upper
    assert ci.level == 0.9 and ci.replicates == 100 and ci.seed == 7
    assert ci.provenance["rho_mode"] == "estimated"
    assert ci.provenance["construction"] == "equal-tailed quantile inversion"
    assert ci.provenance["tau"] == "sqrt(subsample size)"


def test_interval_nesting_in_level():
    g = sample_graph(er_model(0.4), 150, seed=8)
    wide = confidence_interval(g, EIG1, VertexScheme(50), 200, 0.99, seed=5)
    narrow = confidence_interval(g, EIG1, VertexScheme(50), 200, 0.9, seed=5)
    assert wide.lower <= narrow.lower and narrow.upper <= wide.upper


def test_interval_inversion_formula():
    g = sample_graph(er_model(0.5), 100, seed=10)
    dist = subsample_distribution(g, EIG1, VertexScheme(30), 80, seed=6)
    center = evaluate_statistic(g, EIG1)
    ci = confidence_interval(g, EIG1, VertexScheme(30), 80, 0.95, seed=6)
    tau = math.sqrt(100)
    assert ci.lower == pytest.approx(center - quantile(dist, 0.975) / tau)
    assert ci.upper == pytest.approx(center - quantile(dist, 0.025) / tau)
    bound = one_sided_lower_bound(dist, center, 100, 0.95)
    assert bound == pytest.approx(center - quantile(dist, 0.95) / tau)


def test_count_statistic_caveat_flag():
    g = sample_graph(er_model(0.5), 80, seed=12)
    ci = confidence_interval(g, StatisticSpec(CountStat(EDGE)),
                             VertexScheme(24), 60, 0.95, seed=9)
    assert "estimated_rho_count_caveat" in ci.provenance


def test_level_validation():
    g = complete_graph(30)
    with pytest.raises(ValueError):
        confidence_interval(g, EIG1, VertexScheme(10), 60, 1.0, seed=0)
