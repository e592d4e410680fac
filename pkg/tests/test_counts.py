import math

import numpy as np
import pytest

from netsub.counts import (CYCLE4, CYCLE5, EDGE, FOUR_STAR, MOTIFS,
                           THREE_STAR, TRIANGLE, TWO_STAR, cycle, iso_count,
                           k_star, normalized_count, raw_count)
from netsub.graph import complete_graph, empty_graph, graph_from_edges
from netsub.models import ConstantSparsity, sample_graph, sbm_study_model
from netsub.spectral import (DegenerateStatisticError, EstimatedRho, KnownRho,
                             rho_hat)

import oracles

rng = np.random.default_rng(90210)

ALL_MOTIFS = [EDGE, TWO_STAR, THREE_STAR, FOUR_STAR, TRIANGLE, CYCLE4, CYCLE5]


# ---------------------------------------------------------------------------
# iso counts


def test_iso_count_literals():
    assert iso_count(EDGE) == 1
    assert iso_count(TWO_STAR) == 3
    assert iso_count(TRIANGLE) == 1
    assert iso_count(CYCLE4) == 3


@pytest.mark.parametrize("motif", ALL_MOTIFS, ids=lambda m: m.name)
def test_iso_count_matches_exhaustive_isomorphism_search(motif):
    assert iso_count(motif) == oracles.iso_count_via_networkx(motif)


def test_motif_factories():
    assert k_star(3) is THREE_STAR
    assert cycle(5) is CYCLE5
    with pytest.raises(ValueError):
        k_star(5)
    with pytest.raises(ValueError):
        cycle(6)


# ---------------------------------------------------------------------------
# raw counts


def test_complete_graph_triangles():
    assert raw_count(complete_graph(4), TRIANGLE) == 4


def test_path_two_stars():
    path = graph_from_edges(3, [0, 1], [1, 2])
    assert raw_count(path, TWO_STAR) == 1


def test_edge_count_motif():
    g = oracles.random_graph(15, 0.4, np.random.default_rng(0))
    assert raw_count(g, EDGE) == g.edge_count


def test_complete_graph_cycles():
    assert raw_count(complete_graph(4), CYCLE4) == 3
    assert raw_count(complete_graph(5), CYCLE5) == 12
    assert raw_count(complete_graph(6), CYCLE5) == math.comb(6, 5) * 12


def test_too_small_graph_rejected():
    with pytest.raises(ValueError):
        raw_count(complete_graph(3), CYCLE4)


def test_raw_counts_match_brute_force_on_corpus():
    """Every motif count equals subset enumeration on 200 small graphs."""
    corpus_rng = np.random.default_rng(31415)
    for _ in range(200):
        n = int(corpus_rng.integers(5, 13))
        p = float(corpus_rng.uniform(0.15, 0.85))
        g = oracles.random_graph(n, p, corpus_rng)
        for motif in ALL_MOTIFS:
            if n < motif.vertices:
                continue
            assert raw_count(g, motif) == oracles.brute_motif_count(g, motif), (
                f"{motif.name} mismatch on n={n}")


def test_adding_edge_never_decreases_counts():
    base_rng = np.random.default_rng(77)
    for _ in range(30):
        n = int(base_rng.integers(5, 11))
        g = oracles.random_graph(n, 0.4, base_rng)
        present = {tuple(e) for e in g.edge_array().tolist()}
        absent = [(u, v) for u in range(n) for v in range(u + 1, n)
                  if (u, v) not in present]
        if not absent:
            continue
        u, v = absent[int(base_rng.integers(len(absent)))]
        edges = g.edge_array()
        bigger = graph_from_edges(n, np.append(edges[:, 0], u),
                                  np.append(edges[:, 1], v))
        for motif in ALL_MOTIFS:
            if n < motif.vertices:
                continue
            assert raw_count(bigger, motif) >= raw_count(g, motif)


def test_raw_count_permutation_invariance():
    g = oracles.random_graph(12, 0.5, np.random.default_rng(5))
    perm = np.random.default_rng(6).permutation(12)
    edges = g.edge_array()
    relabeled = graph_from_edges(12, perm[edges[:, 0]], perm[edges[:, 1]])
    for motif in ALL_MOTIFS:
        assert raw_count(g, motif) == raw_count(relabeled, motif)


# ---------------------------------------------------------------------------
# normalized counts


def test_complete_graph_normalized_counts_are_one():
    k7 = complete_graph(7)
    assert normalized_count(k7, EDGE, KnownRho(1.0)) == 1.0
    assert normalized_count(k7, TRIANGLE, KnownRho(1.0)) == 1.0


def test_normalization_consistency():
    g = oracles.random_graph(14, 0.5, np.random.default_rng(9))
    frozen = KnownRho(rho_hat(g))
    for motif in ALL_MOTIFS:
        assert normalized_count(g, motif, frozen) == normalized_count(
            g, motif, EstimatedRho())


def test_zero_rho_is_degenerate():
    with pytest.raises(DegenerateStatisticError):
        normalized_count(empty_graph(5), EDGE, EstimatedRho())


def test_normalized_count_formula():
    g = oracles.random_graph(10, 0.6, np.random.default_rng(4))
    rho = 0.4
    raw = raw_count(g, TWO_STAR)
    expected = raw / (math.comb(10, 3) * 3) / rho ** 2
    assert normalized_count(g, TWO_STAR, KnownRho(rho)) == pytest.approx(expected)


def test_motif_registry_complete():
    assert set(MOTIFS) == {"edge", "twostar", "threestar", "fourstar",
                           "triangle", "cycle4", "cycle5"}


@pytest.mark.slow
def test_two_star_count_matches_block_moment():
    """Normalized two-star count at n=3000 approaches the class-sum value."""
    model = sbm_study_model(ConstantSparsity(1.0))
    kernel = model.kernel
    mean = kernel.pi @ kernel.B @ kernel.pi
    row_means = (kernel.B / mean) @ kernel.pi
    target = float(kernel.pi @ row_means ** 2)
    g = sample_graph(model, 3000, seed=2718)
    value = normalized_count(g, TWO_STAR, EstimatedRho())
    assert value == pytest.approx(target, abs=0.03)
