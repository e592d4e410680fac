"""Normalized subgraph count functionals.

Counts are of subgraph copies (the motif's edges must be present, other
pairs are unconstrained).  The normalized functional divides the raw copy
count by C(n, p) * iso(R) and by rho^e, where p and e are the motif's
vertex and edge counts and iso(R) is the number of distinct copies of the
motif on a fixed labeled p-set.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np
from scipy.sparse import csr_matrix

from .graph import Graph
from .spectral import DegenerateStatisticError, EstimatedRho, KnownRho, rho_hat

_COUNT_ROW_BLOCK = 1024


@dataclass(frozen=True)
class Motif:
    name: str
    vertices: int
    edges: tuple  # canonical (i, j) pairs with i < j

    @property
    def edge_count(self) -> int:
        return len(self.edges)


EDGE = Motif("edge", 2, ((0, 1),))
TWO_STAR = Motif("twostar", 3, ((0, 1), (0, 2)))
THREE_STAR = Motif("threestar", 4, ((0, 1), (0, 2), (0, 3)))
FOUR_STAR = Motif("fourstar", 5, ((0, 1), (0, 2), (0, 3), (0, 4)))
TRIANGLE = Motif("triangle", 3, ((0, 1), (0, 2), (1, 2)))
CYCLE4 = Motif("cycle4", 4, ((0, 1), (1, 2), (2, 3), (0, 3)))
CYCLE5 = Motif("cycle5", 5, ((0, 1), (1, 2), (2, 3), (3, 4), (0, 4)))

MOTIFS = {m.name: m for m in
          (EDGE, TWO_STAR, THREE_STAR, FOUR_STAR, TRIANGLE, CYCLE4, CYCLE5)}

_STAR_LEAVES = {"twostar": 2, "threestar": 3, "fourstar": 4}


def k_star(k: int) -> Motif:
    """Star with k leaves (k in 2..4)."""
    table = {2: TWO_STAR, 3: THREE_STAR, 4: FOUR_STAR}
    if k not in table:
        raise ValueError("star motifs are defined for 2 to 4 leaves")
    return table[k]


def cycle(p: int) -> Motif:
    table = {3: TRIANGLE, 4: CYCLE4, 5: CYCLE5}
    if p not in table:
        raise ValueError("cycle motifs are defined for lengths 3 to 5")
    return table[p]


@lru_cache(maxsize=None)
def iso_count(motif: Motif) -> int:
    """Number of distinct copies of the motif on a fixed labeled p-set.

    Enumerates the images of the motif's edge set under all vertex
    permutations and counts the distinct ones; equals p! / |Aut|.
    """
    images = set()
    for perm in permutations(range(motif.vertices)):
        images.add(frozenset(
            (min(perm[i], perm[j]), max(perm[i], perm[j]))
            for i, j in motif.edges))
    return len(images)


def _int_csr(graph: Graph) -> csr_matrix:
    data = np.ones(graph.indices.shape[0], dtype=np.int64)
    return csr_matrix((data, graph.indices, graph.indptr),
                      shape=(graph.n, graph.n))


def _star_count(degrees: np.ndarray, leaves: int) -> int:
    total = 0
    for d, cnt in enumerate(np.bincount(degrees)):
        if cnt and d >= leaves:
            total += int(cnt) * math.comb(d, leaves)
    return total


def _triangle_stats(graph: Graph):
    """Per-vertex triangle counts and the total triangle count."""
    a = _int_csr(graph)
    n = graph.n
    per_vertex = np.zeros(n, dtype=np.int64)
    for i0 in range(0, n, _COUNT_ROW_BLOCK):
        i1 = min(i0 + _COUNT_ROW_BLOCK, n)
        block = a[i0:i1]
        paths = block @ a                      # 2-walk counts from these rows
        common = paths.multiply(block)         # restricted to actual edges
        per_vertex[i0:i1] = np.asarray(common.sum(axis=1)).ravel() // 2
    return per_vertex, int(per_vertex.sum()) // 3


def _closed_walks_4_and_5(graph: Graph, need5: bool):
    """tr(A^4) and optionally tr(A^5), exact in integer arithmetic."""
    a = _int_csr(graph)
    n = graph.n
    tr4 = 0
    tr5 = 0
    for i0 in range(0, n, _COUNT_ROW_BLOCK):
        i1 = min(i0 + _COUNT_ROW_BLOCK, n)
        w2 = a[i0:i1] @ a
        tr4 += int(w2.multiply(w2).sum())
        if need5:
            w3 = w2 @ a
            tr5 += int(w2.multiply(w3).sum())
    return tr4, tr5


def raw_count(graph: Graph, motif: Motif) -> int:
    """Number of copies of the motif contained in the graph, exact."""
    n = graph.n
    if n < motif.vertices:
        raise ValueError(f"graph has {n} vertices, motif needs {motif.vertices}")
    if motif.name == "edge":
        return graph.edge_count
    deg = graph.degrees
    if motif.name in _STAR_LEAVES:
        return _star_count(deg, _STAR_LEAVES[motif.name])
    if motif.name == "triangle":
        return _triangle_stats(graph)[1]
    m = graph.edge_count
    if motif.name == "cycle4":
        tr4, _ = _closed_walks_4_and_5(graph, need5=False)
        wedges2 = int(np.sum(deg.astype(np.int64) * (deg - 1)))
        return (tr4 - 2 * m - 2 * wedges2) // 8
    if motif.name == "cycle5":
        per_vertex, triangles = _triangle_stats(graph)
        _, tr5 = _closed_walks_4_and_5(graph, need5=True)
        anchored = int(np.sum(per_vertex * (deg.astype(np.int64) - 2)))
        return (tr5 - 30 * triangles - 10 * anchored) // 10
    raise ValueError(f"unknown motif {motif.name!r}")


def normalized_count(graph: Graph, motif: Motif, normalization=EstimatedRho()) -> float:
    """rho^(-e) * raw_count / (C(n, p) * iso(R))."""
    if isinstance(normalization, KnownRho):
        rho = normalization.rho
    elif isinstance(normalization, EstimatedRho):
        rho = rho_hat(graph)
    else:
        raise TypeError(f"unsupported normalization {normalization!r}")
    if rho <= 0.0:
        raise DegenerateStatisticError("count normalization needs positive rho")
    raw = raw_count(graph, motif)
    combos = math.comb(graph.n, motif.vertices) * iso_count(motif)
    return raw / combos / rho ** motif.edge_count
