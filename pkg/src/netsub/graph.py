"""Undirected simple graphs in compressed sparse adjacency form.

A Graph stores, for each vertex, a sorted array of neighbor ids.  The
layout is the classic CSR pair (indptr, indices) without a data array,
which makes conversion to a scipy sparse matrix and extraction of induced
subgraphs cheap.  Instances are immutable; the backing arrays are marked
read-only.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix


class GraphStructureError(ValueError):
    """Raised when edge data cannot form a valid simple undirected graph."""


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    edge_count: int

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def to_csr(self, dtype=np.float64) -> csr_matrix:
        data = np.ones(self.indices.shape[0], dtype=dtype)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) array with u < v, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


def _build(n: int, rows: np.ndarray, cols: np.ndarray) -> Graph:
    """Assemble a Graph from directed half-edges (both directions present)."""
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    counts = np.bincount(rows, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(n=n, indptr=indptr, indices=cols.astype(np.int64),
                 edge_count=len(rows) // 2)


def graph_from_edges(n: int, u, v, dedupe: bool = False) -> Graph:
    """Build a Graph from undirected edge endpoint arrays.

    Endpoints must be in [0, n); self loops are rejected.  With
    ``dedupe=True`` repeated edges are collapsed, otherwise duplicates are
    an error.
    """
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape:
        raise GraphStructureError("edge endpoint arrays differ in length")
    if n < 0:
        raise GraphStructureError("vertex count must be nonnegative")
    if u.size:
        if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
            raise GraphStructureError("edge endpoint outside [0, n)")
        if np.any(u == v):
            raise GraphStructureError("self loops are not allowed")
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    key = lo * np.int64(n) + hi
    unique_key = np.unique(key)
    if unique_key.size != key.size:
        if not dedupe:
            raise GraphStructureError("duplicate edges present")
        lo = unique_key // n
        hi = unique_key % n
    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    return _build(n, rows, cols)


def empty_graph(n: int) -> Graph:
    return Graph(n=n, indptr=np.zeros(n + 1, dtype=np.int64),
                 indices=np.zeros(0, dtype=np.int64), edge_count=0)


def complete_graph(n: int) -> Graph:
    u, v = np.triu_indices(n, k=1)
    return graph_from_edges(n, u, v)


def induced_subgraph(graph: Graph, vertices) -> Graph:
    """Induced subgraph on the given vertex set, relabeled 0..b-1.

    Vertices are relabeled in sorted order of their original ids, so the
    result is a deterministic function of the vertex set.
    """
    sel = np.unique(np.asarray(vertices, dtype=np.int64))
    if sel.size != np.asarray(vertices).size:
        raise GraphStructureError("vertex subset contains repeats")
    b = sel.size
    if b and (sel[0] < 0 or sel[-1] >= graph.n):
        raise GraphStructureError("vertex id outside graph")
    lookup = np.full(graph.n, -1, dtype=np.int64)
    lookup[sel] = np.arange(b, dtype=np.int64)
    deg = graph.indptr[sel + 1] - graph.indptr[sel] if b else np.zeros(0, np.int64)
    total = int(deg.sum())
    if total == 0:
        return empty_graph(b)
    # gather the concatenated neighbor lists of the selected rows
    flat = np.repeat(graph.indptr[sel], deg) + (
        np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(deg) - deg, deg)
    )
    cols = lookup[graph.indices[flat]]
    rows = np.repeat(np.arange(b, dtype=np.int64), deg)
    keep = cols >= 0
    rows = rows[keep]
    cols = cols[keep]
    # rows are nondecreasing and, within a row, cols inherit sorted order
    counts = np.bincount(rows, minlength=b)
    indptr = np.zeros(b + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(n=b, indptr=indptr, indices=cols, edge_count=len(rows) // 2)


def validate_graph(graph: Graph) -> None:
    """Check the structural invariants; raises GraphStructureError."""
    if graph.indptr.shape != (graph.n + 1,) or graph.indptr[0] != 0:
        raise GraphStructureError("malformed indptr")
    if graph.indptr[-1] != graph.indices.shape[0]:
        raise GraphStructureError("indptr does not cover indices")
    if graph.indices.size and (graph.indices.min() < 0 or graph.indices.max() >= graph.n):
        raise GraphStructureError("neighbor id outside graph")
    if 2 * graph.edge_count != graph.indices.shape[0]:
        raise GraphStructureError("edge_count inconsistent with adjacency size")
    for v in range(graph.n):
        nb = graph.neighbors(v)
        if nb.size:
            if np.any(np.diff(nb) <= 0):
                raise GraphStructureError(f"neighbor list of {v} not strictly increasing")
            if np.any(nb == v):
                raise GraphStructureError(f"self loop at {v}")
    # symmetry via transpose comparison
    a = graph.to_csr(dtype=np.int8)
    if (a != a.T).nnz:
        raise GraphStructureError("adjacency not symmetric")
