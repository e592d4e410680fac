"""Adjacency spectra and eigenvalue-based network statistics.

Eigenvalue indexing follows the signed convention: positive index r is the
r-th largest algebraic eigenvalue, negative index r counts up from the
bottom of the spectrum (so index -1 is the most negative eigenvalue).
Statistics are normalized by n * rho with rho either supplied (KnownRho)
or estimated from the observed edge density (EstimatedRho).
"""

import threading
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from scipy.sparse.linalg import ArpackNoConvergence

from .graph import Graph

DENSE_CUTOFF = 512

# ARPACK is not guaranteed re-entrant; serialize iterative solves
_ARPACK_LOCK = threading.Lock()


class DegenerateStatisticError(ValueError):
    """Statistic undefined on this input (zero density, zero denominator)."""


class EigensolverError(RuntimeError):
    """Iterative eigensolver failed to converge within its iteration cap."""


# ---------------------------------------------------------------------------
# statistic specification


@dataclass(frozen=True)
class KnownRho:
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("known rho must be positive")


@dataclass(frozen=True)
class EstimatedRho:
    pass


@dataclass(frozen=True)
class Eigenvalue:
    """Signed-index normalized eigenvalue lambda_r(A) / (n rho)."""

    r: int

    def __post_init__(self):
        if self.r == 0:
            raise ValueError("eigenvalue index must be nonzero")


@dataclass(frozen=True)
class SpectralGap:
    """(lambda_1 - lambda_2) / (n rho)."""


@dataclass(frozen=True)
class EigRatio:
    """lambda_1 / lambda_k (normalization cancels)."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("ratio index must be at least 1")


@dataclass(frozen=True)
class TracePower:
    """sum_{r<=k} (lambda_r(A) / (n rho))^p."""

    p: int
    k: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("trace power must be at least 2")
        if self.k < 1:
            raise ValueError("trace rank cutoff must be at least 1")


@dataclass(frozen=True)
class CountStat:
    """Normalized motif count (evaluated by the counts module)."""

    motif: object


@dataclass(frozen=True)
class StatisticSpec:
    functional: object
    normalization: object = EstimatedRho()

    def label(self) -> str:
        f = self.functional
        if isinstance(f, Eigenvalue):
            return f"eig:{f.r}"
        if isinstance(f, SpectralGap):
            return "gap"
        if isinstance(f, EigRatio):
            return f"ratio:{f.k}"
        if isinstance(f, TracePower):
            return f"trace:{f.p}:{f.k}"
        if isinstance(f, CountStat):
            return f"count:{f.motif.name}"
        return repr(f)


@dataclass(frozen=True)
class SpectrumRequest:
    k_pos: int
    k_neg: int = 0

    def __post_init__(self):
        if self.k_pos < 0 or self.k_neg < 0 or self.k_pos + self.k_neg < 1:
            raise ValueError("must request at least one eigenvalue")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Requested ends of an adjacency spectrum (unnormalized)."""

    top: np.ndarray      # k_pos largest, descending
    bottom: np.ndarray   # k_neg smallest, ascending

    def at(self, r: int) -> float:
        if r > 0:
            return float(self.top[r - 1])
        if r < 0:
            return float(self.bottom[-r - 1])
        raise ValueError("eigenvalue index must be nonzero")


# ---------------------------------------------------------------------------
# operations


def rho_hat(graph: Graph) -> float:
    """Observed edge density 2m / (n (n - 1))."""
    if graph.n < 2:
        raise ValueError("edge density needs at least 2 vertices")
    return 2.0 * graph.edge_count / (graph.n * (graph.n - 1))


def top_eigenvalues(graph: Graph, request: SpectrumRequest,
                    dense_cutoff: int = DENSE_CUTOFF) -> Spectrum:
    """Extreme adjacency eigenvalues.

    Uses a dense symmetric eigendecomposition for small graphs and ARPACK
    Lanczos (run on A and on -A for the two spectrum ends) above
    ``dense_cutoff``.  Non-convergence is a hard error; no partial results
    are returned.
    """
    n = graph.n
    k_pos, k_neg = request.k_pos, request.k_neg
    if k_pos + k_neg > n:
        raise ValueError(f"requested {k_pos + k_neg} eigenvalues from {n} vertices")
    if graph.edge_count == 0:
        return Spectrum(top=np.zeros(k_pos), bottom=np.zeros(k_neg))
    if n <= dense_cutoff or max(k_pos, k_neg) >= n - 1:
        dense = graph.to_csr().toarray()
        top = np.zeros(0)
        bottom = np.zeros(0)
        if k_pos:
            top = scipy.linalg.eigh(dense, eigvals_only=True,
                                    subset_by_index=[n - k_pos, n - 1])[::-1]
        if k_neg:
            bottom = scipy.linalg.eigh(dense, eigvals_only=True,
                                       subset_by_index=[0, k_neg - 1])
        return Spectrum(top=top, bottom=bottom)
    a = graph.to_csr()
    top = _lanczos_end(a, k_pos)[::-1] if k_pos else np.zeros(0)
    bottom = np.sort(-_lanczos_end(-a, k_neg)) if k_neg else np.zeros(0)
    return Spectrum(top=top, bottom=bottom)


def _lanczos_end(a, k: int) -> np.ndarray:
    """k largest algebraic eigenvalues, ascending, via ARPACK."""
    n = a.shape[0]
    # fixed full-support start vector: ARPACK's default is drawn from the
    # global RNG, which would break run-to-run byte determinism
    start = np.sin(1.0 + np.arange(n))
    try:
        with _ARPACK_LOCK:
            vals = scipy.sparse.linalg.eigsh(
                a, k=k, which="LA", tol=1e-10, maxiter=10 * k + 200,
                v0=start, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise EigensolverError(
            f"Lanczos failed to converge for k={k} within the iteration cap"
        ) from exc
    return np.sort(vals)


def _resolve_rho(graph: Graph, normalization) -> float:
    if isinstance(normalization, KnownRho):
        return normalization.rho
    if isinstance(normalization, EstimatedRho):
        value = rho_hat(graph)
        if value <= 0.0:
            raise DegenerateStatisticError("estimated rho is zero (empty graph)")
        return value
    raise TypeError(f"unsupported normalization {normalization!r}")


def normalized_spectrum(graph: Graph, k_pos: int, k_neg: int = 0,
                        normalization=EstimatedRho()) -> Spectrum:
    """Spectrum with both ends divided by n * rho."""
    spec = top_eigenvalues(graph, SpectrumRequest(k_pos, k_neg))
    scale = graph.n * _resolve_rho(graph, normalization)
    return Spectrum(top=spec.top / scale, bottom=spec.bottom / scale)


def eigen_statistic(graph: Graph, spec: StatisticSpec) -> float:
    """Evaluate an eigenvalue-based statistic on one graph."""
    f = spec.functional
    if isinstance(f, CountStat):
        raise TypeError("motif statistics are evaluated by the counts module")
    n = graph.n
    if isinstance(f, Eigenvalue):
        if abs(f.r) > n:
            raise ValueError(f"eigenvalue index {f.r} out of range for n={n}")
        rho = _resolve_rho(graph, spec.normalization)
        req = SpectrumRequest(f.r, 0) if f.r > 0 else SpectrumRequest(0, -f.r)
        return top_eigenvalues(graph, req).at(f.r) / (n * rho)
    if isinstance(f, SpectralGap):
        if n < 2:
            raise ValueError("spectral gap needs at least 2 vertices")
        rho = _resolve_rho(graph, spec.normalization)
        top = top_eigenvalues(graph, SpectrumRequest(2, 0)).top
        return float(top[0] - top[1]) / (n * rho)
    if isinstance(f, EigRatio):
        if f.k > n:
            raise ValueError(f"ratio index {f.k} out of range for n={n}")
        top = top_eigenvalues(graph, SpectrumRequest(f.k, 0)).top
        if top[f.k - 1] == 0.0:
            raise DegenerateStatisticError("ratio denominator eigenvalue is zero")
        return float(top[0] / top[f.k - 1])
    if isinstance(f, TracePower):
        if f.k > n:
            raise ValueError(f"trace cutoff {f.k} out of range for n={n}")
        rho = _resolve_rho(graph, spec.normalization)
        top = top_eigenvalues(graph, SpectrumRequest(f.k, 0)).top
        return float(np.sum((top / (n * rho)) ** f.p))
    raise TypeError(f"unsupported statistic functional {f!r}")
