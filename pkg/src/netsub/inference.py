"""Composite inference procedures built on the subsampling machinery.

Covers the two-sample testing protocol (node splitting, data-driven
statistic selection, interval disjointness decision), Monte Carlo coverage
experiments over model grids, hierarchical clustering of network spectra,
and the paired comparison of known- versus estimated-density eigenvalue
normalization.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import linkage as _scipy_linkage

from ._rng import derive_key, spawn_generator
from .graph import Graph, induced_subgraph
from .models import (ConstantSparsity, GraphonModel, UnavailableParameter,
                     model_label, population_count_moment,
                     population_eigenvalues, rho_known, sample_graph,
                     sparsity_label)
from .spectral import (CountStat, EigRatio, Eigenvalue, EstimatedRho,
                       SpectralGap, SpectrumRequest, StatisticSpec,
                       TracePower, normalized_spectrum, rho_hat,
                       top_eigenvalues)
from .subsample import (ConfidenceInterval, PSampleScheme, VertexScheme,
                        confidence_interval)

REJECT = "reject"
FAIL_TO_REJECT = "fail-to-reject"


@dataclass(frozen=True)
class TwoSampleResult:
    statistic: StatisticSpec
    value_1: float
    value_2: float
    ci_1: ConfidenceInterval
    ci_2: ConfidenceInterval
    decision: str
    alpha: float
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CoverageCell:
    model: str
    n: int
    sparsity: str
    scheme: str
    statistic: str
    rho_mode: str
    available: bool
    target: float | None
    coverage: float | None
    se: float | None
    trials: int
    note: str = ""


@dataclass(frozen=True)
class CoverageReport:
    cells: list
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge sequence; cluster i >= len(leaves) is merge i."""

    leaves: tuple
    merges: tuple  # (cluster_a, cluster_b, height) triples
    linkage: str = "complete"
    metric: str = "euclidean"


@dataclass(frozen=True)
class VertexFraction:
    """Vertex scheme whose size is a fraction of the graph being sampled."""

    fraction: float

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("subsample fraction must lie in (0, 1]")

    def resolve(self, n: int) -> VertexScheme:
        return VertexScheme(b=min(n, max(2, round(self.fraction * n))))

    def label(self) -> str:
        return f"vertex:{self.fraction:g}"


@dataclass(frozen=True, eq=False)
class RhoModeComparison:
    """Paired top-eigenvalue samples under the two density normalizations."""

    known: np.ndarray
    estimated: np.ndarray
    rho_known: float
    rho_mode: str

    @property
    def known_variance(self) -> float:
        return float(np.var(self.known, ddof=1)) if self.known.size > 1 else 0.0

    @property
    def estimated_variance(self) -> float:
        return float(np.var(self.estimated, ddof=1)) if self.estimated.size > 1 else 0.0


# ---------------------------------------------------------------------------
# node splitting and statistic selection


def node_split(graph: Graph, fraction: float, seed: int):
    """Random partition into two disjoint induced subgraphs.

    The first part receives floor(fraction * n) vertices; edges across the
    cut are discarded.  Both parts must end up with at least 2 vertices.
    """
    n = graph.n
    size_1 = math.floor(fraction * n)
    if size_1 < 2 or n - size_1 < 2:
        raise ValueError(f"split fraction {fraction} leaves a part with "
                         "fewer than 2 vertices")
    perm = spawn_generator(seed, 101).permutation(n)
    part_1 = perm[:size_1]
    part_2 = perm[size_1:]
    return induced_subgraph(graph, part_1), induced_subgraph(graph, part_2)


def select_statistic(spectrum_1, spectrum_2, k_max: int) -> StatisticSpec:
    """Pick the top-spectrum index where two spectra differ the most.

    Inputs are normalized eigenvalue sequences (descending).  Returns the
    eigenvalue statistic at the argmax of the absolute difference over
    indices 1..k_max, ties toward the smaller index.
    """
    s1 = np.asarray(spectrum_1, dtype=np.float64)
    s2 = np.asarray(spectrum_2, dtype=np.float64)
    if s1.size < k_max or s2.size < k_max:
        raise ValueError(f"need at least {k_max} eigenvalues in both spectra")
    gaps = np.abs(s1[:k_max] - s2[:k_max])
    best = int(np.argmax(gaps))  # first maximum wins
    return StatisticSpec(functional=Eigenvalue(best + 1),
                         normalization=EstimatedRho())


def cis_disjoint(bounds_1, bounds_2) -> bool:
    """Disjointness test for two (lower, upper) interval bounds."""
    lo = max(bounds_1[0], bounds_2[0])
    hi = min(bounds_1[1], bounds_2[1])
    return lo > hi


def two_sample_test(g1: Graph, g2: Graph, alpha: float = 0.05,
                    b_fraction: float = 0.33, replicates: int = 500,
                    k_max: int = 5, seed: int = 0,
                    split_fraction: float = 0.5,
                    workers: int = 1) -> TwoSampleResult:
    """Test whether two networks share a generating kernel.

    Each graph is node-split into an exploration and a test part.  The
    statistic (which normalized eigenvalue to compare) is chosen on the
    exploration parts; level 1 - alpha/2 subsampling intervals are built on
    the test parts, and the null is rejected iff they are disjoint, giving
    an overall level of alpha.  The same derived seeds drive both sides,
    so identical inputs produce identical intervals.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    split_seed = int(derive_key(seed, 1))
    ci_seed = int(derive_key(seed, 2))
    explore_1, test_1 = node_split(g1, split_fraction, split_seed)
    explore_2, test_2 = node_split(g2, split_fraction, split_seed)
    b_1 = round(b_fraction * test_1.n)
    b_2 = round(b_fraction * test_2.n)
    if min(b_1, b_2) < 10:
        raise ValueError("graphs too small: subsample size below 10")
    spec_1 = normalized_spectrum(explore_1, k_max).top
    spec_2 = normalized_spectrum(explore_2, k_max).top
    chosen = select_statistic(spec_1, spec_2, k_max)
    level = 1.0 - alpha / 2.0
    ci_1 = confidence_interval(test_1, chosen, VertexScheme(b_1), replicates,
                               level, ci_seed, workers=workers)
    ci_2 = confidence_interval(test_2, chosen, VertexScheme(b_2), replicates,
                               level, ci_seed, workers=workers)
    disjoint = cis_disjoint((ci_1.lower, ci_1.upper), (ci_2.lower, ci_2.upper))
    provenance = {
        "seed": seed, "k_max": k_max, "b_fraction": b_fraction,
        "split_fraction": split_fraction, "b_1": b_1, "b_2": b_2,
        "rho_hat_test_1": rho_hat(test_1), "rho_hat_test_2": rho_hat(test_2),
        "ci_level_each": level,
    }
    return TwoSampleResult(statistic=chosen,
                           value_1=ci_1.statistic_value,
                           value_2=ci_2.statistic_value,
                           ci_1=ci_1, ci_2=ci_2,
                           decision=REJECT if disjoint else FAIL_TO_REJECT,
                           alpha=alpha, provenance=provenance)


# ---------------------------------------------------------------------------
# coverage experiments


def population_target(model: GraphonModel, functional) -> float:
    """Population value of a statistic under the normalized kernel.

    Raises UnavailableParameter when the model has no oracle for the
    requested functional.
    """
    if isinstance(functional, Eigenvalue):
        r = functional.r
        spectrum = population_eigenvalues(model, max(r, 0), max(-r, 0))
        return spectrum.at(r)
    if isinstance(functional, SpectralGap):
        spectrum = population_eigenvalues(model, 2, 0)
        if spectrum.positive.size < 2:
            # rank deficit: the second-largest operator eigenvalue is zero
            if spectrum.positive.size < 1:
                raise UnavailableParameter("operator has no positive eigenvalues")
            return float(spectrum.positive[0])
        return float(spectrum.positive[0] - spectrum.positive[1])
    if isinstance(functional, EigRatio):
        spectrum = population_eigenvalues(model, functional.k, 0)
        if spectrum.positive.size < functional.k:
            raise UnavailableParameter(
                f"operator eigenvalue {functional.k} is zero: ratio undefined")
        return float(spectrum.positive[0] / spectrum.positive[functional.k - 1])
    if isinstance(functional, TracePower):
        spectrum = population_eigenvalues(model, functional.k, 0)
        lam = spectrum.positive[:functional.k]  # missing entries are zeros
        return float(np.sum(lam ** functional.p))
    if isinstance(functional, CountStat):
        return population_count_moment(model, functional.motif)
    raise UnavailableParameter(f"no population oracle for {functional!r}")


def _resolve_scheme(entry, n: int):
    if isinstance(entry, VertexFraction):
        return entry.resolve(n), entry.label()
    if isinstance(entry, VertexScheme):
        return entry, entry.label()
    if isinstance(entry, PSampleScheme):
        return entry, entry.label()
    raise TypeError(f"unsupported scheme grid entry {entry!r}")


def coverage_experiment(model: GraphonModel, n_list, sparsity_list,
                        scheme_list, statistic_list, trials: int,
                        replicates: int, seed: int, level: float = 0.95,
                        workers: int = 1) -> CoverageReport:
    """Empirical interval coverage over a (n, sparsity, scheme, statistic) grid.

    For each cell the population parameter comes from the model oracle,
    `trials` graphs are simulated, one confidence interval is built per
    graph, and the fraction containing the parameter is recorded together
    with its Monte Carlo standard error.  Cell randomness derives from
    (seed, cell index), so cells are independent and individually
    reproducible.  Cells without a population oracle are marked unavailable
    and the run continues.
    """
    targets = {}
    for spec in statistic_list:
        try:
            targets[spec.label()] = population_target(model, spec.functional)
        except UnavailableParameter as exc:
            targets[spec.label()] = exc
    cells = []
    cell_index = 0
    for n in n_list:
        for sparsity in sparsity_list:
            cell_model = model.with_sparsity(sparsity)
            for scheme_entry in scheme_list:
                scheme, scheme_name = _resolve_scheme(scheme_entry, n)
                for spec in statistic_list:
                    cell_index += 1
                    target = targets[spec.label()]
                    mode = ("estimated" if isinstance(spec.normalization,
                                                      EstimatedRho)
                            else f"known:{spec.normalization.rho:g}")
                    base = dict(model=model_label(model), n=n,
                                sparsity=sparsity_label(sparsity),
                                scheme=scheme_name, statistic=spec.label(),
                                rho_mode=mode, trials=trials)
                    if isinstance(target, Exception):
                        cells.append(CoverageCell(available=False, target=None,
                                                  coverage=None, se=None,
                                                  note=str(target), **base))
                        continue
                    hits = 0
                    for t in range(trials):
                        graph_seed = int(derive_key(seed, cell_index, t, 1))
                        ci_seed = int(derive_key(seed, cell_index, t, 2))
                        graph = sample_graph(cell_model, n, graph_seed)
                        ci = confidence_interval(graph, spec, scheme,
                                                 replicates, level, ci_seed,
                                                 workers=workers)
                        hits += ci.contains(target)
                    coverage = hits / trials
                    se = math.sqrt(coverage * (1.0 - coverage) / trials)
                    cells.append(CoverageCell(available=True, target=target,
                                              coverage=coverage, se=se, **base))
    provenance = {"seed": seed, "trials": trials, "replicates": replicates,
                  "level": level, "tau": "sqrt(subsample size)",
                  "construction": "equal-tailed quantile inversion"}
    return CoverageReport(cells=cells, provenance=provenance)


# ---------------------------------------------------------------------------
# spectra clustering and the density-normalization comparison


def cluster_spectra(items) -> Dendrogram:
    """Complete-linkage clustering of (label, eigenvalue vector) pairs."""
    if len(items) < 2:
        raise ValueError("need at least 2 spectra to cluster")
    labels = tuple(label for label, _ in items)
    vectors = [np.asarray(vec, dtype=np.float64) for _, vec in items]
    length = vectors[0].shape[0]
    if length < 1 or any(v.ndim != 1 or v.shape[0] != length for v in vectors):
        raise ValueError("spectra must be equal-length nonempty vectors")
    merged = _scipy_linkage(np.vstack(vectors), method="complete",
                            metric="euclidean")
    merges = tuple((int(a), int(b), float(h)) for a, b, h, _ in merged)
    return Dendrogram(leaves=labels, merges=merges)


def rho_mode_comparison(model: GraphonModel, n: int, nu: float, trials: int,
                        seed: int) -> RhoModeComparison:
    """Top eigenvalue normalized by the population density versus by the
    estimated density, over paired simulated graphs.

    Reported as-is for external analysis; no ordering of the two variances
    is asserted.
    """
    rho_0, mode = rho_known(model, nu, seed=int(derive_key(seed, 3)))
    cell_model = model.with_sparsity(ConstantSparsity(nu))
    known = np.empty(trials)
    estimated = np.empty(trials)
    for t in range(trials):
        graph = sample_graph(cell_model, n, int(derive_key(seed, 4, t)))
        lam = top_eigenvalues(graph, SpectrumRequest(1, 0)).top[0]
        known[t] = lam / (n * rho_0)
        estimated[t] = lam / (n * rho_hat(graph))
    return RhoModeComparison(known=known, estimated=estimated,
                             rho_known=rho_0, rho_mode=mode)
