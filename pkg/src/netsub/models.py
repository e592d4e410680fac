"""Sparse graphon models and random graph generation.

A model couples a dense symmetric kernel h on latent coordinates with a
sparsity schedule nu_n.  Edges of an n-vertex graph are independent
Bernoulli draws with probability min(nu_n * h(xi_i, xi_j), 1), where the
latent xi are i.i.d. from the kernel's latent law.  Three kernel families
are supported:

* BlockKernel: K-class stochastic block model, latents Uniform[0,1]
  partitioned by the cumulative class proportions.
* LatentKernel: a named smooth kernel; currently the Gaussian
  radial kernel exp(-bandwidth * (u - v)^2) with uniform or standard
  normal latents.
* LowRankKernel: an explicit finite eigen-expansion over a cosine basis
  on [0,1]; values are truncated into [0,1] after scaling, so supplying a
  kernel that dips below zero silently censors at zero.

Generation derives one uniform per vertex pair from (seed, i, j) with a
counter-based mixer, so the realized graph is a pure function of
(model, n, seed) no matter how the pair loop is scheduled.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from ._rng import derive_key, uniforms
from .graph import _build

_LATENT_LAWS = ("uniform_01", "standard_normal")
_KERNEL_FAMILIES = ("gaussian_rbf",)
_ROW_BLOCK = 512


class ModelError(ValueError):
    """Invalid model parameterization or unsupported kernel family."""


class UnavailableParameter(RuntimeError):
    """A requested population quantity cannot be computed for this model."""


# ---------------------------------------------------------------------------
# kernel and sparsity variants


@dataclass(frozen=True, eq=False)
class BlockKernel:
    """Stochastic block model kernel: B[a, b] within-pair probability scale."""

    B: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B, dtype=np.float64)
        pi = np.asarray(self.pi, dtype=np.float64)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "pi", pi)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ModelError("block matrix must be square")
        if pi.ndim != 1 or pi.shape[0] != B.shape[0]:
            raise ModelError("class proportions must match block matrix size")
        if not np.allclose(B, B.T, atol=0.0, rtol=0.0):
            raise ModelError("block matrix must be symmetric")
        if B.min() < 0.0 or B.max() > 1.0:
            raise ModelError("block matrix entries must lie in [0, 1]")
        if pi.min() < 0.0 or abs(pi.sum() - 1.0) > 1e-12:
            raise ModelError("class proportions must be nonnegative and sum to 1")
        B.setflags(write=False)
        pi.setflags(write=False)

    @property
    def boundaries(self) -> np.ndarray:
        return np.cumsum(self.pi)

    def blocks_of(self, u) -> np.ndarray:
        z = np.searchsorted(self.boundaries, np.asarray(u, dtype=np.float64),
                            side="right")
        return np.minimum(z, len(self.pi) - 1)


@dataclass(frozen=True)
class LatentKernel:
    """Named smooth kernel on latent coordinates."""

    family: str = "gaussian_rbf"
    bandwidth: float = 25.0
    latent_law: str = "standard_normal"

    def __post_init__(self):
        if self.family not in _KERNEL_FAMILIES:
            raise ModelError(f"unknown kernel family {self.family!r}")
        if self.latent_law not in _LATENT_LAWS:
            raise ModelError(f"unknown latent law {self.latent_law!r}")
        if self.bandwidth <= 0:
            raise ModelError("bandwidth must be positive")


@dataclass(frozen=True, eq=False)
class LowRankKernel:
    """Finite-rank kernel sum(ev[r] * phi_r(u) * phi_r(v)).

    Eigenfunctions are linear combinations of the orthonormal cosine basis
    e_0 = 1, e_k(u) = sqrt(2) cos(k pi u) on [0,1].  ``coefficients`` is an
    (r, m) matrix of basis coefficients; by default eigenfunction r is the
    basis function e_r itself.  Latents are Uniform[0,1].
    """

    eigenvalues: tuple
    basis: str = "cosine"
    coefficients: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues",
                           tuple(float(v) for v in self.eigenvalues))
        if self.basis != "cosine":
            raise ModelError(f"unknown eigenfunction basis {self.basis!r}")
        if not self.eigenvalues or any(v == 0.0 for v in self.eigenvalues):
            raise ModelError("eigenvalue list must be nonempty and nonzero")
        r = len(self.eigenvalues)
        if self.coefficients is None:
            coeff = np.eye(r)
        else:
            coeff = np.asarray(self.coefficients, dtype=np.float64)
            if coeff.ndim != 2 or coeff.shape[0] != r:
                raise ModelError("coefficient matrix must have one row per eigenvalue")
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    def eigenfunctions_at(self, u) -> np.ndarray:
        """Matrix of eigenfunction values, shape (len(u), rank)."""
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))
        m = self.coefficients.shape[1]
        basis = np.empty((u.shape[0], m))
        basis[:, 0] = 1.0
        for k in range(1, m):
            basis[:, k] = math.sqrt(2.0) * np.cos(k * math.pi * u)
        return basis @ self.coefficients.T


@dataclass(frozen=True)
class ExponentSparsity:
    """nu_n = n ** (-gamma)."""

    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ModelError("sparsity exponent must be nonnegative")


@dataclass(frozen=True)
class ConstantSparsity:
    """nu_n = nu for all n."""

    nu: float

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise ModelError("constant sparsity must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class GraphonModel:
    kernel: object
    sparsity: object = field(default_factory=lambda: ConstantSparsity(1.0))

    def __post_init__(self):
        if not isinstance(self.kernel, (BlockKernel, LatentKernel, LowRankKernel)):
            raise ModelError("unsupported kernel type")
        if not isinstance(self.sparsity, (ExponentSparsity, ConstantSparsity)):
            raise ModelError("unsupported sparsity type")

    def with_sparsity(self, sparsity) -> "GraphonModel":
        return replace(self, sparsity=sparsity)


def nu_at(model: GraphonModel, n: int) -> float:
    """Sparsity factor of the model at sample size n."""
    s = model.sparsity
    if isinstance(s, ExponentSparsity):
        return float(n) ** (-s.gamma)
    return s.nu


# ---------------------------------------------------------------------------
# kernel evaluation


def dense_kernel(model: GraphonModel, u, v) -> np.ndarray:
    """Evaluate the dense (unsparsified, uncensored) kernel h(u, v)."""
    k = model.kernel
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if isinstance(k, BlockKernel):
        return k.B[k.blocks_of(u), k.blocks_of(v)]
    if isinstance(k, LatentKernel):
        return np.exp(-k.bandwidth * (u - v) ** 2)
    if isinstance(k, LowRankKernel):
        shape = np.broadcast(u, v).shape
        fu = k.eigenfunctions_at(np.ravel(np.broadcast_to(u, shape)))
        fv = k.eigenfunctions_at(np.ravel(np.broadcast_to(v, shape)))
        # elementwise product first: bitwise symmetric in (u, v)
        vals = (fu * fv) @ np.asarray(k.eigenvalues)
        return vals.reshape(shape)
    raise ModelError("unsupported kernel type")


def h_value(model: GraphonModel, u, v, nu: float):
    """Edge probability min(nu * h(u, v), 1), truncated into [0, 1]."""
    if nu < 0:
        raise ModelError("sparsity factor must be nonnegative")
    out = np.clip(nu * dense_kernel(model, u, v), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def dense_kernel_mean(model: GraphonModel) -> float:
    """E[h(xi, xi')] under the latent law, in closed form."""
    k = model.kernel
    if isinstance(k, BlockKernel):
        return float(k.pi @ k.B @ k.pi)
    if isinstance(k, LatentKernel):
        b = k.bandwidth
        if k.latent_law == "standard_normal":
            # xi - xi' is N(0, 2); E exp(-b D^2) = (1 + 4b)^(-1/2)
            return 1.0 / math.sqrt(1.0 + 4.0 * b)
        # uniform difference has triangular density on [-1, 1]
        return (math.sqrt(math.pi / b) * math.erf(math.sqrt(b))
                - (1.0 - math.exp(-b)) / b)
    if isinstance(k, LowRankKernel):
        # only the constant basis function has nonzero integral
        c0 = k.coefficients[:, 0]
        return float(np.sum(np.asarray(k.eigenvalues) * c0 * c0))
    raise ModelError("unsupported kernel type")


def kernel_sup(model: GraphonModel):
    """Exact supremum of the dense kernel, or None if unknown."""
    k = model.kernel
    if isinstance(k, BlockKernel):
        return float(k.B.max())
    if isinstance(k, LatentKernel):
        return 1.0
    return None


# ---------------------------------------------------------------------------
# generation


@dataclass(frozen=True)
class GenerationDiagnostics:
    censored_pairs: int
    total_pairs: int

    @property
    def censored_fraction(self) -> float:
        return self.censored_pairs / self.total_pairs if self.total_pairs else 0.0


def _draw_latents(model: GraphonModel, n: int, key) -> np.ndarray:
    u = uniforms(key, np.arange(n, dtype=np.uint64))
    k = model.kernel
    if isinstance(k, LatentKernel) and k.latent_law == "standard_normal":
        return ndtri(u)
    return u


def sample_graph(model: GraphonModel, n: int, seed: int,
                 return_diagnostics: bool = False):
    """Draw one graph from the model; deterministic in (model, n, seed).

    Each vertex pair consumes one uniform addressed by (seed, i, j), so the
    result does not depend on how the pair blocks are traversed.  When more
    than 1% of pairs have their edge probability censored at 1, a warning
    is emitted; the exact count is available via ``return_diagnostics``.
    """
    if n < 1:
        raise ModelError("vertex count must be at least 1")
    nu = nu_at(model, n)
    latent_key = derive_key(seed, 1)
    edge_key = derive_key(seed, 2)
    kern = model.kernel
    if isinstance(kern, BlockKernel):
        z = kern.blocks_of(uniforms(latent_key, np.arange(n, dtype=np.uint64)))
        scaled = nu * kern.B
    else:
        xi = _draw_latents(model, n, latent_key)
        if isinstance(kern, LowRankKernel):
            phi_plain = kern.eigenfunctions_at(xi)
            phi = phi_plain * np.asarray(kern.eigenvalues)

    rows_acc, cols_acc = [], []
    censored = 0
    col_ids = np.arange(n, dtype=np.uint64)[None, :]
    for i0 in range(0, n, _ROW_BLOCK):
        i1 = min(i0 + _ROW_BLOCK, n)
        if isinstance(kern, BlockKernel):
            raw = scaled[z[i0:i1]][:, z]
        elif isinstance(kern, LatentKernel):
            raw = nu * np.exp(-kern.bandwidth * (xi[i0:i1, None] - xi[None, :]) ** 2)
        else:
            raw = nu * (phi[i0:i1] @ phi_plain.T)
        row_ids = np.arange(i0, i1, dtype=np.uint64)[:, None]
        upper = col_ids > row_ids
        censored += int(np.count_nonzero((raw > 1.0) & upper))
        p = np.clip(raw, 0.0, 1.0)
        with np.errstate(over="ignore"):
            pair_counter = row_ids * np.uint64(n) + col_ids
        u = uniforms(edge_key, pair_counter)
        r, c = np.nonzero((u < p) & upper)
        rows_acc.append(r.astype(np.int64) + i0)
        cols_acc.append(c.astype(np.int64))

    lo = np.concatenate(rows_acc)
    hi = np.concatenate(cols_acc)
    graph = _build(n, np.concatenate([lo, hi]), np.concatenate([hi, lo]))
    diag = GenerationDiagnostics(censored_pairs=censored,
                                 total_pairs=n * (n - 1) // 2)
    if diag.total_pairs and diag.censored_fraction > 0.01:
        warnings.warn(
            f"{diag.censored_pairs} of {diag.total_pairs} vertex pairs "
            f"({100 * diag.censored_fraction:.1f}%) had edge probability censored at 1",
            stacklevel=2)
    if return_diagnostics:
        return graph, diag
    return graph


# ---------------------------------------------------------------------------
# population quantities


def rho_population(model: GraphonModel, n: int, mc_pairs: int, seed: int) -> float:
    """Monte Carlo estimate of the edge probability P(A_ij = 1) at size n.

    Averages the censored edge probability over mc_pairs independent latent
    pairs, so censoring is handled exactly.  Standard error is at most
    0.5 / sqrt(mc_pairs).
    """
    if mc_pairs < 1:
        raise ModelError("mc_pairs must be at least 1")
    nu = nu_at(model, n)
    key_u = derive_key(seed, 11)
    key_v = derive_key(seed, 12)
    total = 0.0
    done = 0
    while done < mc_pairs:
        m = min(mc_pairs - done, 1_000_000)
        idx = np.arange(done, done + m, dtype=np.uint64)
        u = _transform_latents(model, uniforms(key_u, idx))
        v = _transform_latents(model, uniforms(key_v, idx))
        total += float(np.sum(h_value(model, u, v, nu)))
        done += m
    return total / mc_pairs


def _transform_latents(model: GraphonModel, u: np.ndarray) -> np.ndarray:
    k = model.kernel
    if isinstance(k, LatentKernel) and k.latent_law == "standard_normal":
        return ndtri(u)
    return u


def rho_known(model: GraphonModel, nu: float, mc_pairs: int = 500_000,
              seed: int = 0):
    """Population edge probability for a given sparsity factor.

    Returns (value, mode).  Uses the closed-form dense kernel mean whenever
    censoring provably cannot occur; otherwise falls back to Monte Carlo
    over latent pairs (mode "monte-carlo").
    """
    sup = kernel_sup(model)
    if sup is not None and nu * sup <= 1.0:
        return nu * dense_kernel_mean(model), "dense-mean"
    idx = np.arange(mc_pairs, dtype=np.uint64)
    u = _transform_latents(model, uniforms(derive_key(seed, 11), idx))
    v = _transform_latents(model, uniforms(derive_key(seed, 12), idx))
    return float(np.mean(h_value(model, u, v, nu))), "monte-carlo"


@dataclass(frozen=True)
class PopulationSpectrum:
    """Nonzero eigenvalues of the normalized kernel integral operator."""

    positive: np.ndarray  # descending
    negative: np.ndarray  # ascending (most negative first)
    method: str
    approximate: bool

    def at(self, r: int) -> float:
        if r > 0:
            if r > self.positive.size:
                raise UnavailableParameter(f"operator has no positive eigenvalue {r}")
            return float(self.positive[r - 1])
        if r < 0:
            if -r > self.negative.size:
                raise UnavailableParameter(f"operator has no negative eigenvalue {r}")
            return float(self.negative[-r - 1])
        raise ValueError("eigenvalue index must be nonzero")


def _latent_grid(model: GraphonModel, m: int) -> np.ndarray:
    u = (np.arange(m) + 0.5) / m
    return _transform_latents(model, u)


def _grid_kernel_matrix(model: GraphonModel, grid: np.ndarray) -> np.ndarray:
    """Dense kernel evaluated on a grid x grid mesh, without huge temporaries."""
    k = model.kernel
    if isinstance(k, BlockKernel):
        z = k.blocks_of(grid)
        return k.B[z][:, z]
    if isinstance(k, LatentKernel):
        return np.exp(-k.bandwidth * (grid[:, None] - grid[None, :]) ** 2)
    phi = k.eigenfunctions_at(grid)
    return (phi * np.asarray(k.eigenvalues)) @ phi.T


def population_eigenvalues(model: GraphonModel, k_pos: int, k_neg: int,
                           grid_size: int = 2000) -> PopulationSpectrum:
    """Extreme eigenvalues of the integral operator of w = h / E[h].

    Block kernels reduce exactly to a K x K symmetric eigenproblem; all
    other kernels go through a quadrature approximation on a quantile-
    spaced latent grid and are flagged approximate.  Zero eigenvalues are
    dropped, so fewer than the requested number may be returned.
    """
    if k_pos < 0 or k_neg < 0 or k_pos + k_neg < 1:
        raise ModelError("must request at least one eigenvalue")
    mean = dense_kernel_mean(model)
    if mean <= 0:
        raise UnavailableParameter("kernel mean is not positive")
    k = model.kernel
    if isinstance(k, BlockKernel):
        root = np.sqrt(k.pi)
        sym = root[:, None] * (k.B / mean) * root[None, :]
        lam = np.linalg.eigvalsh(sym)
        method, approximate, zero_tol = "exact-block", False, 1e-12
    else:
        grid = _latent_grid(model, grid_size)
        kmat = _grid_kernel_matrix(model, grid) / mean
        lam = np.linalg.eigvalsh(kmat / grid_size)
        method, approximate, zero_tol = "nystrom", True, 1e-9
    scale = max(1.0, float(np.abs(lam).max()))
    pos = np.sort(lam[lam > zero_tol * scale])[::-1]
    neg = np.sort(lam[lam < -zero_tol * scale])
    return PopulationSpectrum(positive=pos[:k_pos], negative=neg[:k_neg],
                              method=method, approximate=approximate)


def population_count_moment(model: GraphonModel, motif, grid_size: int = 2000) -> float:
    """Population value of the normalized motif count functional.

    This is the moment E[prod over motif edges of w(xi_i, xi_j)] of the
    normalized kernel.  Exact for block kernels (sum over class
    assignments); quadrature-based for the other families, where only
    stars and cycles are supported.
    """
    mean = dense_kernel_mean(model)
    if mean <= 0:
        raise UnavailableParameter("kernel mean is not positive")
    k = model.kernel
    if isinstance(k, BlockKernel):
        w = k.B / mean
        pi = k.pi
        nclass = len(pi)
        total = 0.0
        for assign in np.ndindex(*([nclass] * motif.vertices)):
            weight = 1.0
            for a in assign:
                weight *= pi[a]
            prod = 1.0
            for (i, j) in motif.edges:
                prod *= w[assign[i], assign[j]]
            total += weight * prod
        return float(total)
    if motif.name == "edge":
        return 1.0
    grid = _latent_grid(model, grid_size)
    kmat = _grid_kernel_matrix(model, grid) / mean
    if motif.name in ("twostar", "threestar", "fourstar"):
        leaves = motif.edge_count
        mvec = kmat.mean(axis=1)
        return float(np.mean(mvec ** leaves))
    if motif.name in ("triangle", "cycle4", "cycle5"):
        length = motif.vertices
        lam = np.linalg.eigvalsh(kmat / grid_size)
        return float(np.sum(lam ** length))
    raise UnavailableParameter(f"no population oracle for motif {motif.name!r}")


def model_label(model: GraphonModel) -> str:
    k = model.kernel
    if isinstance(k, BlockKernel):
        return f"sbm(K={len(k.pi)})"
    if isinstance(k, LatentKernel):
        return f"{k.family}(bandwidth={k.bandwidth:g},{k.latent_law})"
    return f"lowrank(rank={len(k.eigenvalues)})"


def sparsity_label(sparsity) -> str:
    if isinstance(sparsity, ExponentSparsity):
        return f"exponent:{sparsity.gamma:g}"
    return f"constant:{sparsity.nu:g}"


def sbm_study_model(sparsity=None) -> GraphonModel:
    """The three-class block model used throughout the simulation study."""
    kernel = BlockKernel(
        B=np.array([[1 / 4, 1 / 2, 1 / 4],
                    [1 / 2, 1 / 4, 1 / 4],
                    [1 / 4, 1 / 4, 1 / 6]]),
        pi=np.array([0.3, 0.3, 0.4]))
    return GraphonModel(kernel=kernel,
                        sparsity=sparsity or ConstantSparsity(1.0))


def glsm_study_model(sparsity=None) -> GraphonModel:
    """Gaussian latent space model: bandwidth 25, standard normal latents."""
    kernel = LatentKernel(family="gaussian_rbf", bandwidth=25.0,
                          latent_law="standard_normal")
    return GraphonModel(kernel=kernel,
                        sparsity=sparsity or ConstantSparsity(1.0))
