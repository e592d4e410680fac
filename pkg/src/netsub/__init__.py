"""netsub: subsampling inference for networks generated by sparse graphons.

Generate graphs from block, latent-kernel, or low-rank graphon models;
compute spectral and motif-count statistics; approximate their sampling
distributions by vertex subsampling or p-sampling; and run the composite
procedures (confidence intervals, two-sample tests, coverage experiments,
spectra clustering).
"""

from .graph import (Graph, GraphStructureError, complete_graph, empty_graph,
                    graph_from_edges, induced_subgraph, validate_graph)
from .models import (BlockKernel, ConstantSparsity, ExponentSparsity,
                     GenerationDiagnostics, GraphonModel, LatentKernel,
                     LowRankKernel, ModelError, PopulationSpectrum,
                     UnavailableParameter, dense_kernel, dense_kernel_mean,
                     glsm_study_model, h_value, model_label, nu_at,
                     population_count_moment, population_eigenvalues,
                     rho_known, rho_population, sample_graph, sbm_study_model,
                     sparsity_label)
from .spectral import (CountStat, DegenerateStatisticError, EigRatio,
                       Eigenvalue, EigensolverError, EstimatedRho, KnownRho,
                       SpectralGap, Spectrum, SpectrumRequest, StatisticSpec,
                       TracePower, eigen_statistic, normalized_spectrum,
                       rho_hat, top_eigenvalues)
from .counts import (CYCLE4, CYCLE5, EDGE, FOUR_STAR, MOTIFS, THREE_STAR,
                     TRIANGLE, TWO_STAR, Motif, cycle, iso_count, k_star,
                     normalized_count, raw_count)
from .subsample import (ConfidenceInterval, EmpiricalDistribution,
                        PSampleScheme, SubsamplingError, VertexScheme,
                        confidence_interval, evaluate_statistic,
                        one_sided_lower_bound, p_subsample, quantile,
                        subsample_distribution, vertex_subsample)
from .inference import (FAIL_TO_REJECT, REJECT, CoverageCell, CoverageReport,
                        Dendrogram, RhoModeComparison, TwoSampleResult,
                        VertexFraction, cis_disjoint, cluster_spectra,
                        coverage_experiment, node_split, population_target,
                        rho_mode_comparison, select_statistic,
                        two_sample_test)

__version__ = "0.1.0"
