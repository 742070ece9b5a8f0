"""Graph topology learning and physically defined graph solvers.

Learn weight matrices and Laplacians from vertex signals (correlation,
sparse regression, graphical LASSO, smoothness, spectral fits), solve
systems defined on graphs (circuits, random walks, diffusion, label
spread), and run the two application pipelines: spectral portfolio cuts
and flow-based population inference.
"""

from .core import (
    DirectedGraph,
    Graph,
    Laplacian,
    NumericalError,
    RankDeficiencyWarning,
    SourceVector,
    SpectralDecomp,
    eig_sym,
    laplacian,
    pseudo_inverse,
    smoothness,
)
from .geometric import (
    KernelSpec,
    VertexCloud,
    generalized_distance,
    geometric_weights,
    similarity_distances,
    similarity_weights,
    swiss_roll_graph,
)
from .io import (
    read_graph_json,
    read_directed_graph_json,
    read_matrix_csv,
    read_vector_csv,
    write_graph_json,
    write_matrix_csv,
    write_vector_csv,
)
from .lattice import (
    Lattice,
    SamplingMap,
    kron_sum_adjacency,
    path_adjacency,
    separability_check,
    separable_gdft,
    subsample,
)
from .learning import (
    BetaMatrix,
    ObservationMatrix,
    PolyFitConfig,
    correlation_matrix,
    laplacian_to_weights,
    learn_from_sources,
    neighborhood_regression,
    polynomial_fit_eigenvalues,
    smooth_learn,
    spectral_topology_full,
    symmetrize_geometric,
    weight_mse_db,
)
from .metro import FlowVector, betweenness, closeness_vitality, fick_population
from .physical import (
    BoundaryCondition,
    PageRankResult,
    absorbing_probabilities,
    circuit_solve,
    commute_time,
    effective_resistance,
    hitting_times,
    label_propagation,
    monte_carlo_hitting,
    pagerank,
    sparse_source_denoise,
    walk_steady_state,
)
from .portfolio import (
    Bisection,
    CutNode,
    CutTree,
    ReturnSeries,
    allocate,
    cut_value,
    market_graph,
    min_variance_weights,
    repeated_cuts,
    sharpe,
    spectral_bisect,
)
from .simulate import MODES, SimSpec, simulate
from .solvers import (
    GlassoConfig,
    LassoConfig,
    LassoResult,
    glasso,
    lasso_ista,
    normalize_precision,
    precision_matrix,
    soft_threshold,
)
from .verify import run_suite

__version__ = "0.1.0"

__all__ = [
    "BetaMatrix",
    "Bisection",
    "BoundaryCondition",
    "CutNode",
    "CutTree",
    "DirectedGraph",
    "FlowVector",
    "GlassoConfig",
    "Graph",
    "KernelSpec",
    "Laplacian",
    "LassoConfig",
    "LassoResult",
    "Lattice",
    "MODES",
    "NumericalError",
    "ObservationMatrix",
    "PageRankResult",
    "PolyFitConfig",
    "RankDeficiencyWarning",
    "ReturnSeries",
    "SamplingMap",
    "SimSpec",
    "SourceVector",
    "SpectralDecomp",
    "VertexCloud",
    "absorbing_probabilities",
    "allocate",
    "betweenness",
    "circuit_solve",
    "closeness_vitality",
    "commute_time",
    "correlation_matrix",
    "cut_value",
    "effective_resistance",
    "eig_sym",
    "fick_population",
    "generalized_distance",
    "geometric_weights",
    "glasso",
    "hitting_times",
    "kron_sum_adjacency",
    "label_propagation",
    "laplacian",
    "laplacian_to_weights",
    "lasso_ista",
    "learn_from_sources",
    "market_graph",
    "min_variance_weights",
    "monte_carlo_hitting",
    "neighborhood_regression",
    "normalize_precision",
    "pagerank",
    "path_adjacency",
    "polynomial_fit_eigenvalues",
    "precision_matrix",
    "pseudo_inverse",
    "read_directed_graph_json",
    "read_graph_json",
    "read_matrix_csv",
    "read_vector_csv",
    "repeated_cuts",
    "run_suite",
    "separability_check",
    "separable_gdft",
    "sharpe",
    "similarity_distances",
    "similarity_weights",
    "simulate",
    "smooth_learn",
    "smoothness",
    "soft_threshold",
    "sparse_source_denoise",
    "spectral_bisect",
    "spectral_topology_full",
    "subsample",
    "swiss_roll_graph",
    "symmetrize_geometric",
    "walk_steady_state",
    "weight_mse_db",
    "write_graph_json",
    "write_matrix_csv",
    "write_vector_csv",
]
