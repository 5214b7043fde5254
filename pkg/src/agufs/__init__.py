"""Adaptive-graph unsupervised feature selection.

Alternating minimization over a sparse projection W, a relaxed cluster
indicator F, and an adaptively reweighted k-sparse similarity graph S,
with feature ranking by projection row norms and a clustering-based
evaluation harness.
"""

__version__ = "0.1.0"

from .driver import (
    AgufsConfig,
    FeatureRanking,
    SolverTrace,
    compute_bias,
    global_objective,
    rank_features,
    run_agufs,
)
from .data import Dataset, load_csv, save_csv, standardize
from .errors import (
    AgufsError,
    DegenerateSolutionWarning,
    NotPositiveDefiniteError,
    NumericError,
    ParseError,
)
from .evaluation import (
    ClusteringResult,
    EvalReport,
    clustering_accuracy,
    evaluate_selection,
    kmeans,
    normalized_mutual_information,
)
from .fsolver import FSolverConfig, build_qc, objective_f, solve_f
from .graph import (
    GraphLaplacian,
    SimilarityGraph,
    build_laplacian,
    combined_affinity_cost,
    pairwise_projected_distances,
    update_similarity,
    update_similarity_row,
)
from .synthetic import make_blobs, normalize_samples
from .wsolver import WInnerTrace, WSolverConfig, build_rt_prime, objective_w, solve_w

__all__ = [
    "AgufsConfig",
    "AgufsError",
    "ClusteringResult",
    "Dataset",
    "DegenerateSolutionWarning",
    "EvalReport",
    "FSolverConfig",
    "FeatureRanking",
    "GraphLaplacian",
    "NotPositiveDefiniteError",
    "NumericError",
    "ParseError",
    "SimilarityGraph",
    "SolverTrace",
    "WInnerTrace",
    "WSolverConfig",
    "build_laplacian",
    "build_qc",
    "build_rt_prime",
    "clustering_accuracy",
    "combined_affinity_cost",
    "compute_bias",
    "evaluate_selection",
    "global_objective",
    "kmeans",
    "load_csv",
    "make_blobs",
    "normalize_samples",
    "normalized_mutual_information",
    "objective_f",
    "objective_w",
    "pairwise_projected_distances",
    "rank_features",
    "run_agufs",
    "save_csv",
    "solve_f",
    "solve_w",
    "standardize",
    "update_similarity",
    "update_similarity_row",
    "__version__",
]
