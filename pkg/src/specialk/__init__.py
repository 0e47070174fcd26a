"""Spectral clustering that infers the number of clusters.

The similarity matrix is factored into a nonnegative embedding, k-means is
run for increasing k, and each split is checked with a matrix-Bernstein
tail bound.  The search stops at the first k whose split is compatible
with a single cluster.
"""

__version__ = "0.1.0"

from .bound import (CenteredCluster, MergeTestReport, center_scale, cut_value, merge_test,
                    rayleigh, remark1_rayleigh, test_statistic, threshold_rayleigh,
                    zz_top_probability)
from .datagen import Dataset, load_csv, make_blobs, make_circles, make_moons, make_random, save_csv
from .embed import Embedding, decorrelate_columns, project_embedding, spectral_embedding, truncated_eigen
from .errors import InvalidArgumentError, NumericError, ParseError, SpecialKError
from .estimator import EstimateResult, eigengap_baseline, estimate_k, rank_pairs
from .graph import (LaplacianView, SimilarityMatrix, build_eps_graph, build_knn_graph, degrees,
                    neg_laplacian_apply)
from .kmeans import ClusterAssignment, kmeans_fit, similarity_objective
from .metrics import hungarian_match, matched_labels, nmi

__all__ = [
    "CenteredCluster", "ClusterAssignment", "Dataset", "Embedding", "EstimateResult",
    "InvalidArgumentError", "LaplacianView", "MergeTestReport", "NumericError", "ParseError",
    "SimilarityMatrix", "SpecialKError", "build_eps_graph", "build_knn_graph", "center_scale",
    "cut_value", "decorrelate_columns", "degrees", "eigengap_baseline", "estimate_k",
    "hungarian_match", "kmeans_fit", "load_csv", "make_blobs", "make_circles", "make_moons",
    "make_random", "matched_labels", "merge_test", "neg_laplacian_apply", "nmi",
    "project_embedding", "rank_pairs", "rayleigh", "remark1_rayleigh", "save_csv",
    "similarity_objective", "spectral_embedding", "test_statistic", "threshold_rayleigh",
    "truncated_eigen", "zz_top_probability",
]
