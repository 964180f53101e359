"""sngraph: sparse neighborhood graph indexes for approximate nearest neighbors.

Builds directed proximity graphs by iterative nearest-neighbor selection with
alpha-relaxed pruning (exhaustive or incremental with a degree cap), searches
them with a beam search from the medoid, picks the degree cap analytically
from a probe build, and instruments the whole pipeline (pruning traces, degree
and path statistics, recall) so its scaling behavior can be measured rather
than assumed.
"""

from .dataset import (
    GroundTruth,
    VectorDataset,
    brute_force_knn,
    gen_gmm,
    gen_uniform,
    read_fvecs,
    read_ivecs,
    shuffle_split,
    write_fvecs,
    write_ivecs,
)
from .graph import (
    BuildParams,
    SearchResult,
    SngGraph,
    build_full_sng,
    build_vamana,
    greedy_search,
    load_graph,
    medoid,
    robust_prune,
    save_graph,
    search_many,
    sng_neighbors,
)
from .instrument import (
    DegreeStats,
    PathStats,
    PruningTrace,
    degree_stats,
    mt_first_passage,
    path_length_stats,
    recall_at_k,
    sublinear_progress_check,
)
from .tuner import (
    CostConstants,
    TuneReport,
    construction_cost,
    golden_section_tune,
    marginal_optimal_r,
    optimize_r,
)
from .vecmath import (
    PruneGeometry,
    pruning_probability,
    pruning_probability_bounds,
    pruning_probability_mc,
    reg_inc_beta,
    sample_uniform_ball,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dataset
    "VectorDataset",
    "GroundTruth",
    "gen_uniform",
    "gen_gmm",
    "shuffle_split",
    "brute_force_knn",
    "read_fvecs",
    "write_fvecs",
    "read_ivecs",
    "write_ivecs",
    # graph
    "SngGraph",
    "BuildParams",
    "SearchResult",
    "build_vamana",
    "build_full_sng",
    "sng_neighbors",
    "robust_prune",
    "greedy_search",
    "search_many",
    "medoid",
    "save_graph",
    "load_graph",
    # tuner
    "TuneReport",
    "CostConstants",
    "optimize_r",
    "marginal_optimal_r",
    "construction_cost",
    "golden_section_tune",
    # instrument
    "PruningTrace",
    "DegreeStats",
    "PathStats",
    "degree_stats",
    "path_length_stats",
    "recall_at_k",
    "mt_first_passage",
    "sublinear_progress_check",
    # vecmath
    "PruneGeometry",
    "pruning_probability",
    "pruning_probability_bounds",
    "pruning_probability_mc",
    "reg_inc_beta",
    "sample_uniform_ball",
]
