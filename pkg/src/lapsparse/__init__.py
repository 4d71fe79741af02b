"""lapsparse: sparsify dense weighted graphs while preserving connectivity.

Graph containers and Laplacians live in :mod:`lapsparse.graph`, eigen
machinery in :mod:`lapsparse.spectral`, the six removal strategies (as
scikit-learn style estimators and as functions) in
:mod:`lapsparse.sparsifiers`, benchmarks in :mod:`lapsparse.metrics`, and
file formats in :mod:`lapsparse.graph_io`.
"""

from .exceptions import (
    BudgetExceedsEdgesError,
    DegenerateFeaturesWarning,
    DimensionMismatchError,
    DuplicateEdgeError,
    EdgeNotFoundError,
    IndexOutOfRangeError,
    InfeasibleBoundsError,
    IoError,
    LapsparseError,
    NegativeWeightError,
    NoConvergenceError,
    ParseError,
    SelfLoopError,
    SizeCapExceededError,
    ZeroWeightEdgeError,
)
from .graph import (
    WeightedGraph,
    bridges,
    build_graph,
    complete_graph_from_kernel,
    degree_sequence,
    is_connected,
    laplacian_of,
    remove_edge,
)
from .graph_io import (
    dumps_graph,
    load_graph,
    load_sample_graph,
    loads_graph,
    sample_graph_path,
    save_graph,
)
from .metrics import (
    ComparisonCell,
    ComparisonReport,
    TimingRow,
    bound_bracket_rate,
    calibrate_sparsifier,
    default_sparsity_levels,
    edge_overlap,
    epsilon_for_budget,
    filtering_error,
    lambda2_of,
    make_ensemble,
    run_comparison,
    timing_scaling,
)
from .sparsifiers import (
    ApspGreedySparsifier,
    BaseSparsifier,
    EpsilonSparsifier,
    FiedlerExactSparsifier,
    FiedlerFastSparsifier,
    HybridSparsifier,
    KnnSparsifier,
    METHODS,
    RemovalRecord,
    SparsificationTrace,
    apsp_greedy_sparsify,
    apsp_total,
    epsilon_sparsify,
    fiedler_fast_sparsify,
    fiedler_greedy_sparsify,
    hybrid_sparsify,
    knn_sparsify,
    make_sparsifier,
)
from .spectral import (
    FiedlerPair,
    Spectrum,
    apply_filter,
    candidate_lambda2,
    dense_spectrum,
    eigenvalue_bound,
    fiedler_pair,
    gft,
    igft,
    perturbation_matrix,
    perturbation_score,
)

__version__ = "0.1.0"
