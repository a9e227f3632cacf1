"""metric_forge: low-distortion embeddings of finite metric spaces.

Validated metrics and graph metrics, randomized embeddings into l1/l2,
exact minimum Euclidean distortion with dual lower-bound certificates,
dominating tree distributions, the concurrent-flow / sparsest-cut pipeline,
and bandwidth heuristics, each paired with a brute-force oracle at desk
scale.
"""

from .bandwidth import (
    Labeling,
    bandwidth_bruteforce,
    bandwidth_of,
    beta_lower_bound,
    feige_label,
)
from .c2 import (
    C2Result,
    DualCertificate,
    c2_sdp,
    certificate_value,
    greedy_distance_matching,
    q_expander,
    q_hypercube,
    ramsey_subset,
)
from .core import (
    MetricMap,
    MetricSpace,
    PointSet,
    Semimetric,
    WeightedGraph,
    cut_metric,
    distortion,
    frechet_linf_embed,
    is_square_l2,
    pairwise_distances,
    shortest_path_metric,
    validate_metric,
    validate_semimetric,
)
from .embed import BourgainParams, JlParams, bourgain_embed, jl_project
from .families import (
    FamilySpec,
    complete_binary_tree,
    complete_graph,
    cycle,
    edge_expansion_bruteforce,
    generate,
    girth,
    hypercube,
    path,
    random_regular,
    spectral_expansion,
    star,
)
from .flowcut import (
    CutReport,
    DualMetricResult,
    FlowInstance,
    FlowResult,
    dual_metric,
    evaluate_cut,
    max_concurrent_flow,
    round_to_cut,
    sparsest_cut_bruteforce,
)
from .hst import (
    HstTree,
    TreeDistribution,
    estimate_stretch,
    sample_distribution,
    sample_hst,
    tree_metric,
)
from .linalg import jacobi_eigh, jacobi_eigvalsh
from .seeding import derive_seed, spawn_seeds, stream

__version__ = "0.1.0"
