"""Community detection in heterogeneous multi-relational networks.

Networks mix node types, edge types, and k-way hyperedges; partitions are
scored by a composite of per-subnetwork modularities and optimized with an
adapted Louvain heuristic or its constrained divide-and-rule variant.
"""
from .model import (
    HeteroNetwork,
    NetworkBuilder,
    NodeRef,
    NodeTypeTable,
    Partition,
    Subnetwork,
    aggregate,
    counterparts,
)
from .formats import (
    HMRNFormatError,
    parse_hmrn,
    parse_partition,
    serialize_hmrn,
    write_partition,
)
from .modularity import (
    EvaluationState,
    ModularityReport,
    WeightingScheme,
    composite_modularity,
    kpartite_modularity,
    move_gain,
    unipartite_modularity,
)
from .optimize import (
    ConstraintGroups,
    LouvainCResult,
    LouvainResult,
    OptimizerConfig,
    detect_subnetwork_communities,
    find_constraints,
    format_timings,
    louvain,
    louvain_c,
)
from .baselines import (
    ProjectionResult,
    baseline_detect,
    naive_simp,
    naive_simp_combined,
    project_common_neighbors,
    project_jaccard,
)
from .benchmark import (
    DEFAULT_SPEC_TEXT,
    BenchmarkRow,
    PatternSpec,
    default_pattern_spec,
    generate_planted,
    nmi,
    nmi_per_type,
    parse_pattern_spec,
    run_noise_sweep,
    run_scaling_sweep,
    scale_spec,
    write_rows_csv,
)
from .estimators import (
    CompositeLouvain,
    ConstrainedCompositeLouvain,
    NaiveSimplification,
    ProjectionLouvain,
    check_network,
)

__version__ = "0.1.0"
