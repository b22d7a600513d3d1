"""Map-equation community detection at arbitrary Markov times, with
bipartite dynamics and a sampling-based fast projection."""

__version__ = "0.1.0"

from .network import FEATURE, PRIMARY, Network, NetworkError, TransitionView, project_bipartite_full, transition_view
from .io import ParseError, load_network, save_network
from .flow import (
    DenseTransition,
    FlowModel,
    bipartite_flow_model,
    build_flow_model,
    dense_continuous,
    dense_linearized,
    flow_model_from_dense,
    stationary_visit_rates,
)
from .mapeq import (
    Hierarchy,
    ModuleFlowStats,
    Partition,
    hierarchical_map_equation,
    index_codelength,
    map_equation,
    module_codelength,
    module_stats,
)
from .search import SearchConfig, SearchResult, aggregate, local_move_pass, optimize
from .entropy import EntropySample, compression_gap, exact_entropy_rate, sampled_entropy_rate
from .projection import FastProjectionParams, candidate_stats, fast_projection
from .metrics import leaf_nmi, nmi
from .estimators import FastProjection, MapEquationClustering

__all__ = [
    "FEATURE", "PRIMARY", "Network", "NetworkError", "TransitionView", "project_bipartite_full",
    "transition_view", "ParseError", "load_network", "save_network", "DenseTransition",
    "FlowModel", "bipartite_flow_model", "build_flow_model", "dense_continuous",
    "dense_linearized", "flow_model_from_dense", "stationary_visit_rates", "Hierarchy",
    "ModuleFlowStats", "Partition", "hierarchical_map_equation", "index_codelength",
    "map_equation", "module_codelength", "module_stats", "SearchConfig", "SearchResult",
    "aggregate", "local_move_pass", "optimize", "EntropySample", "compression_gap",
    "exact_entropy_rate", "sampled_entropy_rate", "FastProjectionParams", "candidate_stats",
    "fast_projection", "leaf_nmi", "nmi", "FastProjection", "MapEquationClustering",
]
