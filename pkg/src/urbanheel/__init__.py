"""Urban multiplex transport network resilience toolkit."""

from .core import (
    FlatGraph,
    InvalidInputError,
    LabeledEdge,
    LayerId,
    NotFoundError,
    ReachabilitySet,
    UrbanMultiplexNetwork,
    ZoneId,
    component_sizes,
    flatten,
    largest_component_size,
    neighbors,
    reachable_count,
    reachable_set,
    remove_edge,
)
from .metrics import (
    HeelScore,
    HeelWitness,
    Histogram,
    LayerRelevanceScore,
    MetricConfig,
    MetricSnapshot,
    PairConnectivity,
    achilles_heel,
    compute_snapshot,
    connection_intensity,
    connection_redundancy,
    connectivity_distribution,
    global_connectivity,
    heel_ranking,
    heelness,
    layer_relevance,
    pair_connectivity_map,
)
from .percolation import (
    PercolationCurve,
    RemovalStrategy,
    first_disruption,
    percolate,
    rank_edges,
)

__version__ = "0.1.0"
