"""Small-world physical topologies for multi-channel wireless networks."""

from .experiments import (
    SCENARIOS,
    ScenarioConfig,
    aggregate_seeds,
    run_scenario,
    sweep_channels,
    sweep_radii_ratio,
)
from .geometry import NodeSet, distance, generate_nodes
from .metrics import MetricsReport, characteristic_metrics, clustering_coefficient, shortest_paths_from
from .shortcut import ShortcutParams, build_compound, build_sc_channel, candidate_pairs
from .topology import (
    CompoundTopology,
    Edge,
    build_normal_channel,
    covered_by_edge,
    covered_by_node,
    edge_weight,
    union_adjacency,
)

__version__ = "0.1.0"

__all__ = [
    "SCENARIOS",
    "CompoundTopology",
    "Edge",
    "MetricsReport",
    "NodeSet",
    "ScenarioConfig",
    "ShortcutParams",
    "aggregate_seeds",
    "build_compound",
    "build_normal_channel",
    "build_sc_channel",
    "candidate_pairs",
    "characteristic_metrics",
    "clustering_coefficient",
    "covered_by_edge",
    "covered_by_node",
    "distance",
    "edge_weight",
    "generate_nodes",
    "run_scenario",
    "shortest_paths_from",
    "sweep_channels",
    "sweep_radii_ratio",
    "union_adjacency",
]
