"""Map spike-annotated SNN workloads onto fixed-size neuromorphic crossbars."""

from .estimators import (
    ExhaustivePartitioner,
    GreedyPartitioner,
    HillClimbPartitioner,
    PSOPartitioner,
)
from .exceptions import (
    CrossmapError,
    GraphFormatError,
    GraphValidationError,
    InfeasibleError,
    InstanceTooLargeError,
)
from .graph import SpikeGraph, TopologySpec, generate_feedforward, load_graph, save_graph
from .greedy import greedy_partition
from .hill_climb import climb, hco_partition, neighborhood
from .partition import (
    CostReport,
    HardwareConfig,
    Partition,
    cluster_load,
    max_cost,
    mean_load,
    validate,
)
from .pso import PsoConfig, decode, pso_partition

__version__ = "0.1.0"

__all__ = [
    "CostReport",
    "CrossmapError",
    "ExhaustivePartitioner",
    "GraphFormatError",
    "GraphValidationError",
    "GreedyPartitioner",
    "HardwareConfig",
    "HillClimbPartitioner",
    "InfeasibleError",
    "InstanceTooLargeError",
    "PSOPartitioner",
    "Partition",
    "PsoConfig",
    "SpikeGraph",
    "TopologySpec",
    "climb",
    "cluster_load",
    "decode",
    "generate_feedforward",
    "greedy_partition",
    "hco_partition",
    "load_graph",
    "max_cost",
    "mean_load",
    "neighborhood",
    "pso_partition",
    "save_graph",
    "validate",
]
