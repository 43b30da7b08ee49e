"""Attractor, search trajectory and local optima networks for continuous optimizers."""

from .metrics import (
    OverlapResult,
    SummaryStats,
    aggregate,
    contains_global_optimum,
    median_edge_differential,
    network_size,
    node_overlap,
    sweep_matrix,
)
from .netbuild import (
    Network,
    NetworkConfig,
    build_network,
    extract_attractors,
    quantize,
    suggest_partition_factor,
)
from .optim import TrajectoryLog, run_basin_hopping, run_cmaes, run_de, run_random_search
from .testbed import Problem, catalog, evaluate, get_problem

__version__ = "0.1.0"
