from .basin_hopping import MBHParams, run_basin_hopping
from .cmaes import CMAParams, run_cmaes
from .de import ConfigurationError, DEParams, run_de
from .random_search import run_random_search
from .trajectory import ImprovementEvent, InvalidLogError, TrajectoryLog, Tracker, read_log, write_log

DEFAULT_BUDGETS = {2: 10_000, 10: 50_000}


def default_budget(dimension: int) -> int:
    return DEFAULT_BUDGETS.get(dimension, 5_000 * dimension)


def run_algorithm(algorithm: str, problem, budget: int, seed: int) -> TrajectoryLog:
    """Dispatch by portfolio name with default parameters."""
    if algorithm == "RS":
        return run_random_search(problem, budget, seed)
    if algorithm == "DE":
        return run_de(problem, budget, seed)
    if algorithm == "CMA":
        return run_cmaes(problem, budget, seed)
    if algorithm == "MBH":
        return run_basin_hopping(problem, seed, budget=budget)
    raise ConfigurationError(f"unknown algorithm {algorithm!r}")


__all__ = [
    "CMAParams",
    "ConfigurationError",
    "DEParams",
    "DEFAULT_BUDGETS",
    "ImprovementEvent",
    "InvalidLogError",
    "MBHParams",
    "TrajectoryLog",
    "Tracker",
    "default_budget",
    "read_log",
    "run_algorithm",
    "run_basin_hopping",
    "run_cmaes",
    "run_de",
    "run_random_search",
    "write_log",
]
