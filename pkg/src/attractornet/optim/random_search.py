from __future__ import annotations

from ..rng import make_rng
from .trajectory import TrajectoryLog, Tracker

_CHUNK = 4096


def run_random_search(problem, budget: int, seed: int) -> TrajectoryLog:
    """Uniform sampling of the box; every new best-so-far is an event."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = make_rng(seed)
    tracker = Tracker(problem, budget)
    while tracker.remaining:
        n = min(_CHUNK, tracker.remaining)
        tracker.evaluate(rng.uniform(problem.lower_bound, problem.upper_bound, size=(n, problem.dimension)))
    return tracker.to_log("RS", seed, generation_size=1)
