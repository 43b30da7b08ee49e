"""Monotonic basin-hopping with a Nelder-Mead local search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..rng import make_rng
from .de import ConfigurationError
from .trajectory import BudgetExceeded, ImprovementEvent, TrajectoryLog, Tracker

FATOL = 1e-10


@dataclass(frozen=True)
class MBHParams:
    stall_limit: int = 1000
    perturbation_scale: float = 0.1
    local_search: str = "nelder_mead"


class _Counted:
    """Objective wrapper that charges every call to a Tracker."""

    def __init__(self, tracker: Tracker):
        self.tracker = tracker

    def __call__(self, x):
        if self.tracker.remaining < 1:
            raise BudgetExceeded
        return float(self.tracker.evaluate(x[None, :])[0])


def nelder_mead(tracker: Tracker, x0: np.ndarray, lower: float, upper: float):
    """Run a local search from ``x0``; returns ``(x, f, converged)``.

    Converged means the simplex fitness spread fell below 1e-10 or the
    500*D iteration cap was hit. A search cut short by the budget returns
    ``converged=False``.
    """
    d = x0.shape[0]
    fun = _Counted(tracker)
    best = {"x": None, "f": np.inf}

    def tracked(x):
        f = fun(x)
        if f < best["f"]:
            best["x"], best["f"] = np.array(x), f
        return f

    try:
        res = minimize(
            tracked,
            x0,
            method="Nelder-Mead",
            bounds=[(lower, upper)] * d,
            options={"fatol": FATOL, "xatol": np.inf, "maxiter": 500 * d, "maxfev": tracker.remaining},
        )
    except BudgetExceeded:
        return best["x"], best["f"], False
    converged = res.status in (0, 2) or (res.status == 1 and res.nit >= 500 * d)
    return np.asarray(res.x, dtype=float), float(res.fun), converged


def run_basin_hopping(problem, seed: int, params: MBHParams | None = None, budget: int = 10_000) -> TrajectoryLog:
    """Perturb the incumbent optimum, re-optimise, keep it only if strictly better.

    Events are the accepted local optima, stamped with the evaluation count
    at the end of the local search that found them.
    """
    params = params or MBHParams()
    if params.stall_limit < 1:
        raise ConfigurationError("stall_limit must be >= 1")
    if params.local_search != "nelder_mead":
        raise ConfigurationError(f"unsupported local search {params.local_search!r}")
    rng = make_rng(seed)
    lo, hi = problem.lower_bound, problem.upper_bound
    tracker = Tracker(problem, budget)
    events: list[ImprovementEvent] = []

    x, f, _ = nelder_mead(tracker, rng.uniform(lo, hi, size=problem.dimension), lo, hi)
    if x is not None:
        # The first local search is kept even if the budget cut it short.
        events.append(ImprovementEvent(tracker.evals, f, tuple(float(v) for v in x)))
    stall = 0
    scale = params.perturbation_scale * problem.span
    while x is not None and stall < params.stall_limit and tracker.remaining > 0:
        start = np.clip(x + rng.normal(0.0, scale, size=problem.dimension), lo, hi)
        cand_x, cand_f, converged = nelder_mead(tracker, start, lo, hi)
        if not converged:
            break
        if cand_f < f:
            x, f = cand_x, cand_f
            events.append(ImprovementEvent(tracker.evals, f, tuple(float(v) for v in x)))
            stall = 0
        else:
            stall += 1

    return TrajectoryLog(
        algorithm="MBH",
        function_id=problem.function_id,
        dimension=problem.dimension,
        seed=seed,
        budget=budget,
        final_evals=tracker.evals,
        events=tuple(events),
        generation_size=1,
        params={
            "stall_limit": params.stall_limit,
            "perturbation_scale": params.perturbation_scale,
            "local_search": params.local_search,
        },
    )
