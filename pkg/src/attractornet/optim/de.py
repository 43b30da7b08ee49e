"""DE rand/1/bin with uniform initialisation and saturation bound handling."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..rng import make_rng
from .trajectory import TrajectoryLog, Tracker


class ConfigurationError(ValueError):
    pass


def default_population_size(dimension: int) -> int:
    return 4 + int(math.floor(3 * math.log(dimension)))


@dataclass(frozen=True)
class DEParams:
    pop_size: int | None = None  # None: 4 + floor(3 ln D)
    F: float = 0.5
    Cr: float = 0.5
    bound_handling: str = "saturate"

    def resolved(self, dimension: int) -> "DEParams":
        pop = default_population_size(dimension) if self.pop_size is None else self.pop_size
        if pop < 4:
            raise ConfigurationError("rand/1 mutation needs pop_size >= 4")
        if not 0.0 <= self.Cr <= 1.0:
            raise ConfigurationError("Cr must lie in [0, 1]")
        if self.bound_handling != "saturate":
            raise ConfigurationError(f"unsupported bound handling {self.bound_handling!r}")
        return DEParams(pop, self.F, self.Cr, self.bound_handling)


def rand1_mutant(x_r1: np.ndarray, x_r2: np.ndarray, x_r3: np.ndarray, F: float) -> np.ndarray:
    return x_r1 + F * (x_r2 - x_r3)


def saturate(x: np.ndarray, lower: float, upper: float) -> np.ndarray:
    return np.clip(x, lower, upper)


def pick_donors(rng: np.random.Generator, pop_size: int) -> np.ndarray:
    """Donor indices ``(r1, r2, r3)`` per parent, distinct and != the parent.

    Each row ranks i.i.d. uniform keys with the parent's own key set to
    infinity and keeps the three smallest, which is a uniform draw of three
    distinct others.
    """
    keys = rng.random((pop_size, pop_size))
    np.fill_diagonal(keys, np.inf)
    return np.argsort(keys, axis=1, kind="stable")[:, :3]


def binomial_crossover(
    targets: np.ndarray, mutants: np.ndarray, uniforms: np.ndarray, forced: np.ndarray, Cr: float
) -> np.ndarray:
    mask = uniforms < Cr
    mask[np.arange(targets.shape[0]), forced] = True
    return np.where(mask, mutants, targets)


def make_trials(rng: np.random.Generator, population: np.ndarray, params: DEParams, lower: float, upper: float) -> np.ndarray:
    """One generation of trial vectors, all built from the current population.

    Random draws per generation, in this order: donor keys
    ``(pop, pop)``, forced crossover coordinates ``(pop,)``, crossover
    uniforms ``(pop, D)``.
    """
    pop, d = population.shape
    donors = pick_donors(rng, pop)
    forced = rng.integers(d, size=pop)
    uniforms = rng.random((pop, d))
    mutants = rand1_mutant(population[donors[:, 0]], population[donors[:, 1]], population[donors[:, 2]], params.F)
    return binomial_crossover(population, saturate(mutants, lower, upper), uniforms, forced, params.Cr)


def run_de(
    problem, budget: int, seed: int, params: DEParams | None = None, callback=None
) -> TrajectoryLog:
    """Generational DE; a generation only starts if the budget covers all of it.

    ``callback(generation, population, fitness)`` is called after
    initialisation (generation 0) and after every selection step.
    """
    params = (params or DEParams()).resolved(problem.dimension)
    if budget < params.pop_size:
        raise ConfigurationError(f"budget {budget} smaller than population {params.pop_size}")
    rng = make_rng(seed)
    lo, hi = problem.lower_bound, problem.upper_bound
    tracker = Tracker(problem, budget)

    population = rng.uniform(lo, hi, size=(params.pop_size, problem.dimension))
    fitness = tracker.evaluate(population)
    generation = 0
    if callback is not None:
        callback(generation, population.copy(), fitness.copy())
    while tracker.remaining >= params.pop_size:
        trials = make_trials(rng, population, params, lo, hi)
        trial_fitness = tracker.evaluate(trials)
        # Ties replace the parent.
        better = trial_fitness <= fitness
        population[better] = trials[better]
        fitness[better] = trial_fitness[better]
        generation += 1
        if callback is not None:
            callback(generation, population.copy(), fitness.copy())
    return tracker.to_log("DE", seed, generation_size=params.pop_size, params=asdict(params))
