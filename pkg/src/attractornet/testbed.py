"""Bounded continuous minimisation problems with known optima.

Canonical textbook definitions (no rotations or non-linear warpings) on the
box [-5, 5]^D. Every function is written over a batch of points of shape
``(n, D)``; single-point evaluation goes through the same code path so that
a point always gets a bit-identical fitness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

LOWER_BOUND = -5.0
UPPER_BOUND = 5.0
DIMENSIONS = (2, 10)


class DimensionError(ValueError):
    """Raised when a point does not match the problem dimension."""


class UnknownFunctionError(KeyError):
    """Raised for a function identifier not in the catalog."""


def _sphere(z: np.ndarray) -> np.ndarray:
    return np.sum(z * z, axis=1)


def _rosenbrock(z: np.ndarray) -> np.ndarray:
    head, tail = z[:, :-1], z[:, 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (head - 1.0) ** 2, axis=1)


def _rastrigin(z: np.ndarray) -> np.ndarray:
    d = z.shape[1]
    return 10.0 * d + np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z), axis=1)


def _schaffer_f7(z: np.ndarray) -> np.ndarray:
    s = np.sqrt(z[:, :-1] ** 2 + z[:, 1:] ** 2)
    rs = np.sqrt(s)
    terms = rs + rs * np.sin(50.0 * s**0.2) ** 2
    return np.mean(terms, axis=1) ** 2


_GALLAGHER_PEAKS = 21


@lru_cache(maxsize=None)
def _gallagher_peaks(dimension: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Fixed per-dimension landscape; peak 0 is the global one.
    rng = np.random.Generator(np.random.PCG64(20_000 + dimension))
    centres = rng.uniform(-4.0, 4.0, size=(_GALLAGHER_PEAKS, dimension))
    weights = np.empty(_GALLAGHER_PEAKS)
    weights[0] = 10.0
    weights[1:] = 1.1 + 8.0 * np.arange(_GALLAGHER_PEAKS - 1) / (_GALLAGHER_PEAKS - 2)
    widths = 10.0 ** rng.uniform(0.0, 2.0, size=_GALLAGHER_PEAKS)
    widths[0] = 1.0
    for arr in (centres, weights, widths):
        arr.setflags(write=False)
    return centres, weights, widths


def _gallagher(z: np.ndarray) -> np.ndarray:
    d = z.shape[1]
    centres, weights, widths = _gallagher_peaks(d)
    diff = z[:, None, :] - centres[None, :, :]
    sq = np.sum(diff * diff, axis=2)
    heights = weights * np.exp(-widths * sq / (2.0 * d))
    return 10.0 - np.max(heights, axis=1)


@dataclass(frozen=True)
class _Family:
    func: Callable[[np.ndarray], np.ndarray]
    optimum: Callable[[int], np.ndarray]
    min_dimension: int = 1


_FAMILIES: dict[str, _Family] = {
    "sphere": _Family(_sphere, lambda d: np.zeros(d)),
    "rosenbrock": _Family(_rosenbrock, lambda d: np.ones(d), 2),
    "rastrigin": _Family(_rastrigin, lambda d: np.zeros(d)),
    "schaffer_f7": _Family(_schaffer_f7, lambda d: np.zeros(d), 2),
    "gallagher": _Family(_gallagher, lambda d: _gallagher_peaks(d)[0][0].copy(), 1),
}

FUNCTION_IDS: tuple[str, ...] = tuple(_FAMILIES)


@dataclass(frozen=True)
class Problem:
    """A bounded minimisation problem.

    ``shift`` translates the whole landscape so the optimiser sits at
    ``x_opt``; it is all zeros unless a shift seed was requested.
    """

    function_id: str
    dimension: int
    lower_bound: float
    upper_bound: float
    f_opt: float
    x_opt: tuple[float, ...]
    shift: tuple[float, ...]

    @property
    def ref(self) -> tuple[str, int]:
        return (self.function_id, self.dimension)

    @property
    def span(self) -> float:
        return self.upper_bound - self.lower_bound

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.dimension:
            raise DimensionError(
                f"{self.function_id}: expected points of shape (n, {self.dimension}), "
                f"got {points.shape}"
            )
        z = points - np.asarray(self.shift)
        return _FAMILIES[self.function_id].func(z)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {
            "function_id": self.function_id,
            "dimension": self.dimension,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "f_opt": self.f_opt,
            "x_opt": list(self.x_opt),
            "shift": list(self.shift),
        }


def evaluate(problem: Problem, x) -> float:
    """Fitness of a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != problem.dimension:
        raise DimensionError(
            f"{problem.function_id}: expected a vector of length {problem.dimension}, "
            f"got shape {x.shape}"
        )
    return float(problem.evaluate_batch(x[None, :])[0])


def get_problem(function_id: str, dimension: int, shift_seed: int | None = None) -> Problem:
    """Build a catalog problem, optionally moving its optimum by a seeded shift.

    The shifted optimiser is drawn uniformly from [-4, 4]^D so it stays
    strictly inside the region of interest.
    """
    try:
        family = _FAMILIES[function_id]
    except KeyError:
        raise UnknownFunctionError(function_id) from None
    if dimension < family.min_dimension:
        raise DimensionError(f"{function_id} needs dimension >= {family.min_dimension}")
    base = family.optimum(dimension)
    shift = np.zeros(dimension)
    if shift_seed is not None:
        rng = np.random.Generator(np.random.PCG64(shift_seed))
        shift = rng.uniform(-4.0, 4.0, size=dimension) - base
    return Problem(
        function_id=function_id,
        dimension=dimension,
        lower_bound=LOWER_BOUND,
        upper_bound=UPPER_BOUND,
        f_opt=0.0,
        x_opt=tuple(float(v) for v in base + shift),
        shift=tuple(float(v) for v in shift),
    )


def catalog(dimensions=DIMENSIONS) -> list[Problem]:
    return [get_problem(fid, d) for fid in FUNCTION_IDS for d in dimensions]
