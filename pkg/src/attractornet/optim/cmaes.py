"""Vanilla (mu/mu_w, lambda)-CMA-ES.

Weighted recombination of the best half, cumulative step-size adaptation
and rank-one plus rank-mu covariance updates, with the standard default
strategy parameters. Samples are saturated into the box before evaluation
and the saturated points are the ones fed back into the update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import make_rng
from .de import ConfigurationError, default_population_size
from .trajectory import TrajectoryLog, Tracker

EIGENVALUE_FLOOR = 1e-20
SIGMA_FLOOR = 1e-16


@dataclass(frozen=True)
class CMAParams:
    lam: int | None = None  # None: 4 + floor(3 ln D)
    sigma0: float = 2.0

    def resolved(self, dimension: int) -> "CMAParams":
        lam = default_population_size(dimension) if self.lam is None else self.lam
        if lam < 2:
            raise ConfigurationError("lambda must be >= 2")
        if not self.sigma0 > 0:
            raise ConfigurationError("sigma0 must be positive")
        return CMAParams(lam, self.sigma0)


class _Strategy:
    """Default learning rates derived from lambda and the dimension."""

    def __init__(self, n: int, lam: int):
        self.n, self.lam = n, lam
        self.mu = lam // 2
        w = math.log(self.mu + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / float(np.sum(self.weights**2))
        self.cc = (4 + self.mueff / n) / (n + 4 + 2 * self.mueff / n)
        self.cs = (self.mueff + 2) / (n + self.mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + self.mueff)
        self.cmu = min(1 - self.c1, 2 * (self.mueff - 2 + 1 / self.mueff) / ((n + 2) ** 2 + self.mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((self.mueff - 1) / (n + 1)) - 1) + self.cs
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))


def run_cmaes(problem, budget: int, seed: int, params: CMAParams | None = None) -> TrajectoryLog:
    params = (params or CMAParams()).resolved(problem.dimension)
    lam = params.lam
    if budget < lam:
        raise ConfigurationError(f"budget {budget} smaller than lambda {lam}")
    n = problem.dimension
    lo, hi = problem.lower_bound, problem.upper_bound
    s = _Strategy(n, lam)
    rng = make_rng(seed)
    tracker = Tracker(problem, budget)

    mean = rng.uniform(lo, hi, size=n)
    sigma = params.sigma0
    C = np.eye(n)
    B = np.eye(n)
    D = np.ones(n)
    ps = np.zeros(n)
    pc = np.zeros(n)
    generation = 0

    while tracker.remaining >= lam:
        z = rng.standard_normal((lam, n))
        x = np.clip(mean + sigma * (z * D) @ B.T, lo, hi)
        fitness = tracker.evaluate(x)
        generation += 1

        order = np.argsort(fitness, kind="stable")[: s.mu]
        y = (x[order] - mean) / sigma
        yw = s.weights @ y
        mean = mean + sigma * yw

        inv_sqrt_c = B @ np.diag(1.0 / D) @ B.T
        ps = (1 - s.cs) * ps + math.sqrt(s.cs * (2 - s.cs) * s.mueff) * (inv_sqrt_c @ yw)
        ps_norm = float(np.linalg.norm(ps))
        hsig = ps_norm / math.sqrt(1 - (1 - s.cs) ** (2 * generation)) < (1.4 + 2 / (n + 1)) * s.chi_n
        pc = (1 - s.cc) * pc + hsig * math.sqrt(s.cc * (2 - s.cc) * s.mueff) * yw

        rank_mu = (y * s.weights[:, None]).T @ y
        C = (
            (1 - s.c1 - s.cmu) * C
            + s.c1 * (np.outer(pc, pc) + (1 - hsig) * s.cc * (2 - s.cc) * C)
            + s.cmu * rank_mu
        )
        sigma = max(sigma * math.exp((s.cs / s.damps) * (ps_norm / s.chi_n - 1)), SIGMA_FLOOR)

        C = (C + C.T) / 2
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(mean)) and math.isfinite(sigma)):
            break
        eigvals, B = np.linalg.eigh(C)
        eigvals = np.maximum(eigvals, EIGENVALUE_FLOOR)
        D = np.sqrt(eigvals)
        C = (B * eigvals) @ B.T

    return tracker.to_log(
        "CMA", seed, generation_size=lam, params={"lambda": lam, "sigma0": params.sigma0}
    )
