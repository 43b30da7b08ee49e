import random

import numpy as np
import pytest

from attractornet.optim.trajectory import ImprovementEvent, TrajectoryLog


class StubProblem:
    """Problem-shaped object around an arbitrary batch function, counting calls."""

    def __init__(self, func, dimension=2, function_id="stub", lower=-5.0, upper=5.0):
        self.func = func
        self.function_id = function_id
        self.dimension = dimension
        self.lower_bound = lower
        self.upper_bound = upper
        self.f_opt = 0.0
        self.calls = 0

    @property
    def ref(self):
        return (self.function_id, self.dimension)

    @property
    def span(self):
        return self.upper_bound - self.lower_bound

    def evaluate_batch(self, points):
        points = np.asarray(points, dtype=float)
        self.calls += len(points)
        return np.asarray([self.func(p) for p in points], dtype=float)


def make_log(stamps, genotypes, final_evals=None, seed=0, algorithm="CMA", function_id="synthetic",
             dimension=2, generation_size=1, fitness=None):
    if fitness is None:
        fitness = [float(len(stamps) - i) for i in range(len(stamps))]
    events = tuple(
        ImprovementEvent(int(e), float(f), tuple(float(v) for v in x))
        for e, f, x in zip(stamps, fitness, genotypes)
    )
    final = final_evals if final_evals is not None else (stamps[-1] if stamps else 0)
    log = TrajectoryLog(
        algorithm=algorithm,
        function_id=function_id,
        dimension=dimension,
        seed=seed,
        budget=max(final, 1),
        final_evals=final,
        events=events,
        generation_size=generation_size,
    )
    log.validate()
    return log


def random_synthetic_log(rng: random.Random, seed: int, pool, max_events=25, algorithm="CMA"):
    """Random valid log whose genotypes come from a small pool so keys collide."""
    n = rng.randint(0, max_events)
    stamps, t = [], 0
    for _ in range(n):
        t += rng.choice([1, 2, 3, 5, 8, 20, 40, 60, 100, 300])
        stamps.append(t)
    genotypes = [rng.choice(pool) for _ in range(n)]
    final = t + rng.choice([0, 1, 10, 39, 40, 41, 200])
    return make_log(stamps, genotypes, final_evals=final, seed=seed, algorithm=algorithm)


@pytest.fixture
def stub_problem():
    return StubProblem


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, ok, detail)``."""

    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[number] = (bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
