"""Best-so-far trajectory logs and their JSON Lines file format.

File layout, one JSON object per line:

* line 1, metadata::

    {"format": "attractornet-trajectory", "version": 1, "algorithm": "DE",
     "function_id": "sphere", "dimension": 2, "seed": 123, "budget": 10000,
     "final_evals": 9998, "generation_size": 6, "generator": "numpy.PCG64",
     "params": {...}}

* every further line, one improvement event::

    {"evals": 17, "fitness": 0.25, "x": [0.5, 0.0]}

Floats are written by ``json.dumps``, i.e. Python's shortest round-trip
``repr``, so a file re-read gives bit-identical values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..rng import GENERATOR_NAME

FORMAT_NAME = "attractornet-trajectory"
FORMAT_VERSION = 1
ALGORITHMS = ("RS", "DE", "CMA", "MBH")


class InvalidLogError(ValueError):
    pass


@dataclass(frozen=True)
class ImprovementEvent:
    evals: int
    fitness: float
    x: tuple[float, ...]


@dataclass(frozen=True)
class TrajectoryLog:
    algorithm: str
    function_id: str
    dimension: int
    seed: int
    budget: int
    final_evals: int
    events: tuple[ImprovementEvent, ...]
    # Evaluations per generation: population size, lambda, or 1 for RS/MBH.
    generation_size: int = 1
    params: dict = field(default_factory=dict)
    generator: str = GENERATOR_NAME

    @property
    def problem_ref(self) -> tuple[str, int]:
        return (self.function_id, self.dimension)

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise InvalidLogError(f"unknown algorithm {self.algorithm!r}")
        if not 0 <= self.final_evals <= self.budget:
            raise InvalidLogError("final_evals outside [0, budget]")
        prev_evals, prev_fit = 0, math.inf
        for ev in self.events:
            if len(ev.x) != self.dimension:
                raise InvalidLogError(f"genotype length {len(ev.x)} != {self.dimension}")
            if not math.isfinite(ev.fitness):
                raise InvalidLogError("non-finite fitness")
            if ev.evals <= prev_evals:
                raise InvalidLogError("evaluation stamps not strictly increasing")
            if not ev.fitness < prev_fit:
                raise InvalidLogError("fitness not strictly decreasing")
            prev_evals, prev_fit = ev.evals, ev.fitness
        if self.events and self.events[-1].evals > self.final_evals:
            raise InvalidLogError("event stamped after final_evals")

    def metadata(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "algorithm": self.algorithm,
            "function_id": self.function_id,
            "dimension": self.dimension,
            "seed": self.seed,
            "budget": self.budget,
            "final_evals": self.final_evals,
            "generation_size": self.generation_size,
            "generator": self.generator,
            "params": self.params,
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.metadata())]
        for ev in self.events:
            lines.append(json.dumps({"evals": ev.evals, "fitness": ev.fitness, "x": list(ev.x)}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "TrajectoryLog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise InvalidLogError("empty log")
        meta = json.loads(lines[0])
        if meta.get("format") != FORMAT_NAME:
            raise InvalidLogError(f"not a trajectory log: format={meta.get('format')!r}")
        if meta.get("version") != FORMAT_VERSION:
            raise InvalidLogError(f"unsupported version {meta.get('version')!r}")
        events = []
        for ln in lines[1:]:
            rec = json.loads(ln)
            events.append(
                ImprovementEvent(int(rec["evals"]), float(rec["fitness"]), tuple(float(v) for v in rec["x"]))
            )
        log = cls(
            algorithm=meta["algorithm"],
            function_id=meta["function_id"],
            dimension=int(meta["dimension"]),
            seed=int(meta["seed"]),
            budget=int(meta["budget"]),
            final_evals=int(meta["final_evals"]),
            events=tuple(events),
            generation_size=int(meta.get("generation_size", 1)),
            params=meta.get("params", {}),
            generator=meta.get("generator", GENERATOR_NAME),
        )
        log.validate()
        return log


def write_log(log: TrajectoryLog, path) -> None:
    Path(path).write_text(log.to_jsonl())


def read_log(path) -> TrajectoryLog:
    return TrajectoryLog.from_jsonl(Path(path).read_text())


class BudgetExceeded(RuntimeError):
    pass


class Tracker:
    """Counts evaluations against a budget and records best-so-far improvements.

    Points of a batch are processed in row order, so each event gets the
    evaluation stamp of the exact call that produced it.
    """

    def __init__(self, problem, budget: int):
        self.problem = problem
        self.budget = budget
        self.evals = 0
        self.best_fitness = math.inf
        self.best_x: np.ndarray | None = None
        self.events: list[ImprovementEvent] = []

    @property
    def remaining(self) -> int:
        return self.budget - self.evals

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.evals + len(points) > self.budget:
            raise BudgetExceeded(f"{len(points)} evaluations requested, {self.remaining} left")
        fitness = self.problem.evaluate_batch(points)
        if len(points) == 1:
            f = float(fitness[0])
            self.evals += 1
            if f < self.best_fitness:
                self.events.append(ImprovementEvent(self.evals, f, tuple(float(v) for v in points[0])))
                self.best_fitness, self.best_x = f, points[0].copy()
            return fitness
        # Only rows that beat the running minimum can be events.
        running = np.minimum.accumulate(np.concatenate(([self.best_fitness], fitness)))[:-1]
        for i in np.flatnonzero(fitness < running):
            self.events.append(
                ImprovementEvent(self.evals + int(i) + 1, float(fitness[i]), tuple(float(v) for v in points[i]))
            )
        if self.events and self.events[-1].fitness < self.best_fitness:
            self.best_fitness = self.events[-1].fitness
            self.best_x = np.array(self.events[-1].x)
        self.evals += len(points)
        return fitness

    def to_log(self, algorithm: str, seed: int, generation_size: int = 1, params: dict | None = None) -> TrajectoryLog:
        return TrajectoryLog(
            algorithm=algorithm,
            function_id=self.problem.function_id,
            dimension=self.problem.dimension,
            seed=seed,
            budget=self.budget,
            final_evals=self.evals,
            events=tuple(self.events),
            generation_size=generation_size,
            params=params or {},
        )
