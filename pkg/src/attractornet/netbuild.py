"""Attractor, search trajectory and local optima networks from trajectory logs.

Every model reduces each run to an ordered sequence of located elements,
then merges the sequences:

* AN: improvement events whose stall (evaluations until the next
  improvement, or until the end of the run for the last one) is >= beta.
* STN: the best-so-far solution at the end of every k-th generation.
* LON: every accepted basin-hopping optimum.

Each element maps to a node key by quantizing its genotype at precision
epsilon. Consecutive elements with the same key collapse into one visit.
Two consecutive elements with different keys add a transition to the edge
between them, carrying the evaluation differential: elapsed evaluations
at the destination element minus those at the source element (the last
element of the source visit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .optim.trajectory import ImprovementEvent, TrajectoryLog

NodeKey = tuple[int, ...]

MODELS = ("AN", "STN", "LON")
POPULATION_ALGORITHMS = ("RS", "DE", "CMA")


class NetworkBuildError(ValueError):
    pass


class QuantizationError(ValueError):
    pass


def quantize(x, epsilon: float, rule: str = "floor") -> NodeKey:
    """Cell index of ``x`` on a grid of spacing ``epsilon``.

    ``floor`` gives ``floor(x_i / epsilon)``; ``nearest`` rounds half away
    from zero instead, which centres the cells on the grid points (the
    decimal-digit hashing used by common LON tools).
    """
    if not epsilon > 0:
        raise QuantizationError("epsilon must be positive")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise QuantizationError(f"non-finite coordinate in {x.tolist()}")
    scaled = x / epsilon
    if rule == "floor":
        cells = np.floor(scaled)
    elif rule == "nearest":
        cells = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    else:
        raise QuantizationError(f"unknown rule {rule!r}")
    return tuple(int(c) for c in cells)


def suggest_partition_factor(x_min: float, x_max: float, dimension: int) -> float:
    """Conventional STN precision: ``10 ** -(2 - n)`` for the largest integer
    ``n`` with ``(x_max - x_min) * D >= 10 ** n``."""
    if not x_max > x_min or dimension < 1:
        raise ValueError("need x_max > x_min and dimension >= 1")
    volume = (x_max - x_min) * dimension
    n = math.floor(math.log10(volume))
    # Guard the float log against off-by-one at exact powers of ten.
    while 10.0 ** (n + 1) <= volume:
        n += 1
    while 10.0**n > volume:
        n -= 1
    return 10.0 ** (n - 2)


@dataclass(frozen=True)
class NetworkConfig:
    model: str = "AN"
    beta: int = 40
    epsilon: float = 1e-5
    stn_cadence_k: int = 1
    # None picks the model default: "floor" for AN/STN, "nearest" for LON.
    rule: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise NetworkBuildError(f"unknown model {self.model!r}")
        if self.beta < 1:
            raise NetworkBuildError("beta must be >= 1")
        if not self.epsilon > 0:
            raise NetworkBuildError("epsilon must be positive")
        if self.stn_cadence_k < 1:
            raise NetworkBuildError("stn_cadence_k must be >= 1")
        if self.rule not in (None, "floor", "nearest"):
            raise NetworkBuildError(f"unknown quantization rule {self.rule!r}")

    @property
    def quantization_rule(self) -> str:
        if self.rule is not None:
            return self.rule
        return "nearest" if self.model == "LON" else "floor"

    def label(self) -> str:
        if self.model == "AN":
            return f"AN(beta={self.beta},eps={self.epsilon!r})"
        if self.model == "STN":
            return f"STN(k={self.stn_cadence_k},eps={self.epsilon!r})"
        return f"LON(eps={self.epsilon!r})"


@dataclass(frozen=True)
class NodeData:
    genotype: tuple[float, ...]  # first seen, layout only
    best_fitness: float
    runs: int  # distinct runs visiting
    visits: int  # collapsed visits, counting revisits
    stall_total: int


@dataclass(frozen=True)
class EdgeData:
    count: int
    differentials: tuple[int, ...]

    @property
    def median_differential(self) -> float:
        return float(np.median(self.differentials))


@dataclass(frozen=True)
class BuildReport:
    model: str
    runs: int
    skipped_runs: tuple[int, ...]  # seeds of runs with an empty node sequence
    nodes: int
    edges: int
    transitions: int
    elements: int  # sequence elements before collapsing: attractors, snapshots or optima

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "runs": self.runs,
            "skipped_runs": list(self.skipped_runs),
            "nodes": self.nodes,
            "edges": self.edges,
            "transitions": self.transitions,
            "elements": self.elements,
        }


@dataclass(frozen=True)
class Network:
    config: NetworkConfig
    function_id: str | None
    dimension: int | None
    algorithm: str | None
    nodes: Mapping[NodeKey, NodeData]
    edges: Mapping[tuple[NodeKey, NodeKey], EdgeData]
    run_count: int
    run_endpoints: tuple[tuple[NodeKey, NodeKey] | None, ...]
    report: BuildReport | None = field(default=None, compare=False)


@dataclass(frozen=True)
class _Element:
    elapsed: int
    fitness: float
    x: tuple[float, ...]
    stall: int


def extract_attractors(log: TrajectoryLog, beta: int) -> list[tuple[ImprovementEvent, int]]:
    """Events after which the best-so-far stalled for at least ``beta`` evaluations."""
    out = []
    events = log.events
    for i, ev in enumerate(events):
        nxt = events[i + 1].evals if i + 1 < len(events) else log.final_evals
        stall = nxt - ev.evals
        if stall >= beta:
            out.append((ev, stall))
    return out


def stn_snapshots(log: TrajectoryLog, k: int) -> list[tuple[int, ImprovementEvent]]:
    """Best-so-far at the end of generations k, 2k, ... as ``(elapsed, event)``."""
    gen = log.generation_size
    generations = log.final_evals // gen
    out = []
    i = -1
    for g in range(k, generations + 1, k):
        t = g * gen
        while i + 1 < len(log.events) and log.events[i + 1].evals <= t:
            i += 1
        if i >= 0:
            out.append((t, log.events[i]))
    return out


def _sequence(log: TrajectoryLog, config: NetworkConfig) -> list[_Element]:
    if config.model == "AN":
        return [_Element(ev.evals, ev.fitness, ev.x, stall) for ev, stall in extract_attractors(log, config.beta)]
    if config.model == "STN":
        return [_Element(t, ev.fitness, ev.x, 0) for t, ev in stn_snapshots(log, config.stn_cadence_k)]
    return [_Element(ev.evals, ev.fitness, ev.x, 0) for ev in log.events]


def _check_inputs(logs: Sequence[TrajectoryLog], config: NetworkConfig, problem) -> None:
    refs = {log.problem_ref for log in logs}
    if problem is not None:
        refs.add(problem.ref)
    if len(refs) > 1:
        raise NetworkBuildError(f"logs mix problems: {sorted(refs)}")
    for log in logs:
        if config.model == "LON" and log.algorithm != "MBH":
            raise NetworkBuildError(f"LON needs basin-hopping logs, got {log.algorithm}")
        if config.model == "STN" and log.algorithm not in POPULATION_ALGORITHMS:
            raise NetworkBuildError(f"STN needs population-algorithm logs, got {log.algorithm}")


def build_network(logs: Sequence[TrajectoryLog], config: NetworkConfig, problem=None) -> Network:
    """Merge the runs in ``logs`` (taken in seed order) into one network."""
    _check_inputs(logs, config, problem)
    rule = config.quantization_rule
    ordered = sorted(logs, key=lambda lg: lg.seed)

    # key -> [genotype, best_fitness, runs, visits, stall_total]
    nodes: dict[NodeKey, list] = {}
    edges: dict[tuple[NodeKey, NodeKey], list[int]] = {}
    endpoints: list[tuple[NodeKey, NodeKey] | None] = []
    skipped: list[int] = []
    n_elements = 0

    for log in ordered:
        seq = _sequence(log, config)
        n_elements += len(seq)
        if not seq:
            skipped.append(log.seed)
            endpoints.append(None)
            continue
        seen_in_run: set[NodeKey] = set()
        prev_key: NodeKey | None = None
        prev_elapsed = 0
        start_key = None
        for el in seq:
            key = quantize(el.x, config.epsilon, rule)
            data = nodes.get(key)
            if data is None:
                data = nodes[key] = [el.x, el.fitness, 0, 0, 0]
            data[1] = min(data[1], el.fitness)
            data[4] += el.stall
            if key not in seen_in_run:
                seen_in_run.add(key)
                data[2] += 1
            if key != prev_key:
                data[3] += 1
                if prev_key is None:
                    start_key = key
                else:
                    edges.setdefault((prev_key, key), []).append(el.elapsed - prev_elapsed)
            prev_key, prev_elapsed = key, el.elapsed
        endpoints.append((start_key, prev_key))

    frozen_nodes = {k: NodeData(tuple(v[0]), float(v[1]), v[2], v[3], v[4]) for k, v in nodes.items()}
    frozen_edges = {k: EdgeData(len(d), tuple(d)) for k, d in edges.items()}
    algorithms = {log.algorithm for log in logs}
    ref = next(iter({log.problem_ref for log in logs}), problem.ref if problem is not None else (None, None))
    report = BuildReport(
        model=config.model,
        runs=len(logs),
        skipped_runs=tuple(skipped),
        nodes=len(frozen_nodes),
        edges=len(frozen_edges),
        transitions=sum(e.count for e in frozen_edges.values()),
        elements=n_elements,
    )
    return Network(
        config=config,
        function_id=ref[0],
        dimension=ref[1],
        algorithm=algorithms.pop() if len(algorithms) == 1 else None,
        nodes=MappingProxyType(frozen_nodes),
        edges=MappingProxyType(frozen_edges),
        run_count=len(logs),
        run_endpoints=tuple(endpoints),
        report=report,
    )
