"""Network measurements and comparisons across network configurations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .netbuild import Network, NetworkConfig, build_network, quantize

GOPT_TOLERANCE = 1e-8


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class SummaryStats:
    median: float
    iqr: float
    n: int


@dataclass(frozen=True)
class OverlapResult:
    matched: int
    total_vertical: int
    proportion: float
    requantized: bool = False


def network_size(net: Network) -> tuple[int, int]:
    return len(net.nodes), len(net.edges)


def edge_differentials(net: Network) -> list[int]:
    """Every transition's differential, edge by edge."""
    return [d for edge in net.edges.values() for d in edge.differentials]


def median_edge_differential(net: Network) -> float | None:
    """Median over all transitions; ``None`` for a network without edges."""
    diffs = edge_differentials(net)
    if not diffs:
        return None
    return float(np.median(diffs))


def _keys_at(net: Network, epsilon: float, rule: str) -> set:
    if net.config.epsilon == epsilon and net.config.quantization_rule == rule:
        return set(net.nodes)
    return {quantize(node.genotype, epsilon, rule) for node in net.nodes.values()}


def node_overlap(vertical: Network, horizontal: Network, epsilon: float | None = None) -> OverlapResult:
    """Share of ``vertical``'s node locations also present in ``horizontal``.

    Networks built at different precisions or with different quantization
    rules are compared by re-quantizing representative genotypes at
    ``epsilon`` (default: the coarser of the two) with the floor rule; the
    result is then flagged ``requantized``.
    """
    same = (
        vertical.config.epsilon == horizontal.config.epsilon
        and vertical.config.quantization_rule == horizontal.config.quantization_rule
        and (epsilon is None or epsilon == vertical.config.epsilon)
    )
    if same:
        v_keys, h_keys = set(vertical.nodes), set(horizontal.nodes)
    else:
        eps = epsilon if epsilon is not None else max(vertical.config.epsilon, horizontal.config.epsilon)
        v_keys, h_keys = _keys_at(vertical, eps, "floor"), _keys_at(horizontal, eps, "floor")
    matched = len(v_keys & h_keys)
    total = len(v_keys)
    return OverlapResult(matched, total, matched / total if total else 0.0, requantized=not same)


def contains_global_optimum(net: Network, problem, fitness_tol: float = GOPT_TOLERANCE) -> bool:
    return any(node.best_fitness <= problem.f_opt + fitness_tol for node in net.nodes.values())


def aggregate(values: Sequence[float]) -> SummaryStats:
    """Median and interquartile range (linear-interpolation quantiles)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInputError("aggregate needs at least one value")
    q1, med, q3 = np.percentile(arr, [25, 50, 75], method="linear")
    return SummaryStats(float(med), float(q3 - q1), int(arr.size))


@dataclass(frozen=True)
class CellMetrics:
    function_id: str
    dimension: int
    algorithm: str | None
    config: NetworkConfig
    nodes: int | None = None
    edges: int | None = None
    md: float | None = None
    gopt_present: bool | None = None
    error: str | None = None

    def row(self) -> dict:
        return {
            "function_id": self.function_id,
            "dimension": self.dimension,
            "algorithm": self.algorithm,
            "model": self.config.model,
            "beta": self.config.beta if self.config.model == "AN" else None,
            "epsilon": self.config.epsilon,
            "nodes": self.nodes,
            "edges": self.edges,
            "md": self.md,
            "gopt_present": self.gopt_present,
        }


@dataclass
class SweepResult:
    configs: list[NetworkConfig]
    cells: dict[tuple[str, int], list[CellMetrics]] = field(default_factory=dict)
    # (function, config index i, config index j) -> overlap of i (vertical) in j
    overlaps: dict[tuple[str, int, int], OverlapResult] = field(default_factory=dict)

    def median_overlap(self) -> np.ndarray:
        """Per config pair, the median proportion over functions.

        Functions whose vertical network is empty have no defined proportion
        and are left out; a pair with no defined value is NaN.
        """
        n = len(self.configs)
        out = np.full((n, n), np.nan)
        for i in range(n):
            for j in range(n):
                vals = [
                    r.proportion
                    for (_, a, b), r in self.overlaps.items()
                    if a == i and b == j and r.total_vertical
                ]
                if vals:
                    out[i, j] = float(np.median(vals))
        return out

    def rows(self) -> list[dict]:
        return [cell.row() for cells in self.cells.values() for cell in cells]


def evaluate_cell(logs, config: NetworkConfig, problem) -> tuple[CellMetrics, Network | None]:
    try:
        net = build_network(logs, config, problem)
    except ValueError as exc:
        algo = logs[0].algorithm if logs else None
        return CellMetrics(problem.function_id, problem.dimension, algo, config, error=str(exc)), None
    nodes, edges = network_size(net)
    cell = CellMetrics(
        function_id=problem.function_id,
        dimension=problem.dimension,
        algorithm=net.algorithm,
        config=config,
        nodes=nodes,
        edges=edges,
        md=median_edge_differential(net),
        gopt_present=contains_global_optimum(net, problem),
    )
    return cell, net


def sweep_matrix(
    logs_by_function: Mapping[str, Sequence],
    configs: Sequence[NetworkConfig],
    problems: Mapping[str, object],
) -> SweepResult:
    """Build every (function, config) network and measure it.

    ``logs_by_function`` maps a label (usually the function id) to the runs
    of one algorithm on that function; ``problems`` maps the same labels to
    problems. A failing cell is recorded with its error and the sweep
    carries on.
    """
    if not configs:
        raise EmptyInputError("sweep needs at least one config")
    result = SweepResult(list(configs))
    for label, logs in logs_by_function.items():
        problem = problems[label]
        nets: list[Network | None] = []
        cells = []
        for config in configs:
            cell, net = evaluate_cell(list(logs), config, problem)
            cells.append(cell)
            nets.append(net)
        result.cells[(label, problem.dimension)] = cells
        for i, a in enumerate(nets):
            for j, b in enumerate(nets):
                if a is not None and b is not None:
                    result.overlaps[(label, i, j)] = node_overlap(a, b)
    return result
