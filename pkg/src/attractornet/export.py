"""GraphML, DOT and CSV writers.

Graph documents carry, per node: ``key`` (comma-joined cell indices),
``best_fitness``, ``visit_count`` (collapsed visits), ``run_count``
(distinct runs, the quantity to scale node size by), ``stall_total``,
``x`` and ``y``; per edge: ``weight`` (transition count) and
``median_differential``. Node ids are ``n0, n1, ...`` in network order.
Floats are written as Python's shortest round-trip ``repr``.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence

import networkx as nx

from .layout import LayoutedNetwork

METRICS_HEADER = (
    "function_id",
    "dimension",
    "algorithm",
    "model",
    "beta",
    "epsilon",
    "nodes",
    "edges",
    "md",
    "gopt_present",
)


def key_label(key) -> str:
    return ",".join(str(c) for c in key)


def to_networkx(lnet: LayoutedNetwork) -> nx.DiGraph:
    net = lnet.network
    g = nx.DiGraph()
    ids = {}
    for i, (key, node) in enumerate(net.nodes.items()):
        ids[key] = f"n{i}"
        x, y = lnet.positions[key]
        g.add_node(
            ids[key],
            key=key_label(key),
            best_fitness=float(node.best_fitness),
            visit_count=int(node.visits),
            run_count=int(node.runs),
            stall_total=int(node.stall_total),
            x=float(x),
            y=float(y),
        )
    for (src, dst), edge in net.edges.items():
        g.add_edge(ids[src], ids[dst], weight=int(edge.count), median_differential=edge.median_differential)
    return g


def _graphml(g: nx.DiGraph) -> str:
    return "\n".join(nx.generate_graphml(g)) + "\n"


def _dot_value(v) -> str:
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return repr(v) if isinstance(v, float) else str(v)


def _dot(g: nx.DiGraph) -> str:
    lines = ["digraph network {"]
    for n, attrs in g.nodes(data=True):
        body = ", ".join(f"{k}={_dot_value(v)}" for k, v in attrs.items())
        lines.append(f"  {n} [{body}];")
    for u, v, attrs in g.edges(data=True):
        body = ", ".join(f"{k}={_dot_value(val)}" for k, val in attrs.items())
        lines.append(f"  {u} -> {v} [{body}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(lnet: LayoutedNetwork, format: str = "graphml") -> str:
    g = to_networkx(lnet)
    if format == "graphml":
        return _graphml(g)
    if format == "dot":
        return _dot(g)
    raise ValueError(f"unknown graph format {format!r}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def export_tables(rows: Iterable[dict], header: Sequence[str] = METRICS_HEADER) -> str:
    """CSV text with a fixed header; absent values are empty cells."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in header])
    return buf.getvalue()


def read_table(text: str) -> list[dict]:
    """Inverse of :func:`export_tables` for the metrics header."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for col, raw in rec.items():
            if raw == "":
                row[col] = None
            elif col in ("dimension", "beta", "nodes", "edges"):
                row[col] = int(raw)
            elif col in ("epsilon", "md"):
                row[col] = float(raw)
            elif col == "gopt_present":
                row[col] = raw == "true"
            else:
                row[col] = raw
        out.append(row)
    return out


def export_overlap_matrix(labels: Sequence[str], matrix) -> str:
    """Square CSV: first row and column are config labels."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["vertical\\horizontal", *labels])
    for label, row in zip(labels, matrix):
        writer.writerow([label, *(_cell(float(v)) for v in row)])
    return buf.getvalue()
