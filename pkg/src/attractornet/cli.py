"""Command line entry point: ``attractornet run | build | sweep``.

Examples::

    attractornet run --function sphere rastrigin --dim 2 --algo CMA DE RS \\
        --runs 10 --seed 1 --out results
    attractornet build --logs 'results/logs/sphere_d2_CMA_*.jsonl' --model AN \\
        --beta 40 --epsilon 1e-5 --out results/sphere_cma.graphml
    attractornet sweep --logs results --beta 10 20 40 80 160 320 640 \\
        --epsilon 0.01 0.001 0.0001 0.00001 --out results/tables

Exit status: 0 success, 2 usage or validation error, 3 runtime failure.
The worker pool size is read from ``ATTRNET_WORKERS`` (default 1).
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .export import export_graph, export_overlap_matrix, export_tables
from .layout import layout
from .metrics import SweepResult, sweep_matrix
from .netbuild import NetworkBuildError, NetworkConfig, build_network
from .optim import default_budget, read_log, run_algorithm, write_log
from .optim.trajectory import ALGORITHMS, InvalidLogError
from .rng import derive_seed
from .testbed import FUNCTION_IDS, get_problem

log = logging.getLogger("attractornet")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
WORKERS_ENV = "ATTRNET_WORKERS"


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    functions: list[str]
    dimensions: list[int]
    algorithms: list[str]
    runs_per_cell: int = 10
    master_seed: int = 0
    budget: int | None = None  # None: per-dimension default
    output_dir: str = "results"

    def validate(self) -> None:
        if self.runs_per_cell < 1:
            raise UsageError("runs_per_cell must be >= 1")
        for fid in self.functions:
            if fid not in FUNCTION_IDS:
                raise UsageError(f"unknown function {fid!r}; choose from {', '.join(FUNCTION_IDS)}")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise UsageError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
        for d in self.dimensions:
            if d < 2:
                raise UsageError("dimensions must be >= 2")
        if self.budget is not None and self.budget < 1:
            raise UsageError("budget must be >= 1")

    def budget_for(self, dimension: int) -> int:
        return self.budget if self.budget is not None else default_budget(dimension)

    def cells(self):
        for fid in self.functions:
            for d in self.dimensions:
                for algo in self.algorithms:
                    yield fid, d, algo

    def to_dict(self) -> dict:
        return asdict(self)


def cell_label(function_id: str, dimension: int, algorithm: str) -> str:
    return f"{function_id}|{dimension}|{algorithm}"


def log_name(function_id: str, dimension: int, algorithm: str, index: int) -> str:
    return f"{function_id}_d{dimension}_{algorithm}_run{index:03d}.jsonl"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer") from None


def _map(fn, jobs):
    jobs = list(jobs)
    n = _workers()
    if n == 1 or len(jobs) < 2:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _one_run(function_id: str, dimension: int, algorithm: str, budget: int, seed: int):
    return run_algorithm(algorithm, get_problem(function_id, dimension), budget, seed)


def cmd_run(manifest: RunManifest) -> list[Path]:
    """Run every (function, dimension, algorithm, run index) and write one log each."""
    manifest.validate()
    out = Path(manifest.output_dir)
    logs_dir = out / "logs"
    jobs, paths = [], []
    for fid, d, algo in manifest.cells():
        for i in range(manifest.runs_per_cell):
            seed = derive_seed(manifest.master_seed, cell_label(fid, d, algo), i)
            jobs.append((fid, d, algo, manifest.budget_for(d), seed))
            paths.append(logs_dir / log_name(fid, d, algo, i))
    logs_dir.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    for path, trajectory in zip(paths, _map(_one_run, jobs)):
        write_log(trajectory, path)
    log.info("wrote %d logs to %s", len(paths), logs_dir)
    return paths


def _resolve_logs(pattern: str) -> list[Path]:
    p = Path(pattern)
    if p.is_dir():
        sub = p / "logs"
        p = sub if sub.is_dir() else p
        return sorted(p.glob("*.jsonl"))
    return sorted(Path(s) for s in glob.glob(pattern))


def _load_logs(pattern: str):
    paths = _resolve_logs(pattern)
    if not paths:
        raise UsageError(f"no logs match {pattern!r}")
    try:
        return [read_log(p) for p in paths]
    except (InvalidLogError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"bad log file: {exc}") from None


def cmd_build(logs_pattern: str, config: NetworkConfig, out: str, format: str = "graphml") -> dict:
    """Build one network, write it as a graph file plus ``<out>.report.json``."""
    logs = _load_logs(logs_pattern)
    try:
        net = build_network(logs, config)
    except NetworkBuildError as exc:
        raise UsageError(str(exc)) from None
    problem = get_problem(net.function_id, net.dimension)
    lnet = layout(net, problem.dimension)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(export_graph(lnet, format))
    report = {
        "function_id": net.function_id,
        "dimension": net.dimension,
        "algorithm": net.algorithm,
        "config": asdict(config),
        "layout": lnet.layout_method,
        **net.report.to_dict(),
    }
    Path(str(out_path) + ".report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report


def sweep_configs(model: str, betas, epsilons, k: int = 1) -> list[NetworkConfig]:
    if model == "AN":
        return [NetworkConfig("AN", beta=b, epsilon=e) for b in betas for e in epsilons]
    return [NetworkConfig(model, epsilon=e, stn_cadence_k=k) for e in epsilons]


def _sweep_group(function_id: str, dimension: int, logs, configs) -> SweepResult:
    return sweep_matrix({function_id: logs}, configs, {function_id: get_problem(function_id, dimension)})


def cmd_sweep(logs_pattern: str, configs: list[NetworkConfig], out: str) -> list[Path]:
    """Metrics for every (function, algorithm, config); one table per dimension.

    Also writes, per (dimension, algorithm), the config-by-config overlap
    matrix with the median over functions in each cell.
    """
    if not configs:
        raise UsageError("empty configuration grid")
    logs = _load_logs(logs_pattern)
    groups = defaultdict(list)
    for lg in sorted(logs, key=lambda lg: (lg.dimension, lg.algorithm, lg.function_id, lg.seed)):
        groups[(lg.dimension, lg.algorithm, lg.function_id)].append(lg)
    keys = list(groups)
    results = _map(_sweep_group, [(f, d, groups[(d, a, f)], configs) for d, a, f in keys])

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_dim: dict[int, list[dict]] = defaultdict(list)
    by_dim_algo: dict[tuple[int, str], SweepResult] = {}
    for (d, a, f), res in zip(keys, results):
        by_dim[d].extend(res.rows())
        merged = by_dim_algo.setdefault((d, a), SweepResult(list(configs)))
        merged.cells.update(res.cells)
        merged.overlaps.update(res.overlaps)
        for cell in (c for cells in res.cells.values() for c in cells):
            if cell.error:
                log.warning("cell %s d=%d %s %s failed: %s", f, d, a, cell.config.label(), cell.error)
    written = []
    for d, rows in sorted(by_dim.items()):
        path = out_dir / f"metrics_d{d}.csv"
        path.write_text(export_tables(rows))
        written.append(path)
    labels = [c.label() for c in configs]
    for (d, a), res in sorted(by_dim_algo.items()):
        path = out_dir / f"overlap_d{d}_{a}.csv"
        path.write_text(export_overlap_matrix(labels, res.median_overlap()))
        written.append(path)
    return written


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attractornet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run optimizers and write trajectory logs")
    run.add_argument("--manifest", help="JSON manifest; flags below override its fields")
    run.add_argument("--function", nargs="+")
    run.add_argument("--dim", type=int, nargs="+")
    run.add_argument("--algo", nargs="+")
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--budget", type=int)
    run.add_argument("--out")

    def network_flags(p, multi: bool):
        nargs = "+" if multi else None
        p.add_argument("--logs", required=True, help="log directory or glob pattern")
        p.add_argument("--model", choices=("AN", "STN", "LON"), default="AN")
        p.add_argument("--beta", type=int, nargs=nargs, default=[40] if multi else 40)
        p.add_argument("--epsilon", type=float, nargs=nargs, default=[1e-5] if multi else 1e-5)
        p.add_argument("--k", type=int, default=1, help="STN cadence in generations")
        p.add_argument("--out", required=True)

    build = sub.add_parser("build", help="build one network from logs")
    network_flags(build, multi=False)
    build.add_argument("--format", choices=("graphml", "dot"), default="graphml")

    sweep = sub.add_parser("sweep", help="metrics over beta/epsilon grids")
    network_flags(sweep, multi=True)
    return parser


def _manifest_from_args(args) -> RunManifest:
    data = {}
    if args.manifest:
        try:
            data = json.loads(Path(args.manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read manifest: {exc}") from None
    overrides = {
        "functions": args.function,
        "dimensions": args.dim,
        "algorithms": args.algo,
        "runs_per_cell": args.runs,
        "master_seed": args.seed,
        "budget": args.budget,
        "output_dir": args.out,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    for required in ("functions", "dimensions", "algorithms"):
        if not data.get(required):
            raise UsageError(f"missing {required}")
    try:
        return RunManifest(**data)
    except TypeError as exc:
        raise UsageError(f"bad manifest: {exc}") from None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "run":
            cmd_run(_manifest_from_args(args))
        elif args.command == "build":
            config = NetworkConfig(args.model, beta=args.beta, epsilon=args.epsilon, stn_cadence_k=args.k)
            report = cmd_build(args.logs, config, args.out, args.format)
            print(json.dumps(report))
        else:
            for path in cmd_sweep(args.logs, sweep_configs(args.model, args.beta, args.epsilon, args.k), args.out):
                print(path)
    except (UsageError, NetworkBuildError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
