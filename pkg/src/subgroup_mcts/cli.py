"""Command-line entry point: single runs and experiment batches.

`run` executes one configured search and writes result.csv, checkpoints.csv,
report.txt and figures into the output directory. `bench` executes a matrix
of cells (dataset or generator spec, algorithm, flag overrides, repetitions)
with distinct seeds per repetition and aggregates mean metrics per cell.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import figures
from .baselines import BeamConfig, beam_search, exhaustive_dfs, uniform_sampler
from .dataset import Dataset, load_csv, load_schema
from .generator import GeneratorParams, generate_artificial
from .measures import MeasureSpec
from .mcts import SearchConfig, mcts_search
from .patterns import format_description
from .results import ResultSet, filter_pool, recovery_qual, redundancy

MEASURE_NAMES = {
    "wracc": "wracc",
    "f1": "f1",
    "acc": "accuracy",
    "jaccard": "jaccard",
    "entropy": "entropy_gain",
}

ALGOS = ("mcts", "beam", "exhaustive", "sampler")


def build_run_parser(prog: str = "subgroup-mcts run") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=prog, description="Run one subgroup search.")
    src = p.add_argument_group("data source")
    src.add_argument("--data", metavar="PATH", help="CSV file (schema sidecar: <stem>.schema)")
    src.add_argument("--schema", metavar="PATH", help="override the schema sidecar path")
    src.add_argument("--generate", metavar="SPEC",
                     help="nb_obj,nb_attr,domain_size,nb_patterns,pattern_sup,out_factor,noise_rate")
    p.add_argument("--algo", choices=ALGOS, default="mcts")
    p.add_argument("--measure", choices=sorted(MEASURE_NAMES), default="wracc")
    p.add_argument("--target", help="target class label (default: first label in the data)")
    p.add_argument("--minsupp", type=int, default=1)
    p.add_argument("--maxlen", type=int, default=5)
    p.add_argument("--iterations", type=int, default=10_000,
                   help="iteration budget (mcts) or number of draws (sampler)")
    p.add_argument("--ucb", choices=("ucb1", "uct", "sp_mcts", "ucb1_tuned", "dfs_uct"),
                   default="sp_mcts")
    p.add_argument("--cp", type=float, default=None, help="UCT exploration constant")
    p.add_argument("--c", type=float, default=0.5, help="exploration weight (sp_mcts)")
    p.add_argument("--d", type=float, default=1.0, help="variance inflation (sp_mcts)")
    p.add_argument("--expand", choices=("direct", "gen", "label"), default="label")
    p.add_argument("--dedup", action="append", type=str.lower,
                   choices=("none", "lo", "pu"), default=None,
                   help="duplicate handling: none, LO (lectic order) or PU "
                        "(permutation unification); default PU")
    p.add_argument("--rollout", choices=("naive", "direct_freq", "large_freq"),
                   default="direct_freq")
    p.add_argument("--pathlen", type=int, default=20)
    p.add_argument("--jumplen", type=int, default=30)
    p.add_argument("--reward-agg", choices=("terminal", "random", "max", "mean", "top_k_mean"),
                   default="max")
    p.add_argument("--topk", type=int, default=1,
                   help="k for the top-k reward, memory and update policies")
    p.add_argument("--memory", choices=("none", "all", "top_k"), default="top_k")
    p.add_argument("--update", choices=("max", "mean", "top_k_mean"), default="max")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--maxout", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint-every", type=int, default=1000)
    p.add_argument("--beam-width", type=int, default=50)
    p.add_argument("--out", metavar="DIR", default="out")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    return p


def _validate_args(parser: argparse.ArgumentParser, args) -> None:
    if (args.data is None) == (args.generate is None):
        parser.error("exactly one of --data and --generate is required")
    if args.dedup is None:
        args.dedup = "pu"
    else:
        values = set(args.dedup)
        if len(values) > 1:
            parser.error(f"conflicting --dedup values: {', '.join(sorted(values))} "
                         "(lectic order and permutation unification are exclusive)")
        args.dedup = args.dedup[0]
    if args.ucb == "dfs_uct" and args.dedup != "lo":
        parser.error("--ucb dfs_uct requires --dedup LO")


def parse_generate_spec(text: str, seed: int) -> GeneratorParams:
    parts = text.split(",")
    if len(parts) != 7:
        raise ValueError(f"--generate expects 7 comma-separated fields, got {len(parts)}")
    return GeneratorParams(
        nb_obj=int(parts[0]), nb_attr=int(parts[1]), domain_size=int(parts[2]),
        nb_patterns=int(parts[3]), pattern_sup=int(parts[4]),
        out_factor=float(parts[5]), noise_rate=float(parts[6]), seed=seed)


@dataclass
class RunReport:
    """Everything a single run produced, before serialization."""

    config: dict
    dataset_name: str
    iterations: int
    wall_time_s: float
    pool_size: int
    result: ResultSet
    checkpoints: list = field(default_factory=list)
    recovery: Optional[float] = None
    data: Dataset = field(default=None, repr=False)
    pool_entries: list = field(default_factory=list, repr=False)


def _load_data(args, gen_seed: int):
    if args.generate:
        params = parse_generate_spec(args.generate, gen_seed)
        data, truth = generate_artificial(params)
        return data, truth
    path = Path(args.data)
    schema_path = Path(args.schema) if args.schema else path.with_suffix(".schema")
    schema = load_schema(schema_path)
    return load_csv(path, schema), None


def execute_run(args) -> RunReport:
    """Pure computation for one run (no file output)."""
    master = random.Random(args.seed)
    gen_seed = master.randrange(2**32)
    search_seed = master.randrange(2**32)
    data, truth = _load_data(args, gen_seed)

    target = args.target if args.target is not None else data.classes[0]
    measure = MeasureSpec(MEASURE_NAMES[args.measure], target)
    cfg = SearchConfig(
        measure=measure, budget=args.iterations, min_supp=args.minsupp,
        max_length=args.maxlen, ucb=args.ucb,
        cp=args.cp if args.cp is not None else SearchConfig.cp,
        c=args.c, d=args.d, expand=args.expand, dedup=args.dedup,
        rollout=args.rollout, path_length=args.pathlen, jump_length=args.jumplen,
        reward_agg=args.reward_agg, reward_k=args.topk,
        memory=args.memory, memory_k=args.topk,
        update=args.update, update_k=args.topk,
        theta=args.theta, max_output=args.maxout, seed=search_seed)

    checkpoints: list = []

    def on_checkpoint(cp):
        best = cp.top_entries[0].phi if cp.top_entries else 0.0
        checkpoints.append({
            "iteration": cp.iteration,
            "elapsed_ms": cp.elapsed_s * 1000.0,
            "diversity": sum(e.phi for e in cp.top_entries),
            "best_phi": best,
        })

    t0 = time.perf_counter()
    iterations = 0
    if args.algo == "mcts":
        res = mcts_search(data, cfg, checkpoint_every=args.checkpoint_every,
                          on_checkpoint=on_checkpoint)
        pool, iterations = res.pool, res.iterations
    elif args.algo == "beam":
        pool = beam_search(data, BeamConfig(args.beam_width, args.maxlen,
                                            args.minsupp, measure))
    elif args.algo == "exhaustive":
        pool = exhaustive_dfs(data, args.minsupp, args.maxlen, measure)
    else:
        pool = uniform_sampler(data, args.iterations, args.minsupp, measure,
                               seed=search_seed)
        iterations = args.iterations
    wall = time.perf_counter() - t0

    result = filter_pool(pool.entries(), args.theta, args.maxout)
    recovery = None
    if truth is not None and truth.hidden:
        recovery = recovery_qual(truth.hidden, result.entries, data)

    config_echo = {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_")}
    config_echo["resolved_target"] = target
    config_echo["search_seed"] = search_seed
    config_echo["generator_seed"] = gen_seed
    return RunReport(config_echo, data.name, iterations, wall, len(pool),
                     result, checkpoints, recovery, data, pool.entries())


def _phi_str(x: float) -> str:
    return repr(float(x))


def write_run_outputs(report: RunReport, out_dir: Path, render: bool = True) -> None:
    data = report.data
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "result.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "description", "support", "quality"])
        for rank, entry in enumerate(report.result.entries, start=1):
            writer.writerow([rank, format_description(entry.description, data),
                             entry.support, _phi_str(entry.phi)])
    with (out_dir / "checkpoints.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "elapsed_ms", "diversity", "best_phi"])
        for row in report.checkpoints:
            writer.writerow([row["iteration"], _phi_str(row["elapsed_ms"]),
                             _phi_str(row["diversity"]), _phi_str(row["best_phi"])])
    lines = ["run report", "==========", ""]
    lines.append(f"dataset: {report.dataset_name}")
    for key, value in report.config.items():
        lines.append(f"  {key} = {value}")
    lines.append("")
    lines.append(f"iterations completed: {report.iterations}")
    lines.append(f"wall time: {report.wall_time_s:.3f} s")
    lines.append(f"pool size: {report.pool_size}")
    if report.recovery is not None:
        lines.append(f"ground-truth recovery: {report.recovery:.4f}")
    lines.append("")
    lines.append(f"result set ({len(report.result)} patterns, "
                 f"theta={report.result.theta}, cap={report.result.max_output}):")
    for rank, entry in enumerate(report.result.entries, start=1):
        desc = format_description(entry.description, data) or "<all objects>"
        lines.append(f"  {rank:3d}. phi={entry.phi:.6f} supp={entry.support:5d}  {desc}")
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if render:
        figures.render_checkpoints(report.checkpoints, out_dir / "checkpoints.png")
        figures.render_result(report.result.entries, out_dir / "result.png")


def cmd_run(argv) -> int:
    parser = build_run_parser()
    args = parser.parse_args(argv)
    _validate_args(parser, args)
    report = execute_run(args)
    write_run_outputs(report, Path(args.out), render=not args.no_figures)
    print(f"wrote {args.out}/result.csv ({len(report.result)} patterns, "
          f"pool {report.pool_size}, {report.wall_time_s:.2f}s)")
    return 0


def build_bench_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subgroup-mcts bench",
                                description="Run a matrix of experiment cells.")
    p.add_argument("matrix", help="CSV with columns: data,algo,overrides,reps")
    p.add_argument("--out", metavar="DIR", default="bench_out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    return p


def _run_cell(data_spec: str, algo: str, overrides: str, seed: int) -> RunReport:
    argv = ["--algo", algo, "--seed", str(seed)]
    if data_spec.startswith("gen:"):
        argv += ["--generate", data_spec[len("gen:"):]]
    else:
        argv += ["--data", data_spec]
    for token in overrides.split():
        key, _, value = token.partition("=")
        argv += [f"--{key}", value]
    parser = build_run_parser(prog="bench-cell")
    args = parser.parse_args(argv)
    _validate_args(parser, args)
    return execute_run(args)


def cmd_bench(argv) -> int:
    parser = build_bench_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.matrix, newline="", encoding="utf-8") as fh:
        cells = list(csv.DictReader(fh))

    rows = []
    for cell in cells:
        data_spec = cell["data"]
        algo = cell["algo"]
        overrides = cell.get("overrides") or ""
        reps = int(cell.get("reps") or 1)
        row = {"data": data_spec, "algo": algo, "overrides": overrides, "reps": reps,
               "status": "ok", "recovery_qual": "", "diversity": "", "redundancy": "",
               "runtime_s": ""}
        try:
            recoveries, diversities, redundancies, runtimes = [], [], [], []
            for rep in range(reps):
                report = _run_cell(data_spec, algo, overrides, args.seed + rep)
                theta = report.result.theta
                # diversity of the emitted result set; redundancy of the raw pool
                diversities.append(sum(e.phi for e in report.result.entries))
                redundancies.append(redundancy(report.pool_entries, theta)
                                    if report.pool_entries else 0.0)
                runtimes.append(report.wall_time_s)
                if report.recovery is not None:
                    recoveries.append(report.recovery)
            row["diversity"] = _phi_str(sum(diversities) / reps)
            row["redundancy"] = _phi_str(sum(redundancies) / reps)
            row["runtime_s"] = _phi_str(sum(runtimes) / reps)
            if recoveries:
                row["recovery_qual"] = _phi_str(sum(recoveries) / reps)
        except (Exception, SystemExit) as exc:  # a failing cell must not abort the batch
            row["status"] = f"error: {exc}"
        rows.append(row)

    header = ["data", "algo", "overrides", "reps", "status",
              "recovery_qual", "diversity", "redundancy", "runtime_s"]
    with (out_dir / "bench.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)
    if not args.no_figures:
        figures.render_bench(rows, out_dir / "bench.png")
    print(f"wrote {out_dir}/bench.csv ({len(rows)} cells)")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print("usage: subgroup-mcts {run,bench} ...", file=sys.stderr)
        print("  run    execute one search and write result/checkpoint/report files",
              file=sys.stderr)
        print("  bench  execute an experiment matrix and aggregate metrics",
              file=sys.stderr)
        return 0 if argv else 2
    command, rest = argv[0], argv[1:]
    if command == "run":
        return cmd_run(rest)
    if command == "bench":
        return cmd_bench(rest)
    print(f"unknown command: {command}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
