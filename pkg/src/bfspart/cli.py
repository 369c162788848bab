"""Command line entry point: ``bfspart {stats,partition,bfs,bench}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench import ALL_STRATEGIES, ExperimentConfig, emit_report, load_graph, run_experiment
from .bfs import bfs_trace, peak_stats
from .graph import DEFAULT_K_CAP, GraphFormatError, degree_stats
from .partition import (
    DEFAULT_EPSILON,
    PartitionFormatError,
    WeightedGraph,
    edge_cut,
    export_partition,
    import_partition,
    partition_kway,
)
from .strategies import build_w_avg, build_w_smooth, burn_in

logger = logging.getLogger("bfspart")


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="PATH", help="edge-list file (Konect/SNAP style)")
    src.add_argument("--gen", metavar="SPEC", help="generator: er:N:M or plaw:N:alpha[:kmax]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kmax", type=int, default=DEFAULT_K_CAP, help="degree-class cap (default 300)")


def _add_partition_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--partitions", type=int, default=100, metavar="P")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bfspart", description=__doc__)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="degree distribution, joint degree distribution, assortativity")
    _add_graph_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("partition", help="partition the unweighted or model-weighted graph")
    _add_graph_args(p)
    _add_partition_args(p)
    p.add_argument("--strategy", choices=("baseline", "smooth", "avg"), default="baseline")
    p.add_argument("--burn-in", type=int, default=10)
    p.add_argument("--out", metavar="FILE", help="write 'vertex block' lines here")
    p.add_argument("--weights-out", metavar="FILE", help="write 'u v weight' lines here")

    p = sub.add_parser("bfs", help="message trace of BFS runs under a partition")
    _add_graph_args(p)
    _add_partition_args(p)
    p.add_argument("--root", type=int, action="append", help="root vertex (repeatable)")
    p.add_argument("--roots", type=int, default=1, help="number of random roots when --root is absent")
    p.add_argument("--partition-file", metavar="PATH", help="use this partition instead of computing one")
    p.add_argument("--partition-format", choices=("pairs", "metis"), default="pairs")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("bench", help="paired strategy comparison over random roots")
    _add_graph_args(p)
    _add_partition_args(p)
    p.add_argument("--roots", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=10)
    p.add_argument("--strategy", choices=ALL_STRATEGIES + ("all",), action="append")
    p.add_argument("--smooth-alpha", type=float, default=1.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", metavar="DIR", default="bench_out")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="stdout summary format")
    return ap


def _config(args) -> ExperimentConfig:
    strategies = args.strategy if getattr(args, "strategy", None) else ["all"]
    if isinstance(strategies, str):
        strategies = [strategies]
    if "all" in strategies:
        strategies = list(ALL_STRATEGIES)
    return ExperimentConfig(
        graph=args.graph,
        gen=args.gen,
        partitions=getattr(args, "partitions", 100),
        roots=getattr(args, "roots", 500),
        burn_in=getattr(args, "burn_in", 10),
        k_cap=args.kmax,
        epsilon=getattr(args, "epsilon", DEFAULT_EPSILON),
        seed=args.seed,
        strategies=tuple(dict.fromkeys(strategies)),
        smooth_alpha=getattr(args, "smooth_alpha", 1.0),
        jobs=getattr(args, "jobs", 1),
        out=getattr(args, "out", None),
    )


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_stats(args) -> None:
    g = load_graph(_config(args))
    st = degree_stats(g, args.kmax)
    if args.format == "json":
        _write(json.dumps(st.to_json()) + "\n", args.out)
        return
    rows = [("k", "p_k")] + [(k, repr(float(st.p_k[k]))) for k in range(1, st.k_cap + 1)]
    _write("".join(f"{a},{b}\n" for a, b in rows), args.out)


def cmd_partition(args) -> None:
    cfg = _config(args)
    g = load_graph(cfg)
    unit = WeightedGraph.unit(g)
    base = partition_kway(unit, args.partitions, args.epsilon, args.seed)
    wg = unit
    if args.strategy != "baseline":
        burn = burn_in(g, base, args.burn_in, args.seed + 1, args.kmax)
        if args.strategy == "smooth":
            wg = build_w_smooth(g, burn.class_counts)
        else:
            wg = build_w_avg(g, degree_stats(g, args.kmax), burn.frontier_sizes, burn.modal_peak)
    part = base if wg is unit else partition_kway(wg, args.partitions, args.epsilon, args.seed)
    logger.info("weighted cut %.6g, unit cut %d", edge_cut(wg, part), int(edge_cut(unit, part)))
    _write(export_partition(part), args.out)
    if args.weights_out:
        with open(args.weights_out, "w") as fh:
            wg.write(fh)


def cmd_bfs(args) -> None:
    cfg = _config(args)
    g = load_graph(cfg)
    if args.partition_file:
        part = import_partition(Path(args.partition_file).read_text(), g.n, fmt=args.partition_format)
    else:
        part = partition_kway(WeightedGraph.unit(g), args.partitions, args.epsilon, args.seed)
    if args.root:
        roots = args.root
    else:
        rng = np.random.default_rng(args.seed + 2)
        roots = rng.choice(g.largest_component(), size=args.roots).tolist()
    traces = [bfs_trace(g, part, int(r)) for r in roots]
    if args.format == "json":
        payload = []
        for t in traces:
            d = t.to_json()
            d["peak_share"] = peak_stats(t)[1]
            payload.append(d)
        _write(json.dumps(payload, indent=1) + "\n", args.out)
        return
    lines = [("root", "iteration", "frontier_size", "messages_cross", "messages_total")]
    for t in traces:
        for tau in range(t.iteration_count):
            lines.append(
                (t.root, tau, int(t.frontier_sizes[tau]), int(t.messages_cross[tau]), int(t.messages_total[tau]))
            )
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(lines)
    _write(buf.getvalue(), args.out)


def cmd_bench(args) -> None:
    cfg = _config(args)
    report = run_experiment(cfg)
    written = emit_report(report, args.out)
    logger.info("wrote %s", ", ".join(p.name for p in written))
    s = report.summary["strategies"]
    if args.format == "json":
        sys.stdout.write(json.dumps(s, indent=2) + "\n")
    else:
        sys.stdout.write("strategy,mean_rho_peak,ci_low,ci_high,mean_rho_total\n")
        for name, v in s.items():
            lo, hi = v["rho_peak_ci95"]
            sys.stdout.write(f"{name},{v['mean_rho_peak']:.4f},{lo:.4f},{hi:.4f},{v['mean_rho_total']:.4f}\n")


COMMANDS = {"stats": cmd_stats, "partition": cmd_partition, "bfs": cmd_bfs, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        COMMANDS[args.command](args)
    except (OSError, ValueError, IndexError, GraphFormatError, PartitionFormatError, RuntimeError) as exc:
        print(f"bfspart: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
