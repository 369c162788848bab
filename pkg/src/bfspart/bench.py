"""Paired experiment driver: every strategy is evaluated on the same roots and
compared against the unweighted partition root by root."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .bfs import bfs_trace, peak_stats
from .frontier import build_frontier_profile, expected_cut, message_weight_table, per_edge_table
from .graph import (
    DEFAULT_K_CAP,
    Graph,
    degree_stats,
    generate_er,
    generate_power_law,
    load_edge_list_file,
)
from .partition import DEFAULT_EPSILON, WeightedGraph, partition_kway
from .strategies import StrategyKind, build_w_avg, build_w_emp, build_w_smooth, burn_in

logger = logging.getLogger(__name__)

ALL_STRATEGIES = tuple(s.value for s in StrategyKind)
RESULT_FIELDS = ("root", "strategy", "peak", "peak_messages", "total_messages", "rho_peak", "rho_total")


@dataclass
class ExperimentConfig:
    graph: str | None = None
    gen: str | None = None
    partitions: int = 100
    roots: int = 500
    burn_in: int = 10
    k_cap: int = DEFAULT_K_CAP
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    strategies: tuple[str, ...] = ALL_STRATEGIES
    smooth_alpha: float = 1.0
    jobs: int = 1
    out: str | None = None


@dataclass
class BenchReport:
    config: ExperimentConfig
    records: list[dict]
    summary: dict
    peak_shares: list[float] = field(default_factory=list)
    expected_vs_actual: list[tuple[int, float, int]] = field(default_factory=list)


def parse_generator(spec: str, seed: int) -> Graph:
    """``er:N:M`` or ``plaw:N:alpha[:kmax]``."""
    kind, *args = spec.split(":")
    try:
        if kind == "er" and len(args) == 2:
            return generate_er(int(args[0]), int(args[1]), seed)
        if kind == "plaw" and len(args) in (2, 3):
            kmax = int(args[2]) if len(args) == 3 else DEFAULT_K_CAP
            return generate_power_law(int(args[0]), float(args[1]), seed, kmax=kmax)
    except ValueError as exc:
        raise ValueError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValueError(f"bad generator spec {spec!r}; expected er:N:M or plaw:N:alpha[:kmax]")


def load_graph(cfg: ExperimentConfig) -> Graph:
    if (cfg.graph is None) == (cfg.gen is None):
        raise ValueError("give exactly one of a graph file or a generator spec")
    if cfg.graph is not None:
        return load_edge_list_file(cfg.graph)
    return parse_generator(cfg.gen, cfg.seed)


def _rho(base: float, other: float) -> float:
    return 100.0 * (base - other) / base if base else 0.0


def _map(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def run_experiment(cfg: ExperimentConfig, graph: Graph | None = None) -> BenchReport:
    started = time.perf_counter()
    g = graph if graph is not None else load_graph(cfg)
    strategies = [StrategyKind(s).value for s in cfg.strategies]
    if StrategyKind.BASELINE.value in strategies:
        strategies.remove(StrategyKind.BASELINE.value)
    strategies = [StrategyKind.BASELINE.value] + strategies

    stats = degree_stats(g, cfg.k_cap)
    component = g.largest_component()
    if len(component) < 2:
        raise ValueError("largest connected component has fewer than two vertices")
    if len(component) < g.n:
        logger.info("roots restricted to the largest component (%d of %d vertices)", len(component), g.n)

    def part_of(wg):
        return partition_kway(wg, cfg.partitions, cfg.epsilon, cfg.seed)

    partitions = {"baseline": part_of(WeightedGraph.unit(g))}
    burn = burn_in(g, partitions["baseline"], cfg.burn_in, cfg.seed + 1, cfg.k_cap, component)
    if "smooth" in strategies:
        partitions["smooth"] = part_of(build_w_smooth(g, burn.class_counts, cfg.smooth_alpha))
    if "avg" in strategies:
        partitions["avg"] = part_of(build_w_avg(g, stats, burn.frontier_sizes, burn.modal_peak))

    rng = np.random.default_rng(cfg.seed + 2)
    roots = rng.choice(component, size=cfg.roots, replace=cfg.roots > len(component))
    want_emp = "emp" in strategies

    def one_root(root):
        root = int(root)
        tb = bfs_trace(g, partitions["baseline"], root, collect_classes=want_emp, k_cap=cfg.k_cap)
        tau, share = peak_stats(tb)
        base_peak, base_total = int(tb.messages_cross[tau]), int(tb.messages_cross.sum())
        rows = []
        for s in strategies:
            if s == "baseline":
                peak_msgs, total_msgs = base_peak, base_total
            else:
                p = part_of(build_w_emp(g, tb.class_counts)) if s == "emp" else partitions[s]
                t = bfs_trace(g, p, root)
                peak_msgs, total_msgs = int(t.messages_cross[tau]), int(t.messages_cross.sum())
            rows.append(
                {
                    "root": root,
                    "strategy": s,
                    "peak": tau,
                    "peak_messages": peak_msgs,
                    "total_messages": total_msgs,
                    "rho_peak": _rho(base_peak, peak_msgs),
                    "rho_total": _rho(base_total, total_msgs),
                }
            )
        estimate = float("nan")
        if tau >= 1:
            profile = build_frontier_profile(stats, tb.frontier_sizes)
            table = per_edge_table(message_weight_table(profile, stats, tau - 1), stats)
            estimate = expected_cut(g, partitions["baseline"], table)
        return rows, share, (root, estimate, base_peak)

    results = _map(one_root, roots, cfg.jobs)
    records = [r for rows, _, _ in results for r in rows]
    report = BenchReport(
        config=cfg,
        records=records,
        summary={},
        peak_shares=[s for _, s, _ in results],
        expected_vs_actual=[e for _, _, e in results],
    )
    report.summary = summarize(records)
    report.summary.update(
        {
            "graph": {"N": g.n, "E": g.m, "r": stats.r, "component": int(len(component))},
            "burn_in": {"profile": burn.frontier_sizes.tolist(), "modal_peak": burn.modal_peak},
            "peak_share": _describe(report.peak_shares),
            "estimate": estimate_error(report.expected_vs_actual),
        }
    )
    logger.info("experiment finished in %.1fs", time.perf_counter() - started)
    return report


def _describe(values: Sequence[float]) -> dict:
    v = np.asarray(values, dtype=np.float64)
    v = v[np.isfinite(v)]
    if len(v) == 0:
        return {"n": 0}
    return {"n": int(len(v)), "mean": float(v.mean()), "median": float(np.median(v)), "std": float(v.std())}


def estimate_error(pairs: Sequence[tuple[int, float, int]]) -> dict:
    """Relative error of the expected cut against the observed crossing messages at the peak."""
    est = np.array([p[1] for p in pairs], dtype=np.float64)
    act = np.array([p[2] for p in pairs], dtype=np.float64)
    ok = np.isfinite(est) & (act > 0)
    if not np.any(ok):
        return {"n": 0}
    rel = (est[ok] - act[ok]) / act[ok]
    return {
        "n": int(ok.sum()),
        "mean_relative_error": float(rel.mean()),
        "median_signed_error": float(np.median(est[ok] - act[ok])),
        "mean_expected": float(est[ok].mean()),
        "mean_actual": float(act[ok].mean()),
    }


def bootstrap_mean_ci(values: Sequence[float], seed: int = 0, confidence: float = 0.95) -> tuple[float, float]:
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 2 or np.all(v == v[0]):
        return float(v.mean()) if len(v) else 0.0, float(v.mean()) if len(v) else 0.0
    res = sps.bootstrap(
        (v,),
        np.mean,
        confidence_level=confidence,
        n_resamples=9999,
        method="percentile",
        random_state=np.random.default_rng(seed),
    )
    return float(res.confidence_interval.low), float(res.confidence_interval.high)


def summarize(records: Sequence[dict]) -> dict:
    """Aggregates that can be recomputed from ``results.csv`` alone."""
    by: dict[str, list[dict]] = {}
    for r in records:
        by.setdefault(r["strategy"], []).append(r)
    out: dict = {"strategies": {}}
    for s, rows in by.items():
        peak = [float(r["rho_peak"]) for r in rows]
        total = [float(r["rho_total"]) for r in rows]
        lo, hi = bootstrap_mean_ci(peak)
        out["strategies"][s] = {
            "n": len(rows),
            "mean_rho_peak": float(np.mean(peak)),
            "mean_rho_total": float(np.mean(total)),
            "rho_peak_ci95": [lo, hi],
            "mean_peak_messages": float(np.mean([int(r["peak_messages"]) for r in rows])),
            "mean_total_messages": float(np.mean([int(r["total_messages"]) for r in rows])),
        }
    base = by.get("baseline", [])
    hist: dict[int, int] = {}
    for r in base:
        hist[int(r["peak"])] = hist.get(int(r["peak"]), 0) + 1
    out["peak_histogram"] = {str(k): hist[k] for k in sorted(hist)}
    return out


def is_unimodal(values: Sequence[float], min_relative_height: float = 0.1) -> bool:
    """True when a Gaussian KDE of ``values`` has a single local maximum above
    ``min_relative_height`` of its global maximum."""
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 3 or np.ptp(v) == 0:
        return True
    kde = sps.gaussian_kde(v)
    d = np.concatenate([[-np.inf], kde(np.linspace(v.min(), v.max(), 512)), [-np.inf]])
    mid = d[1:-1]
    peaks = (mid > d[:-2]) & (mid >= d[2:]) & (mid >= min_relative_height * mid.max())
    return int(peaks.sum()) == 1


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def results_csv(records: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for r in records:
        w.writerow([_fmt(r[f]) for f in RESULT_FIELDS])
    return buf.getvalue()


def read_results_csv(text: str) -> list[dict]:
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append(
            {
                "root": int(r["root"]),
                "strategy": r["strategy"],
                "peak": int(r["peak"]),
                "peak_messages": int(r["peak_messages"]),
                "total_messages": int(r["total_messages"]),
                "rho_peak": float(r["rho_peak"]),
                "rho_total": float(r["rho_total"]),
            }
        )
    return rows


def _histogram_csv(values: Sequence[float], bins: int, header: str) -> str:
    v = np.asarray([x for x in values if np.isfinite(x)], dtype=np.float64)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_low", "bin_high", header])
    if len(v):
        counts, edges = np.histogram(v, bins=bins)
        for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
            w.writerow([repr(float(lo)), repr(float(hi)), int(c)])
    return buf.getvalue()


def emit_report(report: BenchReport, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    files["results.csv"] = results_csv(report.records)
    summary = dict(report.summary)
    summary["config"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(report.config).items()}
    files["summary.json"] = json.dumps(summary, indent=2, sort_keys=True) + "\n"

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["peak_iteration", "count"])
    for k, c in report.summary["peak_histogram"].items():
        w.writerow([k, c])
    files["peak_histogram.csv"] = buf.getvalue()
    files["peak_share_histogram.csv"] = _histogram_csv(report.peak_shares, 20, "count")
    for s in report.summary["strategies"]:
        rho = [r["rho_peak"] for r in report.records if r["strategy"] == s]
        files[f"rho_histogram_{s}.csv"] = _histogram_csv(rho, 30, "count")

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["root", "expected", "actual"])
    for root, est, act in report.expected_vs_actual:
        w.writerow([root, repr(float(est)), act])
    files["expected_vs_actual.csv"] = buf.getvalue()

    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        written.append(path)
    return written
