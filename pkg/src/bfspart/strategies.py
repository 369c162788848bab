"""Edge weightings that compete against the unweighted partition.

* ``baseline`` - unit weights.
* ``emp`` - per-edge message counts observed at the peak of the very BFS
  being evaluated (an oracle; it sees the answer).
* ``smooth`` - peak message counts averaged over burn-in runs, with
  additive smoothing.
* ``avg`` - predicted per-class message weights from the frontier model,
  needing only degree statistics and an average frontier-size profile.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bfs import MessageTrace, bfs_trace
from .frontier import build_frontier_profile, message_weight_table
from .graph import DEFAULT_K_CAP, DegreeStats, Graph, degree_classes, edge_class_counts
from .partition import WeightedGraph

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-6


class StrategyKind(str, enum.Enum):
    BASELINE = "baseline"
    EMP = "emp"
    SMOOTH = "smooth"
    AVG = "avg"


@dataclass(frozen=True, eq=False)
class BurnIn:
    """Summary of the preliminary BFS runs."""

    roots: np.ndarray
    frontier_sizes: np.ndarray
    modal_peak: int
    traces: list[MessageTrace]

    @property
    def class_counts(self) -> list[np.ndarray]:
        return [t.class_counts for t in self.traces]


def mean_profile(traces: Sequence[MessageTrace]) -> np.ndarray:
    """Iteration-wise mean frontier size, shorter traces padded with zeros, rounded."""
    T = max(t.iteration_count for t in traces)
    acc = np.zeros(T)
    for t in traces:
        acc[: t.iteration_count] += t.frontier_sizes
    return np.rint(acc / len(traces)).astype(np.int64)


def modal_peak(traces: Sequence[MessageTrace]) -> int:
    counts = Counter(t.peak_iteration for t in traces)
    best = max(counts.values())
    return min(tau for tau, c in counts.items() if c == best)


def burn_in(
    g: Graph,
    part0,
    runs: int,
    seed,
    k_cap: int = DEFAULT_K_CAP,
    candidates: np.ndarray | None = None,
) -> BurnIn:
    """BFS from ``runs`` random roots, collecting peak-iteration message classes.

    Roots are drawn without replacement from ``candidates`` (default: the
    largest connected component).
    """
    if runs < 1:
        raise ValueError("need at least one burn-in run")
    if candidates is None:
        candidates = g.largest_component()
    rng = np.random.default_rng(seed)
    roots = rng.choice(candidates, size=runs, replace=runs > len(candidates))
    traces = [bfs_trace(g, part0, int(r), collect_classes=True, k_cap=k_cap) for r in roots]
    return BurnIn(np.asarray(roots), mean_profile(traces), modal_peak(traces), traces)


def _floored(w: np.ndarray) -> np.ndarray:
    top = float(w.max(initial=0.0))
    if top <= 0.0:
        return np.ones_like(w)
    return np.maximum(w, WEIGHT_FLOOR * top)


def build_w_avg(
    g: Graph,
    stats: DegreeStats,
    frontier_sizes: Sequence[float],
    peak: int | None = None,
) -> WeightedGraph:
    """Weight each edge by the predicted weight of its degree-class pair for the
    messages that deliver the peak frontier (the step ``peak - 1 -> peak``)."""
    sizes = np.array(frontier_sizes, dtype=np.float64)
    excess = sizes.sum() - stats.n
    if excess > 0:
        # rounded averages can overshoot the vertex count by a few units
        sizes[np.argmax(sizes)] -= excess
    if peak is None:
        peak = int(np.argmax(sizes))
    if not 1 <= peak < len(sizes):
        logger.warning("no expansion step leads into frontier %d; using unit weights", peak)
        return WeightedGraph.unit(g)
    profile = build_frontier_profile(stats, sizes)
    table = message_weight_table(profile, stats, peak - 1)
    wg = WeightedGraph.from_class_table(g, table.w, degree_classes(g, stats.k_cap))
    return WeightedGraph(g, _floored(wg.edge_weight))


def _per_edge_weights(g: Graph, counts: np.ndarray) -> WeightedGraph:
    k_cap = counts.shape[0] - 1
    edges = edge_class_counts(g, k_cap)
    table = np.divide(counts, edges, out=np.zeros_like(counts), where=edges > 0)
    wg = WeightedGraph.from_class_table(g, table, degree_classes(g, k_cap))
    return WeightedGraph(g, _floored(wg.edge_weight))


def build_w_emp(g: Graph, class_counts: np.ndarray) -> WeightedGraph:
    """Observed messages per edge of each degree-class pair (``class_counts`` symmetric)."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if not np.any(counts > 0):
        raise ValueError("class counts are empty")
    return _per_edge_weights(g, counts)


def build_w_smooth(g: Graph, class_counts: Sequence[np.ndarray], alpha: float = 1.0) -> WeightedGraph:
    """Mean of several runs' class counts plus ``alpha`` on every class pair present in ``g``."""
    if len(class_counts) == 0:
        raise ValueError("need at least one run")
    mean = np.mean(np.stack(class_counts), axis=0)
    present = edge_class_counts(g, mean.shape[0] - 1) > 0
    smoothed = mean + alpha * present
    if not np.any(smoothed > 0):
        return WeightedGraph.unit(g)
    return _per_edge_weights(g, smoothed)
