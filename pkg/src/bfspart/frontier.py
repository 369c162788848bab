"""Continuous-time model of BFS frontier composition on configuration-model graphs.

Every stub gets a uniform time in ``[0, 1]``; a degree-``k`` vertex is touched
once its earliest stub time has passed, so by time ``t`` a fraction
``p_k (1 - (1 - t)**k)`` of all vertices are touched degree-``k`` vertices.
Matching the cumulative BFS coverage ``n_tau / N`` against that curve gives a
time per iteration, and differencing the per-degree curves gives the share of
each degree class used by each frontier.

Degree-indexed arrays follow :class:`~bfspart.graph.DegreeStats`: index ``k``
is degree class ``k`` and index 0 is unused.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import DegreeStats, Graph, degree_classes

_BISECT_TOL = 1e-10


def _check_time(t):
    t = np.asarray(t, dtype=np.float64)
    if np.any((t < 0.0) | (t > 1.0)) or np.any(np.isnan(t)):
        raise ValueError("time must lie in [0, 1]")
    return t


def touched_fraction_k(p_k: np.ndarray, k: int, t):
    """Fraction of all vertices that are degree-``k`` and touched by time ``t``."""
    t = _check_time(t)
    return p_k[k] * (1.0 - (1.0 - t) ** k)


def _touched(p_k: np.ndarray, t: np.ndarray) -> np.ndarray:
    # sum_k p_k (1 - (1 - t)^k) for a vector of times; exact at t = 0 and t = 1
    k = np.arange(1, len(p_k), dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_s = np.log1p(-np.atleast_1d(t))
    hit = -np.expm1(np.multiply.outer(log_s, k))
    return (hit @ p_k[1:]) / p_k[1:].sum()


def touched_fraction(p_k: np.ndarray, t):
    """Fraction of vertices of any degree touched by time ``t``: ``1 - sum_k p_k (1-t)^k``."""
    t = _check_time(t)
    out = _touched(p_k, t)
    return out.reshape(t.shape) if t.ndim else float(out[0])


def invert_touched_fraction(p_k: np.ndarray, y):
    """Time ``t`` with ``touched_fraction(p_k, t) == y``, by bisection on ``[0, 1]``."""
    y = np.asarray(y, dtype=np.float64)
    if np.any((y < 0.0) | (y > 1.0)):
        raise ValueError("coverage fraction must lie in [0, 1]")
    flat = np.atleast_1d(y).ravel()
    lo = np.zeros_like(flat)
    hi = np.ones_like(flat)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _touched(p_k, mid)
        below = fm < flat
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo < 1e-16):
            break
    t = 0.5 * (lo + hi)
    t = np.where(flat <= 0.0, 0.0, np.where(flat >= 1.0, 1.0, t))
    err = np.abs(_touched(p_k, t) - flat)
    if np.any(err > _BISECT_TOL):
        # only reachable when p_k is not a distribution (f(1) != 1)
        raise ValueError("coverage fraction is not attainable for this degree distribution")
    return t.reshape(y.shape) if y.ndim else float(t[0])


@dataclass(frozen=True, eq=False)
class FrontierProfile:
    """Predicted per-iteration degree make-up of BFS frontiers.

    Attributes:
        frontier_sizes: ``|V_tau|`` per iteration (iteration 0 is the root frontier).
        cumulative: ``n_tau``, vertices touched up to and including iteration ``tau``.
        times: stub time ``t_tau`` matching ``n_tau / N``.
        class_counts: expected frontier vertices per degree class ``n_k^tau``
            (rows = iterations), floored at zero.
        frontier_dist: ``class_counts`` row-normalised (zero rows stay zero).
        usage: probability a degree-``k`` vertex is in frontier ``tau``.
    """

    frontier_sizes: np.ndarray
    cumulative: np.ndarray
    times: np.ndarray
    class_counts: np.ndarray
    frontier_dist: np.ndarray
    usage: np.ndarray

    @property
    def iteration_count(self) -> int:
        return len(self.frontier_sizes)

    def to_json(self) -> dict:
        return {
            "frontier_sizes": self.frontier_sizes.tolist(),
            "cumulative": self.cumulative.tolist(),
            "times": self.times.tolist(),
            "usage": self.usage[:, 1:].tolist(),
        }


def build_frontier_profile(stats: DegreeStats, frontier_sizes: Sequence[float]) -> FrontierProfile:
    sizes = np.asarray(frontier_sizes, dtype=np.float64)
    if sizes.ndim != 1 or len(sizes) == 0:
        raise ValueError("frontier_sizes must be a non-empty sequence")
    if np.any(sizes < 0):
        raise ValueError("negative frontier size")
    n = stats.n
    cumulative = np.cumsum(sizes)
    if cumulative[-1] > n + 1e-9:
        raise ValueError(f"frontiers cover {cumulative[-1]:g} vertices but the graph has {n}")
    p_k = stats.p_k
    k = np.arange(len(p_k))
    times = np.asarray(invert_touched_fraction(p_k, np.minimum(cumulative / n, 1.0)))

    T = len(sizes)
    counts = np.zeros((T, len(p_k)))
    seen = np.zeros(len(p_k))
    for tau in range(T):
        per_k = p_k * (1.0 - (1.0 - times[tau]) ** k)
        total = per_k.sum()
        expected = per_k / total * cumulative[tau] if total > 0 else np.zeros_like(per_k)
        row = np.maximum(expected - seen, 0.0)
        counts[tau] = row
        seen += row

    row_sums = counts.sum(axis=1, keepdims=True)
    dist = np.divide(counts, row_sums, out=np.zeros_like(counts), where=row_sums > 0)
    denom = p_k * n
    usage = np.divide(counts, denom, out=np.zeros_like(counts), where=denom > 0)
    np.clip(usage, 0.0, 1.0, out=usage)
    return FrontierProfile(sizes, cumulative, times, counts, dist, usage)


def transition_matrix(profile: FrontierProfile, stats: DegreeStats, tau: int) -> np.ndarray:
    """``P[k, k'] = usage[tau, k] * joint[k, k'] * usage[tau + 1, k']``."""
    if not 0 <= tau < profile.iteration_count - 1:
        raise IndexError(f"tau={tau} needs iterations tau and tau+1 in a profile of length {profile.iteration_count}")
    return np.outer(profile.usage[tau], profile.usage[tau + 1]) * stats.joint


def combine_directions(p: np.ndarray) -> np.ndarray:
    """Probability an edge is used in exactly one direction (inclusion-exclusion)."""
    return p + p.T - p * p.T


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Expected message weight per (capped) degree-class pair at iteration ``tau``."""

    tau: int
    w: np.ndarray

    @property
    def k_cap(self) -> int:
        return self.w.shape[0] - 1

    def to_json(self) -> dict:
        return {"tau": self.tau, "k_cap": self.k_cap, "w": self.w[1:, 1:].ravel().tolist()}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def message_weight_table(profile: FrontierProfile, stats: DegreeStats, tau: int) -> WeightTable:
    w = combine_directions(transition_matrix(profile, stats, tau))
    return WeightTable(tau, np.clip(w, 0.0, 1.0))


def per_edge_table(table: WeightTable, stats: DegreeStats) -> WeightTable:
    """Spread a class-level table over the edges of each class.

    Entries of ``table`` inherit the scale of the joint distribution: they are
    shares of the ordered edge-endpoint population. Dividing by the share each
    class pair holds turns them into expected messages per edge, the scale
    :func:`expected_cut` needs to predict real message totals.
    """
    joint = stats.joint
    w = np.divide(table.w, joint, out=np.zeros_like(table.w), where=joint > 0)
    return WeightTable(table.tau, w)


def expected_cut(g: Graph, partition, table: WeightTable) -> float:
    """Sum of ``table`` weights over undirected edges whose endpoints sit in different blocks.

    ``partition`` is a :class:`~bfspart.partition.Partition` or a plain block-id array.
    """
    block_of = np.asarray(getattr(partition, "block_of", partition))
    if len(block_of) != g.n:
        raise ValueError(f"partition covers {len(block_of)} vertices, graph has {g.n}")
    e = g.edges()
    if len(e) == 0:
        return 0.0
    cross = block_of[e[:, 0]] != block_of[e[:, 1]]
    kappa = degree_classes(g, table.k_cap)
    return float(table.w[kappa[e[cross, 0]], kappa[e[cross, 1]]].sum())
