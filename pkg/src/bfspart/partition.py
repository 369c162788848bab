"""Vertex partitions of weighted graphs: multilevel k-way partitioning,
random baselines, cut metrics and partition file I/O."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from . import _multilevel as ml
from .graph import Graph

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.05
_WEIGHT_RESOLUTION = 2**28


class PartitionFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every vertex to one of ``n_blocks`` blocks."""

    block_of: np.ndarray
    n_blocks: int
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        b = self.block_of
        if b.ndim != 1:
            raise ValueError("block_of must be one-dimensional")
        if len(b) and (b.min() < 0 or b.max() >= self.n_blocks):
            raise ValueError("block id out of range")
        b.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.block_of)

    def block_sizes(self) -> np.ndarray:
        return np.bincount(self.block_of, minlength=self.n_blocks)

    def max_block_size(self) -> int:
        return max_block_size(self.n, self.n_blocks, self.epsilon)

    def is_balanced(self) -> bool:
        return int(self.block_sizes().max(initial=0)) <= self.max_block_size()


def max_block_size(n: int, n_blocks: int, epsilon: float) -> int:
    # small slack guards against (1 + eps) * ceil(n / P) landing a hair under an integer
    return int(math.floor((1.0 + epsilon) * math.ceil(n / n_blocks) + 1e-9))


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """A graph with one non-negative weight per undirected edge.

    ``edge_weight`` is aligned with ``base.indices`` so both orientations of
    an edge carry the same value.
    """

    base: Graph
    edge_weight: np.ndarray

    def __post_init__(self):
        w = self.edge_weight
        if w.shape != self.base.indices.shape:
            raise ValueError("edge_weight must align with the CSR adjacency")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("edge weights must be finite and non-negative")
        w.setflags(write=False)

    @classmethod
    def unit(cls, g: Graph) -> "WeightedGraph":
        return cls(g, np.ones(len(g.indices)))

    @classmethod
    def from_class_table(cls, g: Graph, table: np.ndarray, kappa: np.ndarray) -> "WeightedGraph":
        """Weight edge ``{u, v}`` by ``table[kappa[u], kappa[v]]`` (``table`` symmetric)."""
        return cls(g, np.asarray(table[np.repeat(kappa, g.degrees), kappa[g.indices]], dtype=np.float64))

    def scaled(self, factor: float) -> "WeightedGraph":
        return WeightedGraph(self.base, self.edge_weight * factor)

    def write(self, stream: IO[str]) -> None:
        src = self.base.sources()
        for j in np.flatnonzero(src < self.base.indices):
            stream.write(f"{src[j]} {self.base.indices[j]} {self.edge_weight[j]:.17g}\n")


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def _blocks(part, n: int) -> np.ndarray:
    b = np.asarray(getattr(part, "block_of", part))
    if len(b) != n:
        raise ValueError(f"partition covers {len(b)} vertices, graph has {n}")
    return b


def edge_cut(wg: WeightedGraph, part) -> float:
    """Total weight of edges whose endpoints lie in different blocks."""
    g = wg.base
    b = _blocks(part, g.n)
    src = g.sources()
    crossing = (b[src] != b[g.indices]) & (src < g.indices)
    return float(wg.edge_weight[crossing].sum())


def comm_volume(g: Graph, part) -> int:
    """Sum over vertices of the number of foreign blocks among their neighbours."""
    b = _blocks(part, g.n)
    src = g.sources()
    foreign = b[g.indices] != b[src]
    pairs = np.unique(src[foreign] * (int(b.max(initial=0)) + 1) + b[g.indices][foreign])
    return int(len(pairs))


# ---------------------------------------------------------------------------
# Partitioners
# ---------------------------------------------------------------------------


def random_partition(n: int, n_blocks: int, seed, epsilon: float = DEFAULT_EPSILON) -> Partition:
    """Balanced random assignment: round-robin blocks over a shuffled vertex order."""
    if n_blocks < 1 or n_blocks > n:
        raise ValueError(f"need 1 <= P <= n, got P={n_blocks}, n={n}")
    rng = np.random.default_rng(seed)
    block_of = np.empty(n, dtype=np.int64)
    block_of[rng.permutation(n)] = np.arange(n) % n_blocks
    return Partition(block_of, n_blocks, epsilon)


def _quantize(w: np.ndarray) -> np.ndarray:
    top = float(w.max(initial=0.0))
    if top <= 0.0:
        return np.zeros(len(w), dtype=np.int64)
    q = np.rint(w / top * _WEIGHT_RESOLUTION).astype(np.int64)
    # a positive weight never collapses to zero
    q[(q == 0) & (w > 0)] = 1
    return q


def partition_kway(
    wg: WeightedGraph,
    n_blocks: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    refine_passes: int = 10,
    initial_trials: int = 8,
) -> Partition:
    """Multilevel k-way partition minimising the weighted edge-cut.

    Heavy-edge matching coarsens the graph down to ``max(30 P, 2000)``
    vertices (or until matching stops shrinking it), greedy graph growing
    seeds ``P`` blocks on the coarsest graph (best of ``initial_trials``
    refined attempts), and each uncoarsening step runs
    boundary refinement under the balance limit
    ``(1 + epsilon) * ceil(N / P)``. Should the result cut more weight than a
    random balanced partition with the same seed, the random one is returned.
    """
    g = wg.base
    n = g.n
    if n_blocks < 1 or n_blocks > n:
        raise ValueError(f"need 1 <= P <= N, got P={n_blocks}, N={n}")
    if n_blocks == 1:
        return Partition(np.zeros(n, dtype=np.int64), 1, epsilon)
    rng = np.random.default_rng(seed)
    maxw = max_block_size(n, n_blocks, epsilon)

    xadj = g.indptr.astype(np.int64)
    adjncy = g.indices.astype(np.int64)
    adjwgt = _quantize(wg.edge_weight)
    vwgt = np.ones(n, dtype=np.int64)

    coarsen_to = max(30 * n_blocks, 2000)
    max_vwgt = max(1, int(1.5 * n / coarsen_to))
    levels = []
    cur = (xadj, adjncy, adjwgt, vwgt)
    while len(cur[0]) - 1 > coarsen_to:
        nc = len(cur[0]) - 1
        match = ml.heavy_edge_matching(*cur, rng.permutation(nc), max_vwgt)
        cxadj, cadj, cw, cvw, cmap = ml.contract(*cur, match)
        if len(cxadj) - 1 > 0.95 * nc:
            break
        levels.append((cur, cmap))
        cur = (cxadj, cadj, cw, cvw)
    logger.debug("coarsened %d -> %d vertices in %d levels", n, len(cur[0]) - 1, len(levels))

    part, best = None, None
    for _ in range(max(1, initial_trials)):
        trial = ml.grow_partition(*cur, n_blocks, rng.permutation(len(cur[0]) - 1))
        _refine_level(cur, trial, n_blocks, maxw, rng, refine_passes)
        score = (_overweight(cur[3], trial, n_blocks, maxw), ml.weighted_cut(cur[0], cur[1], cur[2], trial))
        if best is None or score < best:
            part, best = trial, score
    for finer, cmap in reversed(levels):
        part = part[cmap]
        cur = finer
        _refine_level(cur, part, n_blocks, maxw, rng, refine_passes)

    if not ml.enforce_balance(*cur[:4], part, n_blocks, maxw, 1000):
        raise RuntimeError("could not satisfy the balance constraint")
    result = Partition(part, n_blocks, epsilon)
    baseline = random_partition(n, n_blocks, seed, epsilon)
    if edge_cut(wg, baseline) < edge_cut(wg, result):
        logger.warning("multilevel partition lost to the random baseline; using the latter")
        return baseline
    return result


def _overweight(vwgt, part, n_blocks, maxw) -> int:
    return int(np.maximum(np.bincount(part, weights=vwgt, minlength=n_blocks) - maxw, 0).sum())


def _refine_level(graph, part, n_blocks, maxw, rng, passes):
    xadj, adjncy, adjwgt, vwgt = graph
    ml.enforce_balance(xadj, adjncy, adjwgt, vwgt, part, n_blocks, maxw, 20)
    ml.refine_greedy(xadj, adjncy, adjwgt, vwgt, part, n_blocks, maxw, rng.permutation(len(xadj) - 1), passes)


# ---------------------------------------------------------------------------
# Partition files
# ---------------------------------------------------------------------------


def export_partition(part: Partition) -> str:
    """One ``vertex block`` line per vertex."""
    return "".join(f"{v} {b}\n" for v, b in enumerate(part.block_of.tolist()))


def import_partition(
    text: str | Iterable[str],
    n: int,
    n_blocks: int | None = None,
    fmt: str = "pairs",
    epsilon: float = DEFAULT_EPSILON,
) -> Partition:
    """Read a partition written by :func:`export_partition` or by METIS.

    ``fmt="metis"`` expects one block id per line, the line number being the
    vertex id (the ``.part.P`` files gpmetis writes).
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    block_of = np.full(n, -1, dtype=np.int64)
    if fmt == "metis":
        rows = [ln.strip() for ln in lines if ln.strip()]
        if len(rows) != n:
            raise PartitionFormatError(f"expected {n} block ids, found {len(rows)}")
        for v, row in enumerate(rows):
            try:
                block_of[v] = int(row.split()[0])
            except ValueError:
                raise PartitionFormatError(f"line {v + 1}: bad block id {row!r}") from None
    elif fmt == "pairs":
        for lineno, ln in enumerate(lines, start=1):
            s = ln.strip()
            if not s or s[0] in "%#":
                continue
            tok = s.split()
            try:
                v, b = int(tok[0]), int(tok[1])
            except (ValueError, IndexError):
                raise PartitionFormatError(f"line {lineno}: expected 'vertex block', got {s!r}") from None
            if not 0 <= v < n:
                raise PartitionFormatError(f"line {lineno}: vertex {v} out of range")
            if block_of[v] != -1:
                raise PartitionFormatError(f"line {lineno}: vertex {v} listed twice")
            block_of[v] = b
    else:
        raise ValueError(f"unknown partition format {fmt!r}")
    missing = np.flatnonzero(block_of < 0)
    if len(missing):
        raise PartitionFormatError(f"{len(missing)} vertices have no block (first: {missing[0]})")
    if n_blocks is None:
        n_blocks = int(block_of.max()) + 1
    if block_of.max() >= n_blocks:
        raise PartitionFormatError(f"block id {int(block_of.max())} >= P={n_blocks}")
    return Partition(block_of, n_blocks, epsilon)
