"""Undirected graph storage, ingestion, synthetic generators and degree statistics.

Graphs are kept in compressed sparse row form: ``indptr`` has ``n + 1`` offsets
and ``indices[indptr[u]:indptr[u + 1]]`` lists the sorted neighbours of ``u``.
Every undirected edge is stored in both directions.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

logger = logging.getLogger(__name__)

DEFAULT_K_CAP = 300


class GraphFormatError(ValueError):
    """Raised when an edge-list stream cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph in CSR form."""

    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edges(self) -> np.ndarray:
        """Return an ``(m, 2)`` array of undirected edges with ``u < v``."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def sources(self) -> np.ndarray:
        """Source vertex of every CSR entry (aligned with ``indices``)."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    @classmethod
    def from_edges(cls, u: Iterable[int], v: Iterable[int], n: int | None = None) -> "Graph":
        """Build a simple graph; self-loops and repeated pairs are dropped."""
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        if u.shape != v.shape:
            raise ValueError("endpoint arrays differ in length")
        if n is None:
            n = int(max(u.max(initial=-1), v.max(initial=-1))) + 1
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("vertex id out of range")
        keep = u != v
        lo = np.minimum(u[keep], v[keep])
        hi = np.maximum(u[keep], v[keep])
        key = np.unique(lo * n + hi)
        lo, hi = key // n, key % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(indptr, dst.astype(np.int64))

    def to_scipy(self) -> sparse.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def component_labels(self) -> tuple[int, np.ndarray]:
        return csgraph.connected_components(self.to_scipy(), directed=False)

    def largest_component(self) -> np.ndarray:
        """Sorted vertex ids of the largest connected component (lowest label on ties)."""
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        _, labels = self.component_labels()
        sizes = np.bincount(labels)
        return np.flatnonzero(labels == int(np.argmax(sizes)))


# ---------------------------------------------------------------------------
# Edge-list I/O
# ---------------------------------------------------------------------------


def load_edge_list(stream: Iterable[str]) -> Graph:
    """Parse a whitespace separated edge list (Konect/SNAP style).

    Lines starting with ``%`` or ``#`` are comments. Only the first two tokens
    of a line are read; extra columns such as weights or timestamps are
    ignored. Vertex ids are compacted to ``0..N-1`` in first-seen order.
    """
    ids: dict[int, int] = {}
    src: list[int] = []
    dst: list[int] = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "%#":
            continue
        tok = s.split()
        if len(tok) < 2:
            raise GraphFormatError(f"line {lineno}: expected two vertex ids, got {s!r}")
        try:
            a, b = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id in {s!r}") from None
        src.append(ids.setdefault(a, len(ids)))
        dst.append(ids.setdefault(b, len(ids)))
    if not ids:
        raise GraphFormatError("edge list is empty")
    return Graph.from_edges(src, dst, n=len(ids))


def load_edge_list_file(path) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, stream: IO[str]) -> None:
    for u, v in g.edges():
        stream.write(f"{u} {v}\n")


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def generate_er(n: int, m: int, seed: int) -> Graph:
    """Uniform random simple graph with exactly ``m`` edges (G(n, m))."""
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError(f"m={m} exceeds the {total} possible edges on {n} vertices")
    rng = np.random.default_rng(seed)
    if total <= 4_000_000 or m > total // 2:
        iu, ju = np.triu_indices(n, k=1)
        pick = rng.choice(total, size=m, replace=False)
        g = Graph.from_edges(iu[pick], ju[pick], n=n)
    else:
        keys = np.zeros(0, dtype=np.int64)
        while len(keys) < m:
            need = int((m - len(keys)) * 1.1) + 16
            a = rng.integers(0, n, size=need)
            b = rng.integers(0, n, size=need)
            ok = a != b
            k = np.minimum(a[ok], b[ok]) * n + np.maximum(a[ok], b[ok])
            keys = np.concatenate([keys, k])
            _, first = np.unique(keys, return_index=True)
            keys = keys[np.sort(first)]
        keys = keys[:m]
        g = Graph.from_edges(keys // n, keys % n, n=n)
    logger.info("ER graph n=%d m=%d, largest component %d", n, g.m, len(g.largest_component()))
    return g


def power_law_degree_sequence(n: int, alpha: float, kmax: int | None, seed: int) -> np.ndarray:
    """Sample ``n`` degrees with ``P(k) ∝ k**-alpha`` on ``1..kmax``; total is made even."""
    if kmax is None:
        kmax = max(n - 1, 1)
    rng = np.random.default_rng(seed)
    k = np.arange(1, kmax + 1, dtype=np.float64)
    p = k**-alpha
    p /= p.sum()
    deg = rng.choice(np.arange(1, kmax + 1), size=n, p=p)
    if deg.sum() % 2:
        i = int(rng.integers(n))
        deg[i] += 1 if deg[i] < kmax else -1
    return deg.astype(np.int64)


def generate_config_model(degree_sequence: Sequence[int], seed: int) -> Graph:
    """Configuration model: stubs paired uniformly at random.

    Self-loops and parallel edges created by the pairing are discarded, so
    realised degrees can fall slightly below the requested ones.
    """
    deg = np.asarray(degree_sequence, dtype=np.int64)
    if np.any(deg < 0):
        raise ValueError("negative degree")
    if int(deg.sum()) % 2:
        raise ValueError("degree sequence has an odd number of stubs")
    rng = np.random.default_rng(seed)
    stubs = rng.permutation(np.repeat(np.arange(len(deg), dtype=np.int64), deg))
    return Graph.from_edges(stubs[0::2], stubs[1::2], n=len(deg))


def generate_power_law(n: int, alpha: float, seed: int, kmax: int | None = DEFAULT_K_CAP) -> Graph:
    deg = power_law_degree_sequence(n, alpha, kmax, seed)
    return generate_config_model(deg, seed + 1)


# ---------------------------------------------------------------------------
# Degree statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DegreeStats:
    """Capped degree distribution, joint degree distribution and assortativity.

    Arrays are indexed by degree class directly: ``p_k[k]`` for ``k`` in
    ``1..k_cap``; index 0 is always zero. ``n`` counts vertices of degree >= 1,
    the population ``p_k`` is normalised over; ``n_vertices`` counts every
    vertex in scope, isolated ones included.
    """

    p_k: np.ndarray
    joint: np.ndarray
    k_cap: int
    r: float
    n: int
    m: int
    n_vertices: int = field(default=0)

    def to_json(self) -> dict:
        return {
            "N": self.n_vertices,
            "E": self.m,
            "k_cap": self.k_cap,
            "p_k": self.p_k[1:].tolist(),
            "q": self.joint[1:, 1:].ravel().tolist(),
            "r": self.r,
        }


def degree_classes(g: Graph, k_cap: int) -> np.ndarray:
    return np.minimum(g.degrees, k_cap)


def degree_stats(g: Graph, k_cap: int = DEFAULT_K_CAP, vertices: np.ndarray | None = None) -> DegreeStats:
    """Degree statistics of ``g``, or of the vertices in ``vertices`` when given.

    ``vertices`` must be a union of connected components (for instance
    :meth:`Graph.largest_component`) so that no edge leaves the set.
    """
    if k_cap < 1:
        raise ValueError("k_cap must be >= 1")
    kappa = degree_classes(g, k_cap)
    if vertices is None:
        mask = np.ones(g.n, dtype=bool)
    else:
        mask = np.zeros(g.n, dtype=bool)
        mask[np.asarray(vertices, dtype=np.int64)] = True
    active = kappa[mask & (kappa > 0)]
    n_active = len(active)
    p_k = np.bincount(active, minlength=k_cap + 1).astype(np.float64)
    if n_active:
        p_k /= n_active
    inside = np.repeat(mask, g.degrees)
    src = np.repeat(kappa, g.degrees)[inside]
    dst = kappa[g.indices][inside]
    joint = np.zeros((k_cap + 1, k_cap + 1))
    np.add.at(joint, (src, dst), 1.0)
    if len(src):
        joint /= len(src)
    r = 0.0
    if len(src) and src.std() > 0:
        r = float(np.corrcoef(src, dst)[0, 1])
    return DegreeStats(p_k, joint, k_cap, r, n_active, len(src) // 2, int(mask.sum()))


def edge_class_counts(g: Graph, k_cap: int) -> np.ndarray:
    """Number of undirected edges per unordered degree-class pair, stored symmetrically."""
    kappa = degree_classes(g, k_cap)
    c = np.zeros((k_cap + 1, k_cap + 1))
    np.add.at(c, (np.repeat(kappa, g.degrees), kappa[g.indices]), 1.0)
    # both orientations were added; the diagonal holds each edge twice
    c[np.diag_indices_from(c)] /= 2.0
    return c


def write_stats_json(stats: DegreeStats, stream: IO[str]) -> None:
    json.dump(stats.to_json(), stream)
