"""Level-synchronous BFS that tallies the notification messages a 1-D
partitioned parallel run would exchange.

When frontier ``V_{tau-1}`` is expanded, every edge ``u -> v`` with ``u`` in
that frontier and ``v`` untouched (in no frontier so far) yields one message
announcing ``v`` as a member of ``V_tau``. Repeated discoveries of the same
vertex all count; edges between two vertices of the same frontier carry no
message. A message costs communication only when ``u`` and ``v`` live in
different blocks.

``messages_cross[tau]`` and ``messages_total[tau]`` hold the messages that
deliver frontier ``tau``; they are indexed like ``frontier_sizes`` and entry
0 is always zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import DEFAULT_K_CAP, Graph, degree_classes


@dataclass(frozen=True, eq=False)
class MessageTrace:
    root: int
    frontier_sizes: np.ndarray
    messages_cross: np.ndarray
    messages_total: np.ndarray
    class_counts: np.ndarray | None = field(default=None, repr=False)

    @property
    def peak_iteration(self) -> int:
        return int(np.argmax(self.frontier_sizes))

    @property
    def iteration_count(self) -> int:
        return len(self.frontier_sizes)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "frontier_sizes": self.frontier_sizes.tolist(),
            "messages_cross": self.messages_cross.tolist(),
            "messages_total": self.messages_total.tolist(),
            "peak": self.peak_iteration,
        }


def _expand(g: Graph, frontier: np.ndarray):
    """All CSR entries leaving ``frontier`` as (source, target) arrays."""
    starts = g.indptr[frontier]
    lengths = g.indptr[frontier + 1] - starts
    total = int(lengths.sum())
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    idx = offsets + np.arange(total)
    return np.repeat(frontier, lengths), g.indices[idx]


def _walk(g: Graph, root: int, block_of=None, class_tau=None, kappa=None, k_cap=0, with_parents=False):
    if not 0 <= root < g.n:
        raise IndexError(f"root {root} out of range for a graph with {g.n} vertices")
    level = np.full(g.n, -1, dtype=np.int64)
    parent = np.full(g.n, -1, dtype=np.int64)
    level[root] = 0
    frontier = np.array([root], dtype=np.int64)
    sizes, cross, total = [], [0], [0]
    classes = None
    tau = 0
    while len(frontier):
        sizes.append(len(frontier))
        src, dst = _expand(g, frontier)
        live = level[dst] == -1
        src, dst = src[live], dst[live]
        if not len(dst):
            break
        total.append(len(dst))
        cross.append(int(np.count_nonzero(block_of[src] != block_of[dst])) if block_of is not None else 0)
        if class_tau is not None and tau + 1 == class_tau:
            m = np.zeros((k_cap + 1, k_cap + 1))
            np.add.at(m, (kappa[src], kappa[dst]), 1.0)
            classes = symmetrize_counts(m)
        nxt = np.unique(dst)
        if with_parents:
            # parent = lowest-id discoverer
            order = np.lexsort((src, dst))
            d_sorted = dst[order]
            first = np.r_[True, d_sorted[1:] != d_sorted[:-1]]
            parent[d_sorted[first]] = src[order][first]
        level[nxt] = tau + 1
        frontier = nxt
        tau += 1
    return (
        np.asarray(sizes, dtype=np.int64),
        np.asarray(cross, dtype=np.int64),
        np.asarray(total, dtype=np.int64),
        classes,
        level,
        parent,
    )


def symmetrize_counts(m: np.ndarray) -> np.ndarray:
    """Fold directed class counts onto unordered class pairs, stored symmetrically."""
    return m + m.T - np.diag(np.diag(m))


def bfs_trace(
    g: Graph,
    part,
    root: int,
    collect_classes: bool = False,
    k_cap: int = DEFAULT_K_CAP,
    class_tau: int | None = None,
) -> MessageTrace:
    """Run BFS from ``root`` and count messages per iteration under ``part``.

    With ``collect_classes`` the messages delivering frontier ``class_tau``
    (default: the peak iteration) are also binned by the capped degrees of
    their endpoints.
    """
    block_of = np.asarray(getattr(part, "block_of", part))
    if len(block_of) != g.n:
        raise ValueError(f"partition covers {len(block_of)} vertices, graph has {g.n}")
    if not collect_classes:
        sizes, cross, total, _, _, _ = _walk(g, root, block_of)
        return MessageTrace(root, sizes, cross, total)
    kappa = degree_classes(g, k_cap)
    if class_tau is None:
        # the peak is only known afterwards; frontier sizes do not depend on the partition
        sizes, *_ = _walk(g, root)
        class_tau = int(np.argmax(sizes))
    sizes, cross, total, classes, _, _ = _walk(g, root, block_of, class_tau, kappa, k_cap)
    if classes is None:
        classes = np.zeros((k_cap + 1, k_cap + 1))
    return MessageTrace(root, sizes, cross, total, classes)


def bfs_levels(g: Graph, root: int) -> tuple[np.ndarray, np.ndarray]:
    """Hop distance from ``root`` (-1 if unreachable) and BFS-tree parent (lowest-id discoverer)."""
    *_, level, parent = _walk(g, root, with_parents=True)
    return level, parent


def peak_stats(trace: MessageTrace) -> tuple[int, float]:
    """Peak iteration and the share of all crossing messages that deliver the peak frontier."""
    tau = trace.peak_iteration
    total = int(trace.messages_cross.sum())
    return tau, (float(trace.messages_cross[tau]) / total if total else 0.0)


def message_class_counts(g: Graph, part, root: int, tau: int, k_cap: int = DEFAULT_K_CAP) -> np.ndarray:
    """Messages delivering frontier ``tau`` (crossing or not) binned by capped endpoint degrees."""
    return bfs_trace(g, part, root, collect_classes=True, k_cap=k_cap, class_tau=tau).class_counts
