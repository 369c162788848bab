"""Numba kernels for the multilevel k-way partitioner.

All graphs here are CSR triples ``(xadj, adjncy, adjwgt)`` with integer edge
weights and an integer vertex-weight array. Integer weights keep every gain
comparison exact.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def heavy_edge_matching(xadj, adjncy, adjwgt, vwgt, order, max_vwgt):
    n = len(xadj) - 1
    match = np.full(n, -1, np.int64)
    for idx in range(n):
        i = order[idx]
        if match[i] != -1:
            continue
        best = -1
        bestw = -1
        for j in range(xadj[i], xadj[i + 1]):
            v = adjncy[j]
            if match[v] != -1 or v == i or vwgt[i] + vwgt[v] > max_vwgt:
                continue
            w = adjwgt[j]
            if w > bestw or (w == bestw and v < best):
                best = v
                bestw = w
        if best >= 0:
            match[i] = best
            match[best] = i
    # leaves hanging off the same hub cannot be matched along an edge; pair them
    # through the shared neighbour instead
    for h in range(n):
        pending = -1
        for j in range(xadj[h], xadj[h + 1]):
            v = adjncy[j]
            if match[v] != -1 or xadj[v + 1] - xadj[v] > 2:
                continue
            if pending == -1:
                pending = v
            elif vwgt[pending] + vwgt[v] <= max_vwgt:
                match[pending] = v
                match[v] = pending
                pending = -1
    for i in range(n):
        if match[i] == -1:
            match[i] = i
    return match


@njit(cache=True)
def contract(xadj, adjncy, adjwgt, vwgt, match):
    n = len(xadj) - 1
    cmap = np.full(n, -1, np.int64)
    cn = 0
    for i in range(n):
        if cmap[i] == -1:
            cmap[i] = cn
            cmap[match[i]] = cn
            cn += 1
    cvwgt = np.zeros(cn, np.int64)
    first = np.full(cn, -1, np.int64)
    second = np.full(cn, -1, np.int64)
    for i in range(n):
        c = cmap[i]
        cvwgt[c] += vwgt[i]
        if first[c] == -1:
            first[c] = i
        else:
            second[c] = i
    cxadj = np.zeros(cn + 1, np.int64)
    cadj = np.empty(len(adjncy), np.int64)
    cw = np.empty(len(adjncy), np.int64)
    pos = np.full(cn, -1, np.int64)
    ptr = 0
    for c in range(cn):
        start = ptr
        for s in range(2):
            mbr = first[c] if s == 0 else second[c]
            if mbr == -1:
                continue
            for j in range(xadj[mbr], xadj[mbr + 1]):
                d = cmap[adjncy[j]]
                if d == c:
                    continue
                if pos[d] >= start:
                    cw[pos[d]] += adjwgt[j]
                else:
                    pos[d] = ptr
                    cadj[ptr] = d
                    cw[ptr] = adjwgt[j]
                    ptr += 1
        cxadj[c + 1] = ptr
    return cxadj, cadj[:ptr].copy(), cw[:ptr].copy(), cvwgt, cmap


@njit(cache=True)
def grow_partition(xadj, adjncy, adjwgt, vwgt, nparts, order):
    """Greedy graph growing: blocks are filled one at a time from a seed vertex,
    always absorbing the unassigned vertex most strongly tied to the block."""
    n = len(xadj) - 1
    part = np.full(n, -1, np.int64)
    conn = np.zeros(n, np.int64)
    infront = np.zeros(n, np.bool_)
    front = np.empty(n, np.int64)
    remaining = 0
    for i in range(n):
        remaining += vwgt[i]
    oi = 0
    for b in range(nparts - 1):
        target = remaining / (nparts - b)
        bw = 0
        nf = 0
        while bw < target:
            best = -1
            k = 0
            for f in range(nf):
                v = front[f]
                if part[v] != -1:
                    infront[v] = False
                    conn[v] = 0
                    continue
                front[k] = v
                k += 1
                if best == -1 or conn[v] > conn[best] or (conn[v] == conn[best] and v < best):
                    best = v
            nf = k
            if best == -1:
                while oi < n and part[order[oi]] != -1:
                    oi += 1
                if oi == n:
                    break
                best = order[oi]
            if bw > 0 and bw + vwgt[best] - target > target - bw:
                break
            part[best] = b
            bw += vwgt[best]
            for j in range(xadj[best], xadj[best + 1]):
                u = adjncy[j]
                if part[u] == -1:
                    conn[u] += adjwgt[j]
                    if not infront[u]:
                        infront[u] = True
                        front[nf] = u
                        nf += 1
        for f in range(nf):
            conn[front[f]] = 0
            infront[front[f]] = False
        remaining -= bw
    for i in range(n):
        if part[i] == -1:
            part[i] = nparts - 1
    return part


@njit(cache=True)
def block_weights(part, vwgt, nparts):
    pw = np.zeros(nparts, np.int64)
    for i in range(len(part)):
        pw[part[i]] += vwgt[i]
    return pw


@njit(cache=True)
def refine_greedy(xadj, adjncy, adjwgt, vwgt, part, nparts, maxw, order, npasses):
    """Boundary k-way refinement: move vertices to the adjacent block with the
    largest positive cut reduction, or with zero reduction when that strictly
    evens out the two blocks. Moves never push a block above ``maxw``."""
    n = len(xadj) - 1
    pw = block_weights(part, vwgt, nparts)
    conn = np.zeros(nparts, np.int64)
    mark = np.full(nparts, -1, np.int64)
    touched = np.empty(nparts, np.int64)
    total_moves = 0
    for _ in range(npasses):
        moved = 0
        for idx in range(n):
            v = order[idx]
            a = part[v]
            nt = 0
            boundary = False
            for j in range(xadj[v], xadj[v + 1]):
                b = part[adjncy[j]]
                if mark[b] != v:
                    mark[b] = v
                    conn[b] = 0
                    touched[nt] = b
                    nt += 1
                conn[b] += adjwgt[j]
                if b != a:
                    boundary = True
            if not boundary:
                continue
            internal = conn[a] if mark[a] == v else 0
            bestb = -1
            bestgain = 0
            for t in range(nt):
                b = touched[t]
                if b == a or pw[b] + vwgt[v] > maxw:
                    continue
                gain = conn[b] - internal
                if (
                    bestb == -1
                    or gain > bestgain
                    or (gain == bestgain and (pw[b] < pw[bestb] or (pw[b] == pw[bestb] and b < bestb)))
                ):
                    bestb = b
                    bestgain = gain
            if bestb == -1:
                continue
            if bestgain > 0 or (bestgain == 0 and pw[bestb] + vwgt[v] < pw[a]):
                part[v] = bestb
                pw[a] -= vwgt[v]
                pw[bestb] += vwgt[v]
                moved += 1
        total_moves += moved
        if moved == 0:
            break
    return total_moves


@njit(cache=True)
def _best_exit(xadj, adjncy, adjwgt, vwgt, part, pw, maxw, v, conn, mark, touched, lightest):
    a = part[v]
    nt = 0
    for j in range(xadj[v], xadj[v + 1]):
        b = part[adjncy[j]]
        if mark[b] != v:
            mark[b] = v
            conn[b] = 0
            touched[nt] = b
            nt += 1
        conn[b] += adjwgt[j]
    internal = conn[a] if mark[a] == v else 0
    bestb = -1
    bestgain = 0
    for t in range(nt):
        b = touched[t]
        if b == a or pw[b] + vwgt[v] > maxw:
            continue
        gain = conn[b] - internal
        if bestb == -1 or gain > bestgain or (gain == bestgain and b < bestb):
            bestb = b
            bestgain = gain
    if bestb == -1 and lightest != a and pw[lightest] + vwgt[v] <= maxw:
        bestb = lightest
        bestgain = -internal
    return bestb, bestgain


@njit(cache=True)
def enforce_balance(xadj, adjncy, adjwgt, vwgt, part, nparts, maxw, max_rounds):
    """Move vertices out of overweight blocks, cheapest cut increase first."""
    n = len(xadj) - 1
    pw = block_weights(part, vwgt, nparts)
    conn = np.zeros(nparts, np.int64)
    mark = np.full(nparts, -1, np.int64)
    touched = np.empty(nparts, np.int64)
    for _ in range(max_rounds):
        if pw.max() <= maxw:
            return True
        lightest = int(np.argmin(pw))
        cand = np.empty(n, np.int64)
        gains = np.empty(n, np.int64)
        nc = 0
        for v in range(n):
            if pw[part[v]] > maxw:
                b, g = _best_exit(xadj, adjncy, adjwgt, vwgt, part, pw, maxw, v, conn, mark, touched, lightest)
                if b >= 0:
                    cand[nc] = v
                    gains[nc] = g
                    nc += 1
        if nc == 0:
            return False
        ordr = np.argsort(-gains[:nc], kind="mergesort")
        for i in range(nc):
            v = cand[ordr[i]]
            a = part[v]
            if pw[a] <= maxw:
                continue
            lightest = int(np.argmin(pw))
            b, g = _best_exit(xadj, adjncy, adjwgt, vwgt, part, pw, maxw, v, conn, mark, touched, lightest)
            if b < 0:
                continue
            part[v] = b
            pw[a] -= vwgt[v]
            pw[b] += vwgt[v]
    return pw.max() <= maxw


@njit(cache=True)
def weighted_cut(xadj, adjncy, adjwgt, part):
    total = 0
    for v in range(len(xadj) - 1):
        for j in range(xadj[v], xadj[v + 1]):
            if part[adjncy[j]] != part[v]:
                total += adjwgt[j]
    return total // 2
