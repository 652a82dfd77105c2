"""Hot numeric kernels.

Every kernel exists in two flavours: a loop version that numba compiles, and a
numpy/python version used when numba is disabled (``AGCVG_DISABLE_NUMBA=1``).
Both flavours perform the same floating point operations in the same order, so
results agree exactly between backends. The public names at the bottom of this
module are bound to one flavour at import time.
"""
import heapq

import numpy as np

from agcvg._accel import USE_NUMBA, njit


# ---------------------------------------------------------------------------
# 8-connected grid shortest paths (no corner cutting)
# ---------------------------------------------------------------------------

def _grid_dijkstra(free, src, target, res):
    h, w = free.shape
    n = h * w
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    diag = res * np.sqrt(2.0)
    dist[src] = 0.0
    heap = [(0.0, src)]
    while len(heap) > 0:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == target:
            break
        r = u // w
        c = u - r * w
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                if dr == 0 and dc == 0:
                    continue
                rr = r + dr
                cc = c + dc
                if rr < 0 or rr >= h or cc < 0 or cc >= w:
                    continue
                if not free[rr, cc]:
                    continue
                if dr != 0 and dc != 0:
                    if not (free[r, cc] and free[rr, c]):
                        continue
                    step = diag
                else:
                    step = res
                v = rr * w + cc
                nd = d + step
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
    return dist, pred


def _grid_distance_matrix(free, sources, targets, res):
    out = np.empty((sources.shape[0], targets.shape[0]))
    for k in range(sources.shape[0]):
        dist, _ = _grid_dijkstra(free, sources[k], -1, res)
        for t in range(targets.shape[0]):
            out[k, t] = dist[targets[t]]
    return out


# ---------------------------------------------------------------------------
# Hungarian algorithm (shortest augmenting path, potentials), n <= m
# ---------------------------------------------------------------------------

def _hungarian_loop(cost):
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=np.bool_)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assign = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j] != 0:
            assign[p[j] - 1] = j - 1
    return assign


def _hungarian_np(cost):
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            unused = ~used[1:]
            upd = unused & (cur < minv[1:])
            minv[1:][upd] = cur[upd]
            way[1:][upd] = j0
            cand = np.where(unused, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assign = np.full(n, -1, dtype=np.int64)
    rows = p[1:]
    cols = np.nonzero(rows)[0]
    assign[rows[cols] - 1] = cols
    return assign


# ---------------------------------------------------------------------------
# Maximum-cardinality bipartite matching (BFS augmenting paths)
# ---------------------------------------------------------------------------

def _max_matching(adj):
    n, m = adj.shape
    match_l = np.full(n, -1, dtype=np.int64)
    match_r = np.full(m, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        parent_r = np.full(m, -1, dtype=np.int64)
        seen = np.zeros(n, dtype=np.bool_)
        head = 0
        tail = 1
        queue[0] = s
        seen[s] = True
        found = -1
        while head < tail and found < 0:
            i = queue[head]
            head += 1
            for j in range(m):
                if adj[i, j] and parent_r[j] < 0:
                    parent_r[j] = i
                    if match_r[j] < 0:
                        found = j
                        break
                    k = match_r[j]
                    if not seen[k]:
                        seen[k] = True
                        queue[tail] = k
                        tail += 1
        j = found
        while j >= 0:
            i = parent_r[j]
            nxt = match_l[i]
            match_l[i] = j
            match_r[j] = i
            j = nxt
    return match_l


# ---------------------------------------------------------------------------
# max over a of min distance to b
# ---------------------------------------------------------------------------

def _max_min_dist_loop(a, b):
    best = -1.0
    arg = -1
    for i in range(a.shape[0]):
        mn = np.inf
        for j in range(b.shape[0]):
            dx = a[i, 0] - b[j, 0]
            dy = a[i, 1] - b[j, 1]
            d = dx * dx + dy * dy
            if d < mn:
                mn = d
        if mn > best:
            best = mn
            arg = i
    return np.sqrt(best), arg


def _max_min_dist_np(a, b, chunk=2048):
    mins = np.empty(a.shape[0])
    for s in range(0, a.shape[0], chunk):
        blk = a[s:s + chunk]
        dx = blk[:, 0:1] - b[None, :, 0]
        dy = blk[:, 1:2] - b[None, :, 1]
        mins[s:s + chunk] = (dx * dx + dy * dy).min(axis=1)
    arg = int(np.argmax(mins))
    return np.sqrt(mins[arg]), arg


# ---------------------------------------------------------------------------
# swath rasterization: cells whose centers lie within radius of the polyline
# ---------------------------------------------------------------------------

def _swath_mask_loop(points, radius, res, h, w):
    out = np.zeros((h, w), dtype=np.bool_)
    n = points.shape[0]
    if n == 0:
        return out
    r2 = (radius + 1e-9) * (radius + 1e-9)
    nseg = n - 1 if n > 1 else 1
    for k in range(nseg):
        px = points[k, 0]
        py = points[k, 1]
        if n > 1:
            qx = points[k + 1, 0]
            qy = points[k + 1, 1]
        else:
            qx = px
            qy = py
        ex = qx - px
        ey = qy - py
        ll = ex * ex + ey * ey
        c0 = max(0, int(np.floor((min(px, qx) - radius) / res)) - 1)
        c1 = min(w - 1, int(np.floor((max(px, qx) + radius) / res)) + 1)
        r0 = max(0, int(np.floor((min(py, qy) - radius) / res)) - 1)
        r1 = min(h - 1, int(np.floor((max(py, qy) + radius) / res)) + 1)
        for r in range(r0, r1 + 1):
            cy = (r + 0.5) * res
            for c in range(c0, c1 + 1):
                if out[r, c]:
                    continue
                cx = (c + 0.5) * res
                if ll > 0.0:
                    t = ((cx - px) * ex + (cy - py) * ey) / ll
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                dx = cx - (px + t * ex)
                dy = cy - (py + t * ey)
                if dx * dx + dy * dy <= r2:
                    out[r, c] = True
    return out


def _swath_mask_np(points, radius, res, h, w):
    out = np.zeros((h, w), dtype=bool)
    n = points.shape[0]
    if n == 0:
        return out
    r2 = (radius + 1e-9) * (radius + 1e-9)
    starts = points[:-1] if n > 1 else points
    ends = points[1:] if n > 1 else points
    for (px, py), (qx, qy) in zip(starts, ends):
        ex = qx - px
        ey = qy - py
        ll = ex * ex + ey * ey
        c0 = max(0, int(np.floor((min(px, qx) - radius) / res)) - 1)
        c1 = min(w - 1, int(np.floor((max(px, qx) + radius) / res)) + 1)
        r0 = max(0, int(np.floor((min(py, qy) - radius) / res)) - 1)
        r1 = min(h - 1, int(np.floor((max(py, qy) + radius) / res)) + 1)
        cy = (np.arange(r0, r1 + 1) + 0.5) * res
        cx = (np.arange(c0, c1 + 1) + 0.5) * res
        cxx, cyy = np.meshgrid(cx, cy)
        if ll > 0.0:
            t = np.clip(((cxx - px) * ex + (cyy - py) * ey) / ll, 0.0, 1.0)
        else:
            t = np.zeros_like(cxx)
        dx = cxx - (px + t * ex)
        dy = cyy - (py + t * ey)
        out[r0:r1 + 1, c0:c1 + 1] |= dx * dx + dy * dy <= r2
    return out


# ---------------------------------------------------------------------------
# cell ordering: exact DP and 2-opt over (cell, entry corner) states
# ---------------------------------------------------------------------------

def _held_karp(trans, n_cells):
    # states s = 4 * cell + entry corner; trans[s, t] = transit after s into t
    full = (1 << n_cells) - 1
    ns = 4 * n_cells
    dp = np.full((full + 1, ns), np.inf)
    parent = np.full((full + 1, ns), -1, dtype=np.int64)
    for s in range(ns):
        dp[1 << (s // 4), s] = 0.0
    for mask in range(1, full + 1):
        for s in range(ns):
            cur = dp[mask, s]
            if cur == np.inf:
                continue
            for t in range(ns):
                bit = 1 << (t // 4)
                if mask & bit:
                    continue
                nm = mask | bit
                val = cur + trans[s, t]
                if val < dp[nm, t]:
                    dp[nm, t] = val
                    parent[nm, t] = s
    best = np.inf
    last = -1
    for s in range(ns):
        if dp[full, s] < best:
            best = dp[full, s]
            last = s
    seq = np.empty(n_cells, dtype=np.int64)
    mask = full
    k = n_cells - 1
    s = last
    while s >= 0:
        seq[k] = s
        prev = parent[mask, s]
        mask = mask & ~(1 << (s // 4))
        s = prev
        k -= 1
    return seq, best


def _two_opt(seq, trans, exit_corner, max_sweeps):
    seq = seq.copy()
    n = seq.shape[0]
    for _ in range(max_sweeps):
        improved = False
        for i in range(n):
            for j in range(i, n):
                si = seq[i]
                sj = seq[j]
                ri = 4 * (si // 4) + exit_corner[si]
                rj = 4 * (sj // 4) + exit_corner[sj]
                delta = 0.0
                if i > 0:
                    delta += trans[seq[i - 1], rj] - trans[seq[i - 1], si]
                if j < n - 1:
                    delta += trans[ri, seq[j + 1]] - trans[sj, seq[j + 1]]
                if delta < -1e-9:
                    a = i
                    b = j
                    while a < b:
                        tmp = seq[a]
                        seq[a] = seq[b]
                        seq[b] = tmp
                        a += 1
                        b -= 1
                    for k in range(i, j + 1):
                        s = seq[k]
                        seq[k] = 4 * (s // 4) + exit_corner[s]
                    improved = True
        if not improved:
            break
    return seq


# ---------------------------------------------------------------------------
# backend binding
# ---------------------------------------------------------------------------

NUMPY_KERNELS = {
    "grid_dijkstra": _grid_dijkstra,
    "grid_distance_matrix": _grid_distance_matrix,
    "hungarian": _hungarian_np,
    "max_matching": _max_matching,
    "max_min_dist": _max_min_dist_np,
    "swath_mask": _swath_mask_np,
    "held_karp": _held_karp,
    "two_opt": _two_opt,
}

_nb_dijkstra = njit(_grid_dijkstra)


def _nb_distance_matrix(free, sources, targets, res):
    out = np.empty((sources.shape[0], targets.shape[0]))
    for k in range(sources.shape[0]):
        dist, _ = _nb_dijkstra(free, sources[k], -1, res)
        for t in range(targets.shape[0]):
            out[k, t] = dist[targets[t]]
    return out


NUMBA_KERNELS = {
    "grid_dijkstra": _nb_dijkstra,
    "grid_distance_matrix": njit(_nb_distance_matrix),
    "hungarian": njit(_hungarian_loop),
    "max_matching": njit(_max_matching),
    "max_min_dist": njit(_max_min_dist_loop),
    "swath_mask": njit(_swath_mask_loop),
    "held_karp": njit(_held_karp),
    "two_opt": njit(_two_opt),
}

_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS
BACKEND = "numba" if USE_NUMBA else "numpy"


def grid_dijkstra(free, src, res, target=-1):
    """Shortest 8-connected paths from flat cell ``src`` over ``free`` cells.

    Diagonal moves require both orthogonal neighbours free. Returns flat
    ``(dist, pred)`` arrays; the search stops early once ``target`` is settled.
    """
    free = np.ascontiguousarray(free, dtype=np.bool_)
    return _ACTIVE["grid_dijkstra"](free, np.int64(src), np.int64(target), float(res))


def grid_distance_matrix(free, sources, targets, res):
    free = np.ascontiguousarray(free, dtype=np.bool_)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    return _ACTIVE["grid_distance_matrix"](free, sources, targets, float(res))


def hungarian(cost):
    """Row -> column assignment minimizing total cost; requires rows <= cols."""
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    return _ACTIVE["hungarian"](cost)


def max_matching(adj):
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    return _ACTIVE["max_matching"](adj)


def max_min_dist(a, b):
    """Return ``(max_i min_j |a_i - b_j|, argmax i)``."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    d, arg = _ACTIVE["max_min_dist"](a, b)
    return float(d), int(arg)


def swath_mask(points, radius, res, shape):
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    h, w = shape
    return _ACTIVE["swath_mask"](points, float(radius), float(res), int(h), int(w))


def held_karp(trans, n_cells):
    trans = np.ascontiguousarray(trans, dtype=np.float64)
    seq, best = _ACTIVE["held_karp"](trans, int(n_cells))
    return seq, float(best)


def two_opt(seq, trans, exit_corner, max_sweeps=50):
    return _ACTIVE["two_opt"](
        np.ascontiguousarray(seq, dtype=np.int64),
        np.ascontiguousarray(trans, dtype=np.float64),
        np.ascontiguousarray(exit_corner, dtype=np.int64),
        int(max_sweeps),
    )
