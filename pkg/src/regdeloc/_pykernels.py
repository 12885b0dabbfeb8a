"""Pure-Python/numpy reference implementations of the hot kernels.

Every function here has a counterpart with the same signature in
``_ckernels.pyx``.  Neighbour tables are ``(n, k)`` int64 arrays.
"""
from collections import deque

import numpy as np
import scipy.sparse as sp


def bfs_girth(nbrs, limit):
    """Exact girth if it is at most ``limit``, else -1."""
    n, k = nbrs.shape
    rows = nbrs.tolist()
    best = limit + 1
    dist = [-1] * n
    parent = [-1] * n
    for s in range(n):
        touched = [s]
        dist[s] = 0
        parent[s] = -1
        queue = deque([s])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if 2 * dx + 1 >= best:
                break
            for y in rows[x]:
                if y == parent[x]:
                    continue
                if dist[y] < 0:
                    dist[y] = dx + 1
                    parent[y] = x
                    touched.append(y)
                    queue.append(y)
                else:
                    cyc = dx + dist[y] + 1
                    if cyc < best:
                        best = cyc
        for v in touched:
            dist[v] = -1
        if best == 3:
            break
    return best if best <= limit else -1


def _bounded_dist(rows, src, depth, n):
    dist = {src: 0}
    frontier = [src]
    for level in range(1, depth + 1):
        nxt = []
        for x in frontier:
            for y in rows[x]:
                if y not in dist:
                    dist[y] = level
                    nxt.append(y)
        frontier = nxt
    return dist


def shared_edge_cycle_length(nbrs, limit):
    """Smallest L such that two distinct cycles of length <= L share an edge.

    Returns -1 when no such pair exists with L <= ``limit``.  Cycles through
    the edge (u, v) are enumerated as simple paths v -> u that do not use
    the edge itself.
    """
    n, k = nbrs.shape
    rows = nbrs.tolist()
    best = limit + 1
    on_path = [False] * n
    for u in range(n):
        for v in rows[u]:
            if v <= u:
                continue
            # need two cycles of length < best through (u, v)
            cap = best - 1
            if cap < 3:
                return best if best <= limit else -1
            dist_u = _bounded_dist(rows, u, cap - 1, n)
            found = []
            on_path[v] = True

            def dfs(x, length):
                # length = edges on the path v -> x so far
                nonlocal cap
                for y in rows[x]:
                    if y == u:
                        if length + 2 <= cap:
                            found.append(length + 2)
                            found.sort()
                            del found[2:]
                            if len(found) == 2:
                                cap = found[1] - 1
                        continue
                    if on_path[y]:
                        continue
                    dy = dist_u.get(y)
                    if dy is None or length + 1 + dy + 1 > cap:
                        continue
                    on_path[y] = True
                    dfs(y, length + 1)
                    on_path[y] = False

            for y in rows[v]:
                if y == u:
                    continue
                dy = dist_u.get(y)
                if dy is None or 1 + dy + 1 > cap:
                    continue
                on_path[y] = True
                dfs(y, 1)
                on_path[y] = False
            on_path[v] = False
            if len(found) == 2 and found[1] < best:
                best = found[1]
    return best if best <= limit else -1


def _adjacency(nbrs):
    n, k = nbrs.shape
    indptr = np.arange(0, n * k + 1, k)
    data = np.ones(n * k)
    return sp.csr_matrix((data, nbrs.ravel(), indptr), shape=(n, n))


def chebyshev_sweep(nbrs, scale, v, coeffs):
    """Return sum_m coeffs[m] * P_m(T / 2) v where T = scale * adjacency.

    Uses w_{m+1} = T w_m - w_{m-1}, w_0 = v, w_1 = (T / 2) v.
    ``v`` may be 1-D or 2-D (one column per vector).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    v = np.asarray(v, dtype=float)
    T = _adjacency(nbrs) * scale
    out = coeffs[0] * v
    if len(coeffs) == 1:
        return out
    prev = v
    cur = 0.5 * (T @ v)
    if coeffs[1] != 0.0:
        out = out + coeffs[1] * cur
    for m in range(2, len(coeffs)):
        prev, cur = cur, T @ cur - prev
        c = coeffs[m]
        if c != 0.0:
            out += c * cur
    return out
