# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def bfs_girth(const cnp.int64_t[:, ::1] nbrs, long limit):
    cdef Py_ssize_t n = nbrs.shape[0], k = nbrs.shape[1]
    cdef long best = limit + 1
    cdef long[:] dist = np.full(n, -1, dtype=np.int_)
    cdef long[:] parent = np.full(n, -1, dtype=np.int_)
    cdef long[:] queue = np.empty(n, dtype=np.int_)
    cdef Py_ssize_t s, head, tail, i, j
    cdef long x, y, dx, cyc
    for s in range(n):
        dist[s] = 0
        parent[s] = -1
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            x = queue[head]
            head += 1
            dx = dist[x]
            if 2 * dx + 1 >= best:
                break
            for j in range(k):
                y = nbrs[x, j]
                if y == parent[x]:
                    continue
                if dist[y] < 0:
                    dist[y] = dx + 1
                    parent[y] = x
                    queue[tail] = y
                    tail += 1
                else:
                    cyc = dx + dist[y] + 1
                    if cyc < best:
                        best = cyc
        for i in range(tail):
            dist[queue[i]] = -1
        if best == 3:
            break
    return best if best <= limit else -1


cdef struct Search:
    long u
    long cap
    long n_found
    long found0
    long found1


cdef void _record(Search* st, long length) nogil:
    if st.n_found == 0:
        st.found0 = length
        st.n_found = 1
    elif st.n_found == 1:
        if length < st.found0:
            st.found1 = st.found0
            st.found0 = length
        else:
            st.found1 = length
        st.n_found = 2
        st.cap = st.found1 - 1
    else:
        if length < st.found0:
            st.found1 = st.found0
            st.found0 = length
        elif length < st.found1:
            st.found1 = length
        st.cap = st.found1 - 1


cdef void _dfs(const cnp.int64_t[:, ::1] nbrs, long[:] dist_u, char[:] on_path,
               Search* st, long x, long length) nogil:
    cdef Py_ssize_t j, k = nbrs.shape[1]
    cdef long y, dy
    for j in range(k):
        y = nbrs[x, j]
        if y == st.u:
            if length + 2 <= st.cap:
                _record(st, length + 2)
            continue
        if on_path[y]:
            continue
        dy = dist_u[y]
        if dy < 0 or length + 1 + dy + 1 > st.cap:
            continue
        on_path[y] = 1
        _dfs(nbrs, dist_u, on_path, st, y, length + 1)
        on_path[y] = 0


def shared_edge_cycle_length(const cnp.int64_t[:, ::1] nbrs, long limit):
    cdef Py_ssize_t n = nbrs.shape[0], k = nbrs.shape[1]
    cdef long best = limit + 1
    cdef long[:] dist_u = np.full(n, -1, dtype=np.int_)
    cdef long[:] queue = np.empty(n, dtype=np.int_)
    cdef char[:] on_path = np.zeros(n, dtype=np.int8)
    cdef Py_ssize_t a, b, head, tail, i, j
    cdef long u, v, x, y, depth
    cdef Search st
    for u in range(n):
        for b in range(k):
            v = nbrs[u, b]
            if v <= u:
                continue
            if best - 1 < 3:
                return best if best <= limit else -1
            st.u = u
            st.cap = best - 1
            st.n_found = 0
            depth = st.cap - 1
            # truncated BFS distances from u
            dist_u[u] = 0
            queue[0] = u
            head = 0
            tail = 1
            while head < tail:
                x = queue[head]
                head += 1
                if dist_u[x] >= depth:
                    continue
                for j in range(k):
                    y = nbrs[x, j]
                    if dist_u[y] < 0:
                        dist_u[y] = dist_u[x] + 1
                        queue[tail] = y
                        tail += 1
            on_path[v] = 1
            for j in range(k):
                y = nbrs[v, j]
                if y == u:
                    continue
                if dist_u[y] < 0 or 1 + dist_u[y] + 1 > st.cap:
                    continue
                on_path[y] = 1
                _dfs(nbrs, dist_u, on_path, &st, y, 1)
                on_path[y] = 0
            on_path[v] = 0
            for i in range(tail):
                dist_u[queue[i]] = -1
            if st.n_found == 2 and st.found1 < best:
                best = st.found1
    return best if best <= limit else -1


def chebyshev_sweep(const cnp.int64_t[:, ::1] nbrs, double scale, v, coeffs):
    cdef double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    arr = np.asarray(v, dtype=np.float64)
    squeeze = arr.ndim == 1
    cdef double[:, ::1] w0 = np.ascontiguousarray(arr.reshape(arr.shape[0], -1))
    cdef Py_ssize_t n = w0.shape[0], m = w0.shape[1], k = nbrs.shape[1]
    cdef Py_ssize_t deg = c.shape[0]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] prev = np.array(w0, copy=True)
    cdef double[:, ::1] cur = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] tmp
    cdef Py_ssize_t i, j, t, step
    cdef double acc, cm, half = 0.5 * scale
    for i in range(n):
        for t in range(m):
            out[i, t] = c[0] * prev[i, t]
    if deg > 1:
        with nogil:
            for i in range(n):
                for t in range(m):
                    acc = 0.0
                    for j in range(k):
                        acc = acc + prev[nbrs[i, j], t]
                    cur[i, t] = half * acc
            cm = c[1]
            if cm != 0.0:
                for i in range(n):
                    for t in range(m):
                        out[i, t] += cm * cur[i, t]
            for step in range(2, deg):
                # prev <- T cur - prev, then swap so cur holds the new term
                for i in range(n):
                    for t in range(m):
                        acc = 0.0
                        for j in range(k):
                            acc = acc + cur[nbrs[i, j], t]
                        prev[i, t] = scale * acc - prev[i, t]
                tmp = prev
                prev = cur
                cur = tmp
                cm = c[step]
                if cm != 0.0:
                    for i in range(n):
                        for t in range(m):
                            out[i, t] += cm * cur[i, t]
    if squeeze:
        return out_arr[:, 0]
    return out_arr.reshape(arr.shape)
