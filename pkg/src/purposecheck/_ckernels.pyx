# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the graph kernels in ``_pykernels``."""

from array import array

from libc.stdlib cimport free, malloc


def all_pairs_hops(int n, src, dst):
    cdef Py_ssize_t m = len(src)
    cdef int[::1] out_v
    cdef int *deg
    cdef int *off
    cdef int *nbr
    cdef int *queue
    cdef int *fill
    cdef Py_ssize_t i, k, base, head, tail
    cdef int u, v, du, start

    out = array("i", [-1]) * (n * n)
    if n == 0:
        return out
    out_v = out
    deg = <int *> malloc(sizeof(int) * (n + 1))
    off = <int *> malloc(sizeof(int) * (n + 1))
    fill = <int *> malloc(sizeof(int) * (n + 1))
    nbr = <int *> malloc(sizeof(int) * (m + 1))
    queue = <int *> malloc(sizeof(int) * (n + 1))
    if not (deg and off and fill and nbr and queue):
        free(deg); free(off); free(fill); free(nbr); free(queue)
        raise MemoryError()
    try:
        for i in range(n + 1):
            deg[i] = 0
        for k in range(m):
            deg[<int> src[k]] += 1
        off[0] = 0
        for i in range(n):
            off[i + 1] = off[i] + deg[i]
            fill[i] = off[i]
        for k in range(m):
            u = src[k]
            nbr[fill[u]] = dst[k]
            fill[u] += 1
        for start in range(n):
            base = <Py_ssize_t> start * n
            out_v[base + start] = 0
            head = 0
            tail = 0
            queue[tail] = start
            tail += 1
            while head < tail:
                u = queue[head]
                head += 1
                du = out_v[base + u] + 1
                for k in range(off[u], off[u + 1]):
                    v = nbr[k]
                    if out_v[base + v] < 0:
                        out_v[base + v] = du
                        queue[tail] = v
                        tail += 1
    finally:
        free(deg); free(off); free(fill); free(nbr); free(queue)
    return out


def nearest_seed(hops, int n, seeds):
    cdef const int[::1] h = hops
    cdef int[::1] out_v
    cdef int *seed_idx
    cdef int ns = 0
    cdef int i, j, k, d, best, best_d
    cdef Py_ssize_t base

    out = array("i", [-1]) * n
    if n == 0:
        return out
    out_v = out
    seed_idx = <int *> malloc(sizeof(int) * n)
    if not seed_idx:
        raise MemoryError()
    try:
        for j in range(n):
            if seeds[j]:
                seed_idx[ns] = j
                ns += 1
        for i in range(n):
            base = <Py_ssize_t> i * n
            best = -1
            best_d = -1
            for k in range(ns):
                j = seed_idx[k]
                d = h[base + j]
                if d >= 0 and (best < 0 or d < best_d):
                    best = j
                    best_d = d
            out_v[i] = best
    finally:
        free(seed_idx)
    return out
