# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled GF(2) kernels; same contract as ``_kernels_py`` for up to 64 generators."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free

import math

cdef extern from *:
    int __builtin_clzll(unsigned long long x) nogil

cdef enum:
    MAXN = 64

cdef inline int _low(uint64_t v) noexcept nogil:
    return 63 - __builtin_clzll(v)


def reduce_pairs(cols):
    cdef Py_ssize_t n = len(cols)
    if n > MAXN:
        raise ValueError("compiled kernel handles at most 64 generators")
    cdef uint64_t red[MAXN]
    cdef int pivot[MAXN]
    cdef Py_ssize_t j
    cdef int k, low
    cdef uint64_t v
    for j in range(MAXN):
        pivot[j] = -1
    pairs = []
    for j in range(n):
        v = <uint64_t>cols[j]
        while v:
            k = pivot[_low(v)]
            if k < 0:
                break
            v ^= red[k]
        red[j] = v
        if v:
            low = _low(v)
            pivot[low] = <int>j
            pairs.append((low, j))
    return pairs


cdef struct Ctx:
    int n
    int G
    double* filt
    int* gi
    int* rows
    int* nrows
    int* suffix
    uint64_t* cols
    uint64_t* red
    int* pivot
    int* unpaired
    double best
    uint64_t* best_cols
    int found
    long long nodes


cdef inline bint _feasible(Ctx* c, int j, int g) noexcept nogil:
    cdef int* nxt = c.suffix + (j + 1) * c.G
    if c.unpaired[g] > nxt[g + 1]:
        return False
    if g >= 1 and c.unpaired[g - 1] > nxt[g]:
        return False
    return True


cdef void _dfs(Ctx* c, int j, double beta) noexcept nogil:
    cdef int t, g, low, k, nr, i
    cdef uint64_t mask, v, w, x, r
    cdef double nb
    cdef int* R
    c.nodes += 1
    if j == c.n:
        if beta < c.best:
            for i in range(c.G):
                if c.unpaired[i] != 0:
                    return
            c.best = beta
            c.found = 1
            for i in range(c.n):
                c.best_cols[i] = c.cols[i]
        return
    nr = c.nrows[j]
    R = c.rows + j * MAXN
    g = c.gi[j]
    mask = 0
    while mask < (<uint64_t>1 << nr):
        v = 0
        for t in range(nr):
            if (mask >> t) & 1:
                v |= (<uint64_t>1) << R[t]
        w = 0
        x = v
        while x:
            low = _low(x)
            w ^= c.cols[low]
            x ^= (<uint64_t>1) << low
        if w == 0:
            r = v
            while r:
                k = c.pivot[_low(r)]
                if k < 0:
                    break
                r ^= c.red[k]
            if r:
                low = _low(r)
                nb = c.filt[j] - c.filt[low]
                if nb < beta:
                    nb = beta
                if nb < c.best:
                    c.unpaired[c.gi[low]] -= 1
                    if _feasible(c, j, g):
                        c.cols[j] = v
                        c.red[j] = r
                        c.pivot[low] = j
                        _dfs(c, j + 1, nb)
                        c.cols[j] = 0
                        c.red[j] = 0
                        c.pivot[low] = -1
                    c.unpaired[c.gi[low]] += 1
            else:
                c.unpaired[g] += 1
                if _feasible(c, j, g):
                    c.cols[j] = v
                    _dfs(c, j + 1, beta)
                    c.cols[j] = 0
                c.unpaired[g] -= 1
        mask += 1


def search_min_depth(filt, grade, rows):
    cdef int n = len(filt)
    cdef int i, j, t, gmin, G
    cdef Ctx c
    if n == 0:
        return 0.0, [], 1
    if n > MAXN:
        raise ValueError("compiled kernel handles at most 64 generators")
    gmin = min(grade)
    G = max(grade) - gmin + 2
    c.n = n
    c.G = G
    c.filt = <double*>calloc(n, sizeof(double))
    c.gi = <int*>calloc(n, sizeof(int))
    c.rows = <int*>calloc(n * MAXN, sizeof(int))
    c.nrows = <int*>calloc(n, sizeof(int))
    c.suffix = <int*>calloc((n + 1) * G, sizeof(int))
    c.cols = <uint64_t*>calloc(n, sizeof(uint64_t))
    c.red = <uint64_t*>calloc(n, sizeof(uint64_t))
    c.pivot = <int*>calloc(n, sizeof(int))
    c.unpaired = <int*>calloc(G, sizeof(int))
    c.best_cols = <uint64_t*>calloc(n, sizeof(uint64_t))
    try:
        for j in range(n):
            c.filt[j] = filt[j]
            c.gi[j] = grade[j] - gmin
            c.pivot[j] = -1
            if len(rows[j]) > 63:
                raise ValueError("too many admissible entries in one column")
            c.nrows[j] = len(rows[j])
            for t in range(c.nrows[j]):
                c.rows[j * MAXN + t] = rows[j][t]
        for j in range(n - 1, -1, -1):
            for i in range(G):
                c.suffix[j * G + i] = c.suffix[(j + 1) * G + i]
            c.suffix[j * G + c.gi[j]] += 1
        c.best = math.inf
        c.found = 0
        c.nodes = 0
        with nogil:
            _dfs(&c, 0, 0.0)
        best_cols = [int(c.best_cols[j]) for j in range(n)] if c.found else None
        return c.best, best_cols, c.nodes
    finally:
        free(c.filt)
        free(c.gi)
        free(c.rows)
        free(c.nrows)
        free(c.suffix)
        free(c.cols)
        free(c.red)
        free(c.pivot)
        free(c.unpaired)
        free(c.best_cols)
