# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled weight-space kernels.

Each weight vector in ``[start, stop)`` is decoded from its lexicographic
index (base 6, most significant digit first), scored, and ranked with the
same arithmetic and tie rule as :mod:`vmrank.scoring` / :mod:`vmrank.ranking`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmax
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double TIE_RTOL = 1e-9
cdef double SHIFT_EPS = 1e-6

ctypedef struct Workspace:
    int m
    int n
    int g
    int mode
    const double* z
    const double* signs
    const Py_ssize_t* groups
    const double* costs
    const Py_ssize_t* tb_pos
    const Py_ssize_t* tb
    long* digits
    double* wexp
    double* s
    double* u
    double* v
    Py_ssize_t* order


cdef inline bint _close(double a, double b) noexcept nogil:
    return fabs(a - b) <= TIE_RTOL * fmax(1.0, fmax(fabs(a), fabs(b)))


cdef void _rank_one(Workspace* ws, long idx) noexcept nogil:
    cdef int m = ws.m, n = ws.n, g = ws.g
    cdef int i, j, p, q, lo_i, hi_i
    cdef long rem = idx
    cdef double acc, lo, hi, rng, key
    cdef Py_ssize_t t

    for p in range(g - 1, -1, -1):
        ws.digits[p] = rem % 6
        rem = rem // 6
    for j in range(n):
        ws.wexp[j] = ws.signs[j] * <double>ws.digits[ws.groups[j]]

    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc = acc + ws.z[i * n + j] * ws.wexp[j]
        ws.s[i] = acc

    if ws.mode == 0:
        for i in range(m):
            ws.v[i] = -ws.s[i]
    else:
        # snap chains of near-equal scores to the chain minimum before shifting
        for p in range(m):
            ws.order[p] = p
        for p in range(1, m):
            t = ws.order[p]
            key = ws.s[t]
            q = p - 1
            while q >= 0 and ws.s[ws.order[q]] > key:
                ws.order[q + 1] = ws.order[q]
                q -= 1
            ws.order[q + 1] = t
        acc = ws.s[ws.order[0]]
        for p in range(m):
            if p > 0 and not _close(ws.s[ws.order[p - 1]], ws.s[ws.order[p]]):
                acc = ws.s[ws.order[p]]
            ws.u[ws.order[p]] = acc
        lo = ws.u[ws.order[0]]
        hi = acc
        if lo > 0:
            for i in range(m):
                ws.v[i] = ws.costs[i] / ws.u[i]
        else:
            rng = hi - lo
            if rng == 0:
                rng = 1.0
            for i in range(m):
                ws.v[i] = ws.costs[i] / ((ws.u[i] - lo) + SHIFT_EPS * rng)

    # stable insertion sort by value, starting from tie-break order
    for p in range(m):
        ws.order[p] = ws.tb[p]
    for p in range(1, m):
        t = ws.order[p]
        key = ws.v[t]
        q = p - 1
        while q >= 0 and ws.v[ws.order[q]] > key:
            ws.order[q + 1] = ws.order[q]
            q -= 1
        ws.order[q + 1] = t

    # within chains of near-equal values, restore tie-break order
    lo_i = 0
    while lo_i < m:
        hi_i = lo_i + 1
        while hi_i < m and _close(ws.v[ws.order[hi_i - 1]], ws.v[ws.order[hi_i]]):
            hi_i += 1
        if hi_i - lo_i > 1:
            for p in range(lo_i + 1, hi_i):
                t = ws.order[p]
                q = p - 1
                while q >= lo_i and ws.tb_pos[ws.order[q]] > ws.tb_pos[t]:
                    ws.order[q + 1] = ws.order[q]
                    q -= 1
                ws.order[q + 1] = t
        lo_i = hi_i


cdef int _setup(Workspace* ws, const double[:, ::1] z, const double[::1] signs, const Py_ssize_t[::1] groups,
                int g, const double[::1] costs, const Py_ssize_t[::1] tb_pos, const Py_ssize_t[::1] tb,
                int mode) except -1:
    ws.m = z.shape[0]
    ws.n = z.shape[1]
    ws.g = g
    ws.mode = mode
    ws.z = &z[0, 0] if ws.n > 0 else NULL
    ws.signs = &signs[0] if ws.n > 0 else NULL
    ws.groups = &groups[0] if ws.n > 0 else NULL
    ws.costs = &costs[0]
    ws.tb_pos = &tb_pos[0]
    ws.tb = &tb[0]
    ws.digits = <long*>malloc(g * sizeof(long))
    ws.wexp = <double*>malloc((ws.n + 1) * sizeof(double))
    ws.s = <double*>malloc(ws.m * sizeof(double))
    ws.u = <double*>malloc(ws.m * sizeof(double))
    ws.v = <double*>malloc(ws.m * sizeof(double))
    ws.order = <Py_ssize_t*>malloc(ws.m * sizeof(Py_ssize_t))
    if not (ws.digits and ws.wexp and ws.s and ws.u and ws.v and ws.order):
        _teardown(ws)
        raise MemoryError()
    return 0


cdef void _teardown(Workspace* ws) noexcept:
    free(ws.digits)
    free(ws.wexp)
    free(ws.s)
    free(ws.u)
    free(ws.v)
    free(ws.order)


def rank_orders(z, signs, groups, int g, costs, tb_pos, tb, int mode, long start, long stop):
    cdef Workspace ws
    cdef long idx
    cdef int p
    cdef cnp.ndarray[cnp.int32_t, ndim=2] out = np.empty((stop - start, z.shape[0]), dtype=np.int32)
    cdef int[:, ::1] o = out
    _setup(&ws, z, signs, groups, g, costs, tb_pos, tb, mode)
    try:
        with nogil:
            for idx in range(start, stop):
                _rank_one(&ws, idx)
                for p in range(ws.m):
                    o[idx - start, p] = <int>ws.order[p]
    finally:
        _teardown(&ws)
    return out


def topk_counts(z, signs, groups, int g, costs, tb_pos, tb, int mode, long start, long stop, int k):
    cdef Workspace ws
    cdef long idx
    cdef int p
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((z.shape[0], k), dtype=np.int64)
    cdef long long[:, ::1] c = out
    _setup(&ws, z, signs, groups, g, costs, tb_pos, tb, mode)
    try:
        with nogil:
            for idx in range(start, stop):
                _rank_one(&ws, idx)
                for p in range(k):
                    c[ws.order[p], p] += 1
    finally:
        _teardown(&ws)
    return out


def hamming_scores(z, signs, groups, int g, costs, tb_pos, tb, int mode, long start, long stop, empirical_ranks):
    cdef Workspace ws
    cdef long idx
    cdef int p, vm, m = z.shape[0]
    cdef long long acc, d
    cdef const long long[::1] er = np.ascontiguousarray(empirical_ranks, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(stop - start, dtype=np.int64)
    cdef long long[::1] h = out
    _setup(&ws, z, signs, groups, g, costs, tb_pos, tb, mode)
    try:
        with nogil:
            for idx in range(start, stop):
                _rank_one(&ws, idx)
                acc = 0
                for p in range(m):
                    vm = ws.order[p]
                    d = er[vm] - (p + 1)
                    if d < 0:
                        d = -d
                    acc += (m - er[vm] + 1) * d
                h[idx - start] = acc
    finally:
        _teardown(&ws)
    return out
