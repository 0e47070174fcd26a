# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: exact neighbor search and the Lloyd assignment step.

Semantics match :mod:`specialk._pykernels` exactly, including tie rules
(lower index wins).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


cdef inline double _sqdist(const double[:, ::1] X, Py_ssize_t a, Py_ssize_t b, Py_ssize_t d) noexcept nogil:
    cdef double s = 0.0, diff
    cdef Py_ssize_t t
    for t in range(d):
        diff = X[a, t] - X[b, t]
        s += diff * diff
    return s


def knn_search(const double[:, ::1] X, Py_ssize_t k):
    cdef Py_ssize_t m = X.shape[0], d = X.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] idx_arr = np.empty((m, k), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dist_arr = np.empty((m, k), dtype=np.float64)
    cdef cnp.int64_t[:, ::1] idx = idx_arr
    cdef double[:, ::1] dist = dist_arr
    cdef Py_ssize_t j, l, p, filled
    cdef double s
    with nogil:
        for j in range(m):
            filled = 0
            for l in range(m):
                if l == j:
                    continue
                s = _sqdist(X, j, l, d)
                if filled == k and s >= dist[j, k - 1]:
                    continue
                if filled < k:
                    p = filled
                    filled += 1
                else:
                    p = k - 1
                # strict comparison keeps earlier (lower) indices ahead on ties
                while p > 0 and dist[j, p - 1] > s:
                    dist[j, p] = dist[j, p - 1]
                    idx[j, p] = idx[j, p - 1]
                    p -= 1
                dist[j, p] = s
                idx[j, p] = l
            for p in range(k):
                dist[j, p] = sqrt(dist[j, p])
    return idx_arr, dist_arr


def radius_pairs(const double[:, ::1] X, double eps):
    cdef Py_ssize_t m = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t cap = max(16, 8 * m), count = 0, j, l
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cols = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] rv = rows
    cdef cnp.int64_t[::1] cv = cols
    for j in range(m):
        for l in range(j + 1, m):
            if sqrt(_sqdist(X, j, l, d)) <= eps:
                if count == cap:
                    cap *= 2
                    rows = np.resize(rows, cap)
                    cols = np.resize(cols, cap)
                    rv = rows
                    cv = cols
                rv[count] = j
                cv[count] = l
                count += 1
    return rows[:count].copy(), cols[:count].copy()


def assign_nearest(const double[:, ::1] D, const double[:, ::1] C):
    cdef Py_ssize_t m = D.shape[0], n = D.shape[1], k = C.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lab_arr = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d2_arr = np.empty(m, dtype=np.float64)
    cdef cnp.int64_t[::1] lab = lab_arr
    cdef double[::1] d2 = d2_arr
    cdef Py_ssize_t j, c, t
    cdef double best, s, diff
    with nogil:
        for j in range(m):
            best = INFINITY
            lab[j] = 0
            for c in range(k):
                s = 0.0
                for t in range(n):
                    diff = D[j, t] - C[c, t]
                    s += diff * diff
                if s < best:
                    best = s
                    lab[j] = c
            d2[j] = best
    return lab_arr, d2_arr
