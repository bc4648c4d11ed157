# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled exhaustive ML search.

For each instance ``t`` find the label vector ``d`` minimising
``|| b[t] - R[t] @ points[d] ||^2`` over all ``q**n`` candidates.  Candidates
are visited in lexicographic order (first symbol most significant) with an
odometer; the partial sums of every level above the changed digit are reused.
A strictly smaller metric is required to replace the incumbent, so ties keep
the lowest candidate index.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def ml_search(const double complex[:, :, ::1] R,
              const double complex[:, ::1] b,
              const double complex[::1] points):
    cdef Py_ssize_t n_inst = R.shape[0]
    cdef Py_ssize_t r = R.shape[1]
    cdef Py_ssize_t n = R.shape[2]
    cdef Py_ssize_t q = points.shape[0]
    if b.shape[0] != n_inst or b.shape[1] != r:
        raise ValueError("b must have shape (instances, rows)")
    if n < 1 or q < 1:
        raise ValueError("need at least one symbol and one point")

    best_idx_arr = np.empty(n_inst, dtype=np.int64)
    best_met_arr = np.empty(n_inst, dtype=np.float64)
    table_arr = np.empty((n, q, r), dtype=np.complex128)
    partial_arr = np.empty((n + 1, r), dtype=np.complex128)
    digits_arr = np.zeros(n, dtype=np.int64)

    cdef cnp.int64_t[::1] best_idx = best_idx_arr
    cdef double[::1] best_met = best_met_arr
    cdef double complex[:, :, ::1] table = table_arr
    cdef double complex[:, ::1] partial = partial_arr
    cdef cnp.int64_t[::1] digits = digits_arr

    cdef Py_ssize_t t, i, l, j, lv
    cdef cnp.int64_t k, bestk
    cdef double met, best, re, im
    cdef double complex acc

    with nogil:
        for t in range(n_inst):
            for l in range(n):
                for j in range(q):
                    for i in range(r):
                        table[l, j, i] = R[t, i, l] * points[j]
                digits[l] = 0
            for i in range(r):
                partial[0, i] = b[t, i]
            for l in range(n):
                for i in range(r):
                    partial[l + 1, i] = partial[l, i] - table[l, 0, i]

            best = 1e308
            bestk = 0
            k = 0
            while True:
                met = 0.0
                for i in range(r):
                    acc = partial[n, i]
                    re = acc.real
                    im = acc.imag
                    met = met + re * re + im * im
                if met < best:
                    best = met
                    bestk = k
                k = k + 1
                lv = n - 1
                while lv >= 0:
                    digits[lv] = digits[lv] + 1
                    if digits[lv] < q:
                        break
                    digits[lv] = 0
                    lv = lv - 1
                if lv < 0:
                    break
                for l in range(lv, n):
                    for i in range(r):
                        partial[l + 1, i] = partial[l, i] - table[l, digits[l], i]
            best_idx[t] = bestk
            best_met[t] = best
    return best_idx_arr, best_met_arr
