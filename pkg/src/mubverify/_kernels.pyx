# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_fallback`` for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, NAN, INFINITY

cnp.import_array()

NAME = "cython"


def sample_outcomes(uniforms, cdf, last):
    cdef double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef double[:, ::1] table = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef long long[::1] cap = np.ascontiguousarray(last, dtype=np.int64)
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t n_settings = table.shape[0]
    cdef Py_ssize_t n_out = table.shape[1]
    settings_arr = np.empty(n, dtype=np.int64)
    outcomes_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] settings = settings_arr
    cdef long long[::1] outcomes = outcomes_arr
    cdef Py_ssize_t c, j
    cdef long long s
    cdef double r
    with nogil:
        for c in range(n):
            s = <long long>(u[c, 0] * n_settings)
            if s > n_settings - 1:
                s = n_settings - 1
            r = u[c, 1]
            j = 0
            while j < n_out and not (r < table[s, j]):
                j += 1
            if j > cap[s]:
                j = cap[s]
            settings[c] = s
            outcomes[c] = j
    return settings_arr, outcomes_arr


cdef inline double _kl(double x, double y) nogil:
    cdef double total = 0.0
    if x > 0:
        if y <= 0:
            return INFINITY
        total += x * log(x / y)
    if x < 1:
        if y >= 1:
            return INFINITY
        total += (1 - x) * log((1 - x) / (1 - y))
    return total


def kl_divergence(x, y):
    xb, yb = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    shape = xb.shape
    cdef double[::1] xs = np.ascontiguousarray(xb).ravel()
    cdef double[::1] ys = np.ascontiguousarray(yb).ravel()
    out_arr = np.empty(xs.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(xs.shape[0]):
            out[i] = _kl(xs[i], ys[i])
    return out_arr.reshape(shape)


def solve_y(x, c, double tol, int max_iter):
    cdef double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] cs = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int it, worst = 0
    cdef double lo, hi, mid
    with nogil:
        for i in range(n):
            if xs[i] <= 0:
                out[i] = NAN
                continue
            if not (cs[i] > 0):
                out[i] = xs[i]
                continue
            lo = 0.0
            hi = xs[i]
            it = 0
            while it < max_iter and hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _kl(xs[i], mid) >= cs[i]:
                    lo = mid
                else:
                    hi = mid
                it += 1
            if it > worst:
                worst = it
            out[i] = lo
    return out_arr, worst
