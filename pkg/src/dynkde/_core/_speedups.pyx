# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot loops: windowed kernel weight sums
over sorted samples and orbit iteration for the built-in maps.

Mirrors dynkde._core.fallback exactly (same contract, bit-identical
orbits)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, floor

cnp.import_array()

KERNEL_BOX1D = 0
KERNEL_EPANECHNIKOV = 1
KERNEL_BOX2D = 0


cdef inline double _weight_1d(double u, int code) nogil:
    if code == 0:
        return 1.0 if fabs(u) <= 0.5 else 0.0
    if fabs(u) <= 1.0:
        return 0.75 * (1.0 - u * u)
    return 0.0


cdef inline Py_ssize_t _lower_bound(const double[::1] xs, double value) nogil:
    cdef Py_ssize_t lo = 0, hi = xs.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _upper_bound(const double[::1] xs, double value) nogil:
    cdef Py_ssize_t lo = 0, hi = xs.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] <= value:
            lo = mid + 1
        else:
            hi = mid
    return lo


def kernel_sums_1d(xs_sorted, grid, double h, double radius, int code):
    cdef const double[::1] xs = np.ascontiguousarray(xs_sorted, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double r = h * radius
    cdef Py_ssize_t p = g.shape[0], k, i, lo, hi
    cdef double acc, gk
    out = np.empty(p)
    cdef double[::1] o = out
    with nogil:
        for k in range(p):
            gk = g[k]
            lo = _lower_bound(xs, gk - r)
            hi = _upper_bound(xs, gk + r)
            acc = 0.0
            for i in range(lo, hi):
                acc += _weight_1d((gk - xs[i]) / h, code)
            o[k] = acc
    return out


def kernel_weighted_sums_1d(xs_sorted, ys_sorted, grid, double h,
                            double radius, int code):
    cdef const double[::1] xs = np.ascontiguousarray(xs_sorted, dtype=np.float64)
    cdef const double[:, ::1] ys = np.ascontiguousarray(ys_sorted, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double r = h * radius
    cdef Py_ssize_t p = g.shape[0], q = ys.shape[1], k, i, j, lo, hi
    cdef double w, gk
    s0 = np.empty(p)
    s1 = np.zeros((p, q))
    cdef double[::1] v0 = s0
    cdef double[:, ::1] v1 = s1
    with nogil:
        for k in range(p):
            gk = g[k]
            lo = _lower_bound(xs, gk - r)
            hi = _upper_bound(xs, gk + r)
            v0[k] = 0.0
            for i in range(lo, hi):
                w = _weight_1d((gk - xs[i]) / h, code)
                v0[k] += w
                for j in range(q):
                    v1[k, j] += w * ys[i, j]
    return s0, s1


def kernel_sums_2d(x_sorted, grid, double h, double radius, int code):
    cdef const double[:, ::1] X = np.ascontiguousarray(x_sorted, dtype=np.float64)
    cdef const double[:, ::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double r = h * radius
    cdef Py_ssize_t n = X.shape[0], p = g.shape[0], k, i, lo, hi
    cdef double acc, g0, g1
    out = np.empty(p)
    cdef double[::1] o = out
    with nogil:
        for k in range(p):
            g0 = g[k, 0]
            g1 = g[k, 1]
            lo = _bisect_col0(X, g0 - r, 0)
            hi = _bisect_col0(X, g0 + r, 1)
            acc = 0.0
            for i in range(lo, hi):
                if fabs(g1 - X[i, 1]) <= r:
                    acc += 1.0
            o[k] = 0.25 * acc
    return out


def kernel_weighted_sums_2d(x_sorted, y_sorted, grid, double h,
                            double radius, int code):
    cdef const double[:, ::1] X = np.ascontiguousarray(x_sorted, dtype=np.float64)
    cdef const double[:, ::1] Y = np.ascontiguousarray(y_sorted, dtype=np.float64)
    cdef const double[:, ::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double r = h * radius
    cdef Py_ssize_t p = g.shape[0], q = Y.shape[1], k, i, j, lo, hi
    cdef double cnt, g0, g1
    s0 = np.empty(p)
    s1 = np.zeros((p, q))
    cdef double[::1] v0 = s0
    cdef double[:, ::1] v1 = s1
    with nogil:
        for k in range(p):
            g0 = g[k, 0]
            g1 = g[k, 1]
            lo = _bisect_col0(X, g0 - r, 0)
            hi = _bisect_col0(X, g0 + r, 1)
            cnt = 0.0
            for i in range(lo, hi):
                if fabs(g1 - X[i, 1]) <= r:
                    cnt += 1.0
                    for j in range(q):
                        v1[k, j] += 0.25 * Y[i, j]
            v0[k] = 0.25 * cnt
    return s0, s1


cdef inline Py_ssize_t _bisect_col0(const double[:, ::1] X, double value,
                                    int upper) nogil:
    cdef Py_ssize_t lo = 0, hi = X.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if (X[mid, 0] <= value) if upper else (X[mid, 0] < value):
            lo = mid + 1
        else:
            hi = mid
    return lo


def orbit_beta(double x0, Py_ssize_t n, double beta, double dither):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double x = x0, y
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = x
            y = beta * x + dither
            x = y - floor(y)
    return out


def orbit_gauss(double x0, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double x = x0, u
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = x
            if x == 0.0:
                x = 0.0
            else:
                u = 1.0 / x
                x = u - floor(u)
    return out


def orbit_alpha_gauss(double x0, Py_ssize_t n, double alpha):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double x = x0, u
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = x
            if x == 0.0:
                x = 0.0
            else:
                u = fabs(1.0 / x)
                x = u - floor(u + 1.0 - alpha)
    return out


def orbit_logistic(double x0, Py_ssize_t n, double a):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double x = x0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = x
            x = a * x * (1.0 - x)
    return out


def orbit_matrix2(double x0, double y0, Py_ssize_t n, double b11, double b12,
                  double b21, double b22):
    out = np.empty((n, 2))
    cdef double[:, ::1] o = out
    cdef double x = x0, y = y0, u, v
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i, 0] = x
            o[i, 1] = y
            u = b11 * x + b12 * y
            v = b21 * x + b22 * y
            x = u - floor(u)
            y = v - floor(v)
    return out
