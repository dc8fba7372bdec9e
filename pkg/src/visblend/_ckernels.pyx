# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled raster / point-in-region kernels.

Same contract as ``visblend._pykernels``; arithmetic is kept in the same order
so both backends agree bit-for-bit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, floor, sqrt, hypot
from libc.stdlib cimport malloc, free, qsort

cnp.import_array()


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*>a)[0]
    cdef double y = (<const double*>b)[0]
    return (x > y) - (x < y)


cdef inline void _span(double[:, ::1] canvas, Py_ssize_t r, double xa, double xb,
                       double value, bint closed_right) noexcept nogil:
    cdef Py_ssize_t W = canvas.shape[1]
    cdef double lo = ceil(xa - 0.5)
    cdef double hi
    if closed_right:
        hi = floor(xb - 0.5) + 1
    else:
        hi = ceil(xb - 0.5)
    if lo < 0:
        lo = 0
    if hi > W:
        hi = W
    cdef Py_ssize_t c
    for c in range(<Py_ssize_t>lo, <Py_ssize_t>hi):
        canvas[r, c] = value


cdef void _fill(double[:, ::1] canvas, const double* xs, const double* ys,
                const long long* starts, Py_ssize_t nrings, double value) noexcept nogil:
    cdef Py_ssize_t H = canvas.shape[0]
    cdef Py_ssize_t nedges = 0, k, a, b, i, j, r, m, r_lo, r_hi
    cdef double ymin = 1e300, ymax = -1e300, y, x0, y0, x1, y1
    for k in range(nrings):
        a = starts[k]
        b = starts[k + 1]
        if b - a < 2:
            continue
        nedges += b - a
        for i in range(a, b):
            if ys[i] < ymin:
                ymin = ys[i]
            if ys[i] > ymax:
                ymax = ys[i]
    if nedges == 0:
        return
    r_lo = <Py_ssize_t>floor(ymin - 0.5)
    r_hi = <Py_ssize_t>ceil(ymax + 0.5)
    if r_lo < 0:
        r_lo = 0
    if r_hi > H:
        r_hi = H
    cdef double* xc = <double*>malloc(nedges * sizeof(double))
    if xc == NULL:
        return
    for r in range(r_lo, r_hi):
        y = r + 0.5
        m = 0
        for k in range(nrings):
            a = starts[k]
            b = starts[k + 1]
            if b - a < 2:
                continue
            for i in range(a, b):
                j = i + 1 if i + 1 < b else a
                x0 = xs[i]
                y0 = ys[i]
                x1 = xs[j]
                y1 = ys[j]
                if (y0 > y) != (y1 > y):
                    xc[m] = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
                    m += 1
        if m < 2:
            continue
        qsort(xc, m, sizeof(double), _cmp_double)
        i = 0
        while i + 1 < m:
            _span(canvas, r, xc[i], xc[i + 1], value, False)
            i += 2
    free(xc)


cdef void _ellipse(double[:, ::1] canvas, double cx, double cy, double rx, double ry,
                   double value) noexcept nogil:
    if rx <= 0 or ry <= 0:
        return
    cdef Py_ssize_t H = canvas.shape[0]
    cdef Py_ssize_t r_lo = <Py_ssize_t>floor(cy - ry - 0.5)
    cdef Py_ssize_t r_hi = <Py_ssize_t>ceil(cy + ry + 0.5)
    cdef Py_ssize_t r
    cdef double q, t, half
    if r_lo < 0:
        r_lo = 0
    if r_hi > H:
        r_hi = H
    for r in range(r_lo, r_hi):
        q = (r + 0.5 - cy) / ry
        t = 1.0 - q * q
        if t < 0:
            continue
        half = rx * sqrt(t)
        _span(canvas, r, cx - half, cx + half, value, True)


def points_in_rings(px, py, xs, ys, starts):
    cdef const double[::1] PX = np.ascontiguousarray(px, dtype=np.float64)
    cdef const double[::1] PY = np.ascontiguousarray(py, dtype=np.float64)
    cdef const double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const long long[::1] S = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t n = PX.shape[0], nr = S.shape[0] - 1
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] O = out
    cdef Py_ssize_t p, k, a, b, i, j
    cdef double x, y, x0, y0, x1, y1
    cdef unsigned char c
    with nogil:
        for p in range(n):
            x = PX[p]
            y = PY[p]
            c = 0
            for k in range(nr):
                a = S[k]
                b = S[k + 1]
                if b - a < 2:
                    continue
                for i in range(a, b):
                    j = i + 1 if i + 1 < b else a
                    x0 = X[i]
                    y0 = Y[i]
                    x1 = X[j]
                    y1 = Y[j]
                    if (y0 > y) != (y1 > y):
                        if x < x0 + (y - y0) * (x1 - x0) / (y1 - y0):
                            c ^= 1
            O[p] = c
    return out


def paint_rings(double[:, ::1] canvas, xs, ys, starts, double value):
    cdef const double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const long long[::1] S = np.ascontiguousarray(starts, dtype=np.int64)
    if X.shape[0] == 0 or S.shape[0] < 2:
        return
    with nogil:
        _fill(canvas, &X[0], &Y[0], &S[0], S.shape[0] - 1, value)


def paint_ellipse(double[:, ::1] canvas, double cx, double cy, double rx, double ry,
                  double value):
    with nogil:
        _ellipse(canvas, cx, cy, rx, ry, value)


def paint_stroke(double[:, ::1] canvas, xs, ys, bint closed, double half_width,
                 double value):
    cdef const double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0], m, i, j
    cdef double dx, dy, L, nx, ny
    cdef double qx[4]
    cdef double qy[4]
    cdef long long qs[2]
    if n == 0 or half_width <= 0:
        return
    m = n if (closed and n > 2) else n - 1
    qs[0] = 0
    qs[1] = 4
    with nogil:
        for i in range(m):
            j = (i + 1) % n
            dx = X[j] - X[i]
            dy = Y[j] - Y[i]
            L = hypot(dx, dy)
            if L == 0:
                continue
            nx = -dy / L * half_width
            ny = dx / L * half_width
            qx[0] = X[i] + nx
            qx[1] = X[j] + nx
            qx[2] = X[j] - nx
            qx[3] = X[i] - nx
            qy[0] = Y[i] + ny
            qy[1] = Y[j] + ny
            qy[2] = Y[j] - ny
            qy[3] = Y[i] - ny
            _fill(canvas, qx, qy, qs, 1, value)
        for i in range(n):
            _ellipse(canvas, X[i], Y[i], half_width, half_width, value)


def rmse(a, b):
    cdef const double[::1] A = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef const double[::1] B = np.ascontiguousarray(b, dtype=np.float64).ravel()
    if A.shape[0] != B.shape[0]:
        raise ValueError("arrays differ in size")
    cdef Py_ssize_t i, n = A.shape[0]
    cdef double s = 0.0, d
    if n == 0:
        return float("nan")
    with nogil:
        for i in range(n):
            d = A[i] - B[i]
            s += d * d
    return sqrt(s / n)
