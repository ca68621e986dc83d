# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels.

Same contract as ``nldw._kernels_py``; reductions use Neumaier-compensated
summation so results do not depend on traversal order beyond rounding.
"""

import numpy as np

from libc.math cimport fabs

BACKEND = "cython"


cdef struct Acc:
    double s
    double c


cdef inline void _add(Acc* a, double x) noexcept nogil:
    cdef double t = a.s + x
    if fabs(a.s) >= fabs(x):
        a.c += (a.s - t) + x
    else:
        a.c += (x - t) + a.s
    a.s = t


cdef inline double _val(Acc* a) noexcept nogil:
    return a.s + a.c


cdef double _axis_pass(const double* u, double* out, Py_ssize_t n, int axis,
                       double h, bint adjoint) noexcept nogil:
    cdef Py_ssize_t outer = 1, inner = 1, o, k, t, i, base, s
    cdef int j
    for j in range(axis):
        outer *= n
    for j in range(2 - axis):
        inner *= n
    s = inner
    cdef double inv = 1.0 / h
    cdef double c1 = inv / 24.0
    cdef double c27 = 27.0 * inv / 24.0
    cdef double d, db
    cdef Acc acc
    acc.s = 0.0
    acc.c = 0.0
    for o in range(outer):
        for k in range(n - 1):
            base = (o * n + k) * inner
            if k == 0 or k == n - 2:
                for t in range(inner):
                    i = base + t
                    d = (u[i + s] - u[i]) * inv
                    _add(&acc, d * d)
                    if adjoint:
                        db = d * inv
                        out[i + s] += db
                        out[i] -= db
            else:
                for t in range(inner):
                    i = base + t
                    d = c27 * (u[i + s] - u[i]) - c1 * (u[i + 2 * s] - u[i - s])
                    _add(&acc, d * d)
                    if adjoint:
                        out[i - s] += c1 * d
                        out[i] -= c27 * d
                        out[i + s] += c27 * d
                        out[i + 2 * s] -= c1 * d
    return _val(&acc)


def _as_cube(u):
    arr = np.ascontiguousarray(u, dtype=np.float64)
    if arr.ndim != 3 or not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
        raise ValueError("expected a cubic 3-D array")
    return arr


def face_sumsq(u, double h):
    """Sum over all faces and axes of the squared face difference."""
    arr = _as_cube(u)
    cdef const double[::1] uv = arr.ravel()
    cdef Py_ssize_t n = arr.shape[0]
    cdef double total = 0.0
    cdef int a
    with nogil:
        for a in range(3):
            total += _axis_pass(&uv[0], NULL, n, a, h, False)
    return total


def face_gradient(u, double h):
    """Return ``(sumsq, DtD u)`` where D is the face-difference operator."""
    arr = _as_cube(u)
    out = np.zeros_like(arr)
    cdef const double[::1] uv = arr.ravel()
    cdef double[::1] ov = out.ravel()
    cdef Py_ssize_t n = arr.shape[0]
    cdef double total = 0.0
    cdef int a
    with nogil:
        for a in range(3):
            total += _axis_pass(&uv[0], &ov[0], n, a, h, True)
    return total, out


def local_sums(u, w):
    """Return ``(sum u, sum u^2, sum u^3, sum u^4, sum u^2 (1-u)^2, sum w u)``."""
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64).ravel()
    if uv.shape[0] != wv.shape[0]:
        raise ValueError("weight array does not match field")
    cdef Acc a1, a2, a3, a4, aw, ax
    a1.s = a1.c = a2.s = a2.c = a3.s = a3.c = 0.0
    a4.s = a4.c = aw.s = aw.c = ax.s = ax.c = 0.0
    cdef Py_ssize_t i, m = uv.shape[0]
    cdef double x, x2, om
    with nogil:
        for i in range(m):
            x = uv[i]
            x2 = x * x
            om = 1.0 - x
            _add(&a1, x)
            _add(&a2, x2)
            _add(&a3, x2 * x)
            _add(&a4, x2 * x2)
            _add(&aw, x2 * om * om)
            _add(&ax, wv[i] * x)
    return (_val(&a1), _val(&a2), _val(&a3), _val(&a4), _val(&aw), _val(&ax))


cdef double _clip_sum(const double* u, Py_ssize_t m, double mu, Py_ssize_t* count) noexcept nogil:
    cdef Acc acc
    acc.s = 0.0
    acc.c = 0.0
    cdef Py_ssize_t i, cnt = 0
    cdef double v
    for i in range(m):
        v = u[i] - mu
        if v > 0.0:
            _add(&acc, v)
            cnt += 1
    count[0] = cnt
    return _val(&acc)


def shift_clip_sum(u, double mu):
    """Return ``(sum max(u - mu, 0), #{u > mu})``."""
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef Py_ssize_t cnt = 0
    cdef double s
    with nogil:
        s = _clip_sum(&uv[0], uv.shape[0], mu, &cnt)
    return s, int(cnt)


def find_shift(u, double target, double tol=1e-12, int max_iter=400):
    """Solve ``sum max(u - mu, 0) = target`` for mu by bisection.

    Entries at or below the lower bracket never contribute again, so the
    working copy is compacted whenever the lower bracket rises.
    """
    cdef double[::1] buf = np.array(u, dtype=np.float64).ravel()
    if not target > 0.0:
        raise ValueError("target sum must be positive")
    cdef Py_ssize_t m = buf.shape[0], i, j, cnt = 0
    cdef double lo = buf[0], hi = buf[0], mid, f, width
    cdef int it
    cdef Acc acc
    with nogil:
        for i in range(m):
            if buf[i] > hi:
                hi = buf[i]
            if buf[i] < lo:
                lo = buf[i]
        lo -= target / m
        f = _clip_sum(&buf[0], m, lo, &cnt)
    if f < target:
        raise ArithmeticError("shift bisection does not bracket the target")
    with nogil:
        for it in range(max_iter):
            width = fabs(lo)
            if fabs(hi) > width:
                width = fabs(hi)
            if width < 1.0:
                width = 1.0
            if hi - lo <= tol * width:
                break
            mid = 0.5 * (lo + hi)
            f = _clip_sum(&buf[0], m, mid, &cnt)
            if f > target:
                lo = mid
                j = 0
                for i in range(m):
                    if buf[i] > lo:
                        buf[j] = buf[i]
                        j += 1
                m = j
            else:
                hi = mid
        acc.s = 0.0
        acc.c = 0.0
        cnt = 0
        for i in range(m):
            if buf[i] > lo:
                _add(&acc, buf[i])
                cnt += 1
    return (_val(&acc) - target) / cnt
