# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: affine field evaluation and the fixed-step RK4 sweep.

The pure-Python twin lives in ``_rk4_py.py``. Both modules expose the same
two functions; ``effode._kernels`` picks one at import time.
"""

from libc.math cimport isfinite

import numpy as np


cdef void _field(const double[::1] b, const double[:, ::1] A,
                 const double[::1] x, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc = acc + A[i, j] * x[j]
        out[i] = b[i] + acc


def affine_field(intercepts, coefficients, x):
    """Return ``intercepts + coefficients @ x`` for one state vector."""
    b = np.ascontiguousarray(intercepts, dtype=np.float64)
    A = np.ascontiguousarray(coefficients, dtype=np.float64)
    xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(b.shape[0], dtype=np.float64)
    _field(b, A, xv, out)
    return out


def rk4_affine(intercepts, coefficients, x0, grid, states, derivatives):
    """Classical RK4 sweep along ``grid`` for the affine system.

    ``states`` and ``derivatives`` are (len(grid), n) float64 buffers filled
    in place; row k of ``derivatives`` is the field evaluated at row k of
    ``states``, produced by the same compiled routine as ``affine_field``.
    Returns -1 on success, otherwise the grid index at which the state
    stopped being finite.
    """
    cdef const double[::1] b = np.ascontiguousarray(intercepts, dtype=np.float64)
    cdef const double[:, ::1] A = np.ascontiguousarray(coefficients, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double[:, ::1] S = states
    cdef double[:, ::1] D = derivatives

    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t m = g.shape[0]
    cdef Py_ssize_t i, k
    cdef Py_ssize_t status = -1
    cdef double h
    cdef bint ok

    scratch = np.empty((6, n), dtype=np.float64)
    cdef double[::1] x = scratch[0]
    cdef double[::1] xt = scratch[1]
    cdef double[::1] k1 = scratch[2]
    cdef double[::1] k2 = scratch[3]
    cdef double[::1] k3 = scratch[4]
    cdef double[::1] k4 = scratch[5]

    x0v = np.ascontiguousarray(x0, dtype=np.float64)
    cdef const double[::1] xi = x0v

    if m == 0:
        return -1

    with nogil:
        for i in range(n):
            x[i] = xi[i]
            S[0, i] = x[i]
        _field(b, A, x, k1)
        for i in range(n):
            D[0, i] = k1[i]

        for k in range(m - 1):
            h = g[k + 1] - g[k]
            _field(b, A, x, k1)
            for i in range(n):
                xt[i] = x[i] + 0.5 * h * k1[i]
            _field(b, A, xt, k2)
            for i in range(n):
                xt[i] = x[i] + 0.5 * h * k2[i]
            _field(b, A, xt, k3)
            for i in range(n):
                xt[i] = x[i] + h * k3[i]
            _field(b, A, xt, k4)
            ok = True
            for i in range(n):
                x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not isfinite(x[i]):
                    ok = False
            if not ok:
                status = k + 1
                break
            for i in range(n):
                S[k + 1, i] = x[i]
            _field(b, A, x, k1)
            for i in range(n):
                D[k + 1, i] = k1[i]

    return status
