# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled engine for the hinge inner loop. Same contract and operation
order as the numpy fallback in _hinge_numpy."""

from libc.math cimport fabs, isfinite

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def svrg_epoch(double[:, ::1] U, double[:, ::1] uz, double[::1] anchor_coefs,
               double[::1] g_full, cnp.int64_t[::1] idx,
               double[::1] x, double[::1] x_sum,
               double gamma, double radius, double lam1, double lam2):
    cdef Py_ssize_t steps = idx.shape[0]
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t m = uz.shape[1]
    cdef double thr = gamma * lam2
    cdef double denom = 1.0 + 2.0 * gamma * lam1
    cdef Py_ssize_t t, j, k, i
    cdef long cnt
    cdef double margin, cur, delta, y, mag, xk
    cdef bint ok

    for t in range(steps):
        i = <Py_ssize_t> idx[t]
        margin = 0.0
        for k in range(d):
            margin += U[i, k] * x[k]
        cnt = 0
        for j in range(m):
            if margin + radius * uz[i, j] < 1.0:
                cnt += 1
        cur = cnt / <double> m
        delta = anchor_coefs[i] - cur
        ok = True
        for k in range(d):
            y = x[k] - gamma * (g_full[k] + delta * U[i, k])
            mag = fabs(y) - thr
            if mag < 0.0:
                mag = 0.0
            if y > 0.0:
                xk = mag / denom
            elif y < 0.0:
                xk = -mag / denom
            else:
                xk = 0.0
            x[k] = xk
            if not isfinite(xk):
                ok = False
        if not ok:
            return t
        for k in range(d):
            x_sum[k] += x[k]
    return -1
