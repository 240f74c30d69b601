# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner-loop kernels; see ``pyimpl`` for the reference semantics."""
from libc.math cimport sqrt

import numpy as np


def smooth_value(double[:, :, ::1] gram_eff, double[:, ::1] xty, double y_sqnorm,
                 double eps, double[:, ::1] P):
    # quad/lin/path use compensated accumulation: plain sequential sums leave
    # rounding noise near solver stopping tolerances at large problem scales
    cdef Py_ssize_t m = gram_eff.shape[0]
    cdef Py_ssize_t d = gram_eff.shape[1]
    cdef Py_ssize_t t, i, j
    cdef double quad = 0.0, qc = 0.0, lin = 0.0, lc = 0.0, path = 0.0, pc = 0.0
    cdef double gp, diff, term, carry
    for t in range(m):
        for i in range(d):
            gp = 0.0
            for j in range(d):
                gp += gram_eff[t, i, j] * P[j, t]
            term = P[i, t] * gp - qc
            carry = quad + term
            qc = (carry - quad) - term
            quad = carry
            term = xty[i, t] * P[i, t] - lc
            carry = lin + term
            lc = (carry - lin) - term
            lin = carry
    if eps != 0.0 and m > 1:
        for t in range(m - 1):
            for i in range(d):
                diff = P[i, t] - P[i, t + 1]
                term = diff * diff - pc
                carry = path + term
                pc = (carry - path) - term
                path = carry
    return 0.5 * quad - lin + 0.5 * y_sqnorm + 0.5 * eps * path


def smooth_grad(double[:, :, ::1] gram_eff, double[:, ::1] xty, double eps,
                double[:, ::1] P):
    cdef Py_ssize_t m = gram_eff.shape[0]
    cdef Py_ssize_t d = gram_eff.shape[1]
    cdef Py_ssize_t t, i, j
    cdef double gp
    out = np.empty((d, m))
    cdef double[:, ::1] G = out
    for t in range(m):
        for i in range(d):
            gp = 0.0
            for j in range(d):
                gp += gram_eff[t, i, j] * P[j, t]
            G[i, t] = gp - xty[i, t]
    if eps != 0.0 and m > 1:
        for i in range(d):
            G[i, 0] += eps * (P[i, 0] - P[i, 1])
            G[i, m - 1] += eps * (P[i, m - 1] - P[i, m - 2])
        for t in range(1, m - 1):
            for i in range(d):
                G[i, t] += eps * (2.0 * P[i, t] - P[i, t - 1] - P[i, t + 1])
    return out


def row_norm_sum(double[:, ::1] P):
    cdef Py_ssize_t d = P.shape[0]
    cdef Py_ssize_t m = P.shape[1]
    cdef Py_ssize_t i, t
    cdef double total = 0.0, sq
    for i in range(d):
        sq = 0.0
        for t in range(m):
            sq += P[i, t] * P[i, t]
        total += sqrt(sq)
    return total


def shrink_rows(double[:, ::1] U, double thresh):
    cdef Py_ssize_t d = U.shape[0]
    cdef Py_ssize_t m = U.shape[1]
    cdef Py_ssize_t i, t
    cdef double sq, nrm, factor
    out = np.empty((d, m))
    cdef double[:, ::1] O = out
    for i in range(d):
        sq = 0.0
        for t in range(m):
            sq += U[i, t] * U[i, t]
        nrm = sqrt(sq)
        factor = 1.0 - thresh / nrm if nrm > thresh else 0.0
        for t in range(m):
            O[i, t] = factor * U[i, t]
    return out
