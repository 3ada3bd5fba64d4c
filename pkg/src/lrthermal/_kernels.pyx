# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_fallback.py`` for the reference versions."""
import numpy as np
from libc.math cimport log, sqrt, fabs, pow, INFINITY


def slogpfaffian(double complex[:, ::1] a):
    """Parlett-Reid on the strict upper triangle only (skew symmetry implied).

    Row ``k`` of the upper triangle doubles as column ``k`` of the full matrix,
    so every access in the rank-2 update is contiguous.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, kp, i, j, p, q
    cdef double complex phase = 1.0
    cdef double complex pivot, tmp
    cdef double logabs = 0.0, best, v, r
    cdef double[::1] tr = np.empty(n)
    cdef double[::1] ti_ = np.empty(n)
    cdef double[::1] cr = np.empty(n)
    cdef double[::1] ci_ = np.empty(n)
    cdef double[:, ::1] ar, ai
    cdef double tre, tim, cre, cim
    cdef double complex[:, ::1] b = a
    for k in range(0, n - 1, 2):
        # pivot: largest |a[k, i]|, i > k
        kp = k + 1
        best = -1.0
        for i in range(k + 1, n):
            v = b[k, i].real * b[k, i].real + b[k, i].imag * b[k, i].imag
            if v > best:
                best = v
                kp = i
        if kp != k + 1:
            p = k + 1
            q = kp
            for i in range(k, p):
                tmp = b[i, p]
                b[i, p] = b[i, q]
                b[i, q] = tmp
            for j in range(q + 1, n):
                tmp = b[p, j]
                b[p, j] = b[q, j]
                b[q, j] = tmp
            for i in range(p + 1, q):
                tmp = b[p, i]
                b[p, i] = -b[i, q]
                b[i, q] = -tmp
            b[p, q] = -b[p, q]
            phase = -phase
        pivot = b[k, k + 1]
        if pivot.real == 0.0 and pivot.imag == 0.0:
            return 0j, -INFINITY
        r = sqrt(pivot.real * pivot.real + pivot.imag * pivot.imag)
        phase = phase * (pivot / r)
        logabs += log(r)
        if k + 2 < n:
            for j in range(k + 2, n):
                tmp = b[k, j] / pivot
                tr[j] = tmp.real
                ti_[j] = tmp.imag
                # full-matrix column k+1 below the diagonal
                cr[j] = -b[k + 1, j].real
                ci_[j] = -b[k + 1, j].imag
            for i in range(k + 2, n):
                tre = tr[i]
                tim = ti_[i]
                cre = cr[i]
                cim = ci_[i]
                for j in range(i + 1, n):
                    b[i, j].real = b[i, j].real + (tre * cr[j] - tim * ci_[j]) - (cre * tr[j] - cim * ti_[j])
                    b[i, j].imag = b[i, j].imag + (tre * ci_[j] + tim * cr[j]) - (cre * ti_[j] + cim * tr[j])
    return complex(phase), float(logabs)


def pair_power_sum(double[:, ::1] xa, double[:, ::1] xb, double exponent, int metric):
    cdef Py_ssize_t na = xa.shape[0], nb = xb.shape[0], dim = xa.shape[1]
    cdef Py_ssize_t p, q, c
    cdef double total = 0.0, dmin = INFINITY, d, diff
    for p in range(na):
        for q in range(nb):
            d = 0.0
            for c in range(dim):
                diff = xa[p, c] - xb[q, c]
                if metric == 0:
                    d += fabs(diff)
                else:
                    d += diff * diff
            if metric != 0:
                d = sqrt(d)
            if d < dmin:
                dmin = d
            if d == 0.0:
                return INFINITY, 0.0
            total += pow(d, -exponent)
    return total, dmin
