# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled prefix-sum sweeps for maximal partial sums.

Both kernels walk each evaluation point once, keeping a running complex
prefix sum and the smallest cutoff whose squared modulus is maximal.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def max_partial_phase(const double complex[::1] coef,
                      const cnp.int64_t[::1] freq,
                      const cnp.int64_t[::1] points,
                      cnp.int64_t modulus,
                      const double complex[::1] roots):
    cdef Py_ssize_t K = coef.shape[0]
    cdef Py_ssize_t P = points.shape[0]
    cdef cnp.ndarray[double, ndim=1] maxima = np.zeros(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] argmax = np.zeros(P, dtype=np.int64)
    cdef double[::1] mx = maxima
    cdef cnp.int64_t[::1] am = argmax
    cdef Py_ssize_t i, n
    cdef cnp.int64_t x, idx, best_n
    cdef double sr, si, cr, ci, rr, ri, sq, best
    for i in range(P):
        x = points[i] % modulus
        if x < 0:
            x += modulus
        sr = 0.0
        si = 0.0
        best = -1.0
        best_n = 0
        for n in range(K):
            idx = (freq[n] * x) % modulus
            if idx < 0:
                idx += modulus
            cr = coef[n].real
            ci = coef[n].imag
            rr = roots[idx].real
            ri = roots[idx].imag
            sr = sr + (cr * rr - ci * ri)
            si = si + (cr * ri + ci * rr)
            sq = sr * sr + si * si
            if sq > best:
                best = sq
                best_n = n
        mx[i] = sqrt(best) if K > 0 else 0.0
        am[i] = best_n
    return maxima, argmax


def max_partial_table(const double complex[::1] coef,
                      const double complex[:, ::1] table):
    cdef Py_ssize_t P = table.shape[0]
    cdef Py_ssize_t K = table.shape[1]
    cdef cnp.ndarray[double, ndim=1] maxima = np.zeros(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] argmax = np.zeros(P, dtype=np.int64)
    cdef double[::1] mx = maxima
    cdef cnp.int64_t[::1] am = argmax
    cdef Py_ssize_t i, n
    cdef cnp.int64_t best_n
    cdef double sr, si, cr, ci, rr, ri, sq, best
    for i in range(P):
        sr = 0.0
        si = 0.0
        best = -1.0
        best_n = 0
        for n in range(K):
            cr = coef[n].real
            ci = coef[n].imag
            rr = table[i, n].real
            ri = table[i, n].imag
            sr = sr + (cr * rr - ci * ri)
            si = si + (cr * ri + ci * rr)
            sq = sr * sr + si * si
            if sq > best:
                best = sq
                best_n = n
        mx[i] = sqrt(best) if K > 0 else 0.0
        am[i] = best_n
    return maxima, argmax
