# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels (Lorenz-Mie series, line-by-line sums).

Mirrors ``_kernels_py`` exactly; both release nothing but plain floats and
arrays, so callers can switch between them freely.
"""

import numpy as np

from libc.math cimport sin, cos, M_PI
from libc.stdlib cimport malloc, free


def mie_sums(double x, double complex m, int nstop):
    cdef double complex mx = m * x
    cdef double amx = (mx.real * mx.real + mx.imag * mx.imag) ** 0.5
    cdef int nmx = max(nstop, <int>amx) + 16
    cdef double complex *d = <double complex *> malloc((nmx + 1) * sizeof(double complex))
    if d == NULL:
        raise MemoryError()
    cdef int n
    cdef double complex rn, da, db, xi, xi1, an, bn
    cdef double psi, psi0, psi1, chi, chi0, chi1, fn, w
    cdef double qext = 0.0, qsca = 0.0
    try:
        with nogil:
            d[nmx] = 0.0
            for n in range(nmx, 0, -1):
                rn = n / mx
                d[n - 1] = rn - 1.0 / (d[n] + rn)
            psi0 = cos(x)
            psi1 = sin(x)
            chi0 = -sin(x)
            chi1 = cos(x)
            xi1 = psi1 - 1j * chi1
            for n in range(1, nstop + 1):
                fn = (2.0 * n - 1.0) / x
                psi = fn * psi1 - psi0
                chi = fn * chi1 - chi0
                xi = psi - 1j * chi
                da = d[n] / m + n / x
                db = d[n] * m + n / x
                an = (da * psi - psi1) / (da * xi - xi1)
                bn = (db * psi - psi1) / (db * xi - xi1)
                w = 2.0 * n + 1.0
                qext += w * (an.real + bn.real)
                qsca += w * (an.real * an.real + an.imag * an.imag
                             + bn.real * bn.real + bn.imag * bn.imag)
                psi0 = psi1
                psi1 = psi
                chi0 = chi1
                chi1 = chi
                xi1 = psi1 - 1j * chi1
    finally:
        free(d)
    return qext * 2.0 / (x * x), qsca * 2.0 / (x * x)


def vvw_line_sum(double f, f0, strength, width):
    cdef double[::1] f0v = np.ascontiguousarray(f0, dtype=np.float64)
    cdef double[:, ::1] sv = np.ascontiguousarray(strength, dtype=np.float64)
    cdef double[:, ::1] wv = np.ascontiguousarray(width, dtype=np.float64)
    cdef Py_ssize_t nl = sv.shape[0], npts = sv.shape[1], i, j
    out = np.zeros(npts, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double c, g, lo, hi, r
    with nogil:
        for i in range(nl):
            c = f0v[i]
            r = (f / c) * (f / c) / M_PI
            lo = (c - f) * (c - f)
            hi = (c + f) * (c + f)
            for j in range(npts):
                g = wv[i, j]
                ov[j] += sv[i, j] * r * (g / (lo + g * g) + g / (hi + g * g))
    return out
