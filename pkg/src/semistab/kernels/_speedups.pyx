# cython: language_level=3
"""Cython kernels, signature-compatible with ._reference.

## build in place for development: python setup.py build_ext --inplace
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp as fexp
from libc.math cimport pow as fpow
from libc.math cimport sqrt as fsqrt

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)

DEF SMALL_Z = 1e-6


cdef inline void _fill_exp_phi(const double complex[::1] lam, double dt,
                               double complex[::1] decay,
                               double complex[::1] phi) noexcept nogil:
    cdef Py_ssize_t n, N = lam.shape[0]
    cdef double complex z, e
    for n in range(N):
        z = lam[n] * dt
        e = cexp(z)
        decay[n] = e
        if cabs(z) < SMALL_Z:
            phi[n] = dt * (1.0 + z / 2.0 + z * z / 6.0)
        else:
            phi[n] = (e - 1.0) / lam[n]


def scan_states(const double complex[::1] lam,
                const double[::1] dts,
                const double complex[:, ::1] coeffs,
                const double complex[:, ::1] cols,
                const double complex[::1] x0):
    """See semistab.kernels._reference.scan_states."""
    cdef Py_ssize_t P = dts.shape[0]
    cdef Py_ssize_t N = lam.shape[0]
    cdef Py_ssize_t m = cols.shape[0]
    out = np.empty((P + 1, N), dtype=np.complex128)
    cdef double complex[:, ::1] states = out
    dbuf = np.empty(N, dtype=np.complex128)
    pbuf = np.empty(N, dtype=np.complex128)
    gbuf = np.empty(N, dtype=np.complex128)
    cdef double complex[::1] decay = dbuf
    cdef double complex[::1] phi = pbuf
    cdef double complex[::1] forcing = gbuf
    cdef Py_ssize_t j, n, k
    cdef bint uniform = True
    cdef double complex c
    for j in range(1, P):
        if dts[j] != dts[0]:
            uniform = False
            break
    with nogil:
        for n in range(N):
            states[0, n] = x0[n]
        if P > 0:
            _fill_exp_phi(lam, dts[0], decay, phi)
            for j in range(P):
                if not uniform and j > 0:
                    _fill_exp_phi(lam, dts[j], decay, phi)
                for n in range(N):
                    forcing[n] = 0.0
                for k in range(m):
                    c = coeffs[j, k]
                    if c != 0.0:
                        for n in range(N):
                            forcing[n] = forcing[n] + c * cols[k, n]
                for n in range(N):
                    states[j + 1, n] = decay[n] * states[j, n] + phi[n] * forcing[n]
    return out


def scan_norms(const double complex[::1] lam,
               const double[::1] dts,
               const double complex[:, ::1] coeffs,
               const double complex[:, ::1] cols,
               const double complex[::1] x0):
    """See semistab.kernels._reference.scan_norms."""
    cdef Py_ssize_t P = dts.shape[0]
    cdef Py_ssize_t N = lam.shape[0]
    cdef Py_ssize_t m = cols.shape[0]
    out = np.empty(P + 1, dtype=np.float64)
    cdef double[::1] norms = out
    xbuf = np.array(x0, dtype=np.complex128, copy=True)
    dbuf = np.empty(N, dtype=np.complex128)
    pbuf = np.empty(N, dtype=np.complex128)
    cdef double complex[::1] x = xbuf
    cdef double complex[::1] decay = dbuf
    cdef double complex[::1] phi = pbuf
    cdef Py_ssize_t j, n, k
    cdef bint uniform = True
    cdef double complex c, g
    cdef double acc
    for j in range(1, P):
        if dts[j] != dts[0]:
            uniform = False
            break
    with nogil:
        acc = 0.0
        for n in range(N):
            acc += x[n].real * x[n].real + x[n].imag * x[n].imag
        norms[0] = fsqrt(acc)
        if P > 0:
            _fill_exp_phi(lam, dts[0], decay, phi)
            for j in range(P):
                if not uniform and j > 0:
                    _fill_exp_phi(lam, dts[j], decay, phi)
                acc = 0.0
                for n in range(N):
                    g = 0.0
                    for k in range(m):
                        c = coeffs[j, k]
                        if c != 0.0:
                            g = g + c * cols[k, n]
                    x[n] = decay[n] * x[n] + phi[n] * g
                    acc += x[n].real * x[n].real + x[n].imag * x[n].imag
                norms[j + 1] = fsqrt(acc)
    return out


def decay_sup_grid(const double[::1] re_lam,
                   const double[::1] abs_lam,
                   double beta,
                   const double[::1] ts):
    """See semistab.kernels._reference.decay_sup_grid."""
    cdef Py_ssize_t N = re_lam.shape[0]
    cdef Py_ssize_t T = ts.shape[0]
    out = np.empty(T, dtype=np.float64)
    wbuf = np.empty(N, dtype=np.float64)
    cdef double[::1] vals = out
    cdef double[::1] w = wbuf
    cdef Py_ssize_t i, n
    cdef double best, v, t
    with nogil:
        for n in range(N):
            if beta != 0.0:
                w[n] = fpow(abs_lam[n], -beta)
            else:
                w[n] = 1.0
        for i in range(T):
            t = ts[i]
            best = -1.0
            for n in range(N):
                v = fexp(t * re_lam[n]) * w[n]
                if v > best:
                    best = v
            vals[i] = best
    return out
