# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elementwise kernels.

Mirrors _accel_py.py exactly; see that module for the branch formulas.
The cross-backend consistency test keeps the two implementations aligned.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, fabs, pow as cpow, sin, sqrt

cnp.import_array()

BACKEND_NAME = "cython"

DELTA = 1e-4

cdef double _DELTA = 1e-4
cdef double _SERIES_RTOL = 1e-17
cdef int _SERIES_MAX_TERMS = 256


cdef inline void _khat_scalar(double t, double xi2, double* kh, double* kp) noexcept nogil:
    cdef double D = 0.25 - xi2
    cdef double emt = exp(-0.5 * t)
    cdef double q, ea, eb, k, c
    cdef double s_odd, s_even, term_odd, term_even, tt, bound
    cdef int j
    if D > _DELTA:
        q = sqrt(D)
        ea = exp(t * (q - 0.5))
        eb = exp(-t * (q + 0.5))
        k = (ea - eb) / (2.0 * q)
        c = 0.5 * (ea + eb)
    elif D < -_DELTA:
        q = sqrt(-D)
        k = emt * sin(t * q) / q
        c = emt * cos(t * q)
    else:
        s_odd = t
        s_even = 1.0
        term_odd = t
        term_even = 1.0
        tt = t * t
        for j in range(1, _SERIES_MAX_TERMS):
            term_even = term_even * D * tt / ((2 * j - 1) * (2 * j))
            term_odd = term_odd * D * tt / ((2 * j) * (2 * j + 1))
            s_even += term_even
            s_odd += term_odd
            bound = fabs(s_odd)
            if bound < 1e-300:
                bound = 1e-300
            if fabs(term_odd) < _SERIES_RTOL * bound:
                bound = fabs(s_even)
                if bound < 1e-300:
                    bound = 1e-300
                if fabs(term_even) < _SERIES_RTOL * bound:
                    break
        k = emt * s_odd
        c = emt * s_even
    kh[0] = k
    kp[0] = -0.5 * k + c


def khat_kprime(double t, xi2):
    """Dispersion multiplier and time derivative; same contract as the numpy backend."""
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(xi2, dtype=np.float64).ravel()
    cdef Py_ssize_t n = flat.shape[0]
    cdef cnp.ndarray[double, ndim=1] kh = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] kp = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            _khat_scalar(t, flat[i], &kh[i], &kp[i])
    shape = np.shape(xi2)
    return kh.reshape(shape), kp.reshape(shape)


def abs_pow(u, double p):
    """|u|^p elementwise for real u."""
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef Py_ssize_t n = flat.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double a
    with nogil:
        if p == 2.0:
            for i in range(n):
                a = fabs(flat[i])
                out[i] = a * a
        elif p == 3.0:
            for i in range(n):
                a = fabs(flat[i])
                out[i] = a * a * a
        else:
            for i in range(n):
                out[i] = cpow(fabs(flat[i]), p)
    return out.reshape(np.shape(u))


def predict_combine(uhat, vhat, nlhat, kh, kp, xi2, double half_dt):
    """Fused linear propagation plus trapezoid source; see numpy backend docstring."""
    cdef cnp.ndarray[complex, ndim=1] u = np.ascontiguousarray(uhat, dtype=np.complex128).ravel()
    cdef cnp.ndarray[complex, ndim=1] v = np.ascontiguousarray(vhat, dtype=np.complex128).ravel()
    cdef cnp.ndarray[complex, ndim=1] nl = np.ascontiguousarray(nlhat, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] h = np.ascontiguousarray(kh, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] hp = np.ascontiguousarray(kp, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] x2 = np.ascontiguousarray(xi2, dtype=np.float64).ravel()
    cdef Py_ssize_t n = u.shape[0]
    cdef cnp.ndarray[complex, ndim=1] unew = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[complex, ndim=1] pv = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            unew[i] = hp[i] * u[i] + h[i] * (u[i] + v[i]) + (half_dt * h[i]) * nl[i]
            pv[i] = hp[i] * v[i] - (x2[i] * h[i]) * u[i]
    shape = np.shape(uhat)
    return unew.reshape(shape), pv.reshape(shape)


def correct_combine(pv, nlhat_n, nlhat_p, kp, double half_dt):
    """Trapezoid source update for the velocity component."""
    cdef cnp.ndarray[complex, ndim=1] v = np.ascontiguousarray(pv, dtype=np.complex128).ravel()
    cdef cnp.ndarray[complex, ndim=1] a = np.ascontiguousarray(nlhat_n, dtype=np.complex128).ravel()
    cdef cnp.ndarray[complex, ndim=1] b = np.ascontiguousarray(nlhat_p, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] hp = np.ascontiguousarray(kp, dtype=np.float64).ravel()
    cdef Py_ssize_t n = v.shape[0]
    cdef cnp.ndarray[complex, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = v[i] + half_dt * (hp[i] * a[i] + b[i])
    return out.reshape(np.shape(pv))
