# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see rotwall._pykernels for the reference versions."""
import numpy as np
from libc.math cimport sin, cos, M_PI


cdef extern from "complex.h" nogil:
    double creal(double complex)
    double cimag(double complex)


def observables(const double complex[:, ::1] psi, const double[::1] weights,
                const double[::1] J, const double[::1] E,
                const double[::1] diag, const double[::1] off):
    cdef Py_ssize_t n = psi.shape[0], m = psi.shape[1], i, c
    cdef double[::1] p = np.zeros(n)
    cdef double mean_j = 0.0, energy = 0.0, align = 0.0, w, re, im, acc
    cdef double complex a, b
    with nogil:
        for c in range(m):
            w = weights[c]
            if w == 0.0:
                continue
            acc = 0.0
            for i in range(n):
                re = creal(psi[i, c])
                im = cimag(psi[i, c])
                p[i] += w * (re * re + im * im)
                acc += diag[i] * (re * re + im * im)
            for i in range(n - 2):
                a = psi[i + 2, c]
                b = psi[i, c]
                acc += 2.0 * off[i] * (creal(a) * creal(b) + cimag(a) * cimag(b))
            align += w * acc
        for i in range(n):
            mean_j += J[i] * p[i]
            energy += E[i] * p[i]
    return np.asarray(p), mean_j, energy, align


def alignment_trace(const double complex[:, ::1] psi, const double[::1] weights,
                    const double[::1] E, const double[::1] diag, const double[::1] off,
                    const double[::1] times):
    cdef Py_ssize_t n = psi.shape[0], m = psi.shape[1], nt = times.shape[0], i, c, s
    cdef double static = 0.0, re, im, ph, total
    cdef double[::1] cre = np.zeros(max(n - 2, 0))
    cdef double[::1] cim = np.zeros(max(n - 2, 0))
    cdef double[::1] dE = np.zeros(max(n - 2, 0))
    cdef double[::1] out = np.empty(nt)
    cdef double complex a, b
    with nogil:
        for c in range(m):
            for i in range(n):
                re = creal(psi[i, c])
                im = cimag(psi[i, c])
                static += weights[c] * diag[i] * (re * re + im * im)
            for i in range(n - 2):
                a = psi[i + 2, c]
                b = psi[i, c]
                # conj(a) * b
                cre[i] += weights[c] * off[i] * (creal(a) * creal(b) + cimag(a) * cimag(b))
                cim[i] += weights[c] * off[i] * (creal(a) * cimag(b) - cimag(a) * creal(b))
        for i in range(n - 2):
            dE[i] = E[i + 2] - E[i]
        for s in range(nt):
            total = 0.0
            for i in range(n - 2):
                ph = M_PI * dE[i] * times[s]
                total += cre[i] * cos(ph) - cim[i] * sin(ph)
            out[s] = static + 2.0 * total
    return np.asarray(out)


cdef inline void _rhs(double k, double J, double P, double dB, double delta,
                      double* dk, double* dJ) noexcept nogil:
    dk[0] = -M_PI * delta * (2.0 * J + 1.0) + 2.0 * M_PI * (1.0 + delta) * dB * J * (J + 1.0) * (2.0 * J + 1.0)
    dJ[0] = P * sin(2.0 * k)


def rk4_bloch(double P, double dB, double delta, double k0, double J0,
              double step, Py_ssize_t n_steps, Py_ssize_t record_every):
    cdef Py_ssize_t n_rec = n_steps // record_every + 1
    if n_steps % record_every:
        n_rec += 1
    cdef double[::1] ns = np.empty(n_rec)
    cdef double[::1] ks = np.empty(n_rec)
    cdef double[::1] Js = np.empty(n_rec)
    cdef double k = k0, J = J0, h = step
    cdef double a1, b1, a2, b2, a3, b3, a4, b4
    cdef Py_ssize_t i, r = 1
    ns[0] = 0.0
    ks[0] = k
    Js[0] = J
    with nogil:
        for i in range(1, n_steps + 1):
            _rhs(k, J, P, dB, delta, &a1, &b1)
            _rhs(k + 0.5 * h * a1, J + 0.5 * h * b1, P, dB, delta, &a2, &b2)
            _rhs(k + 0.5 * h * a2, J + 0.5 * h * b2, P, dB, delta, &a3, &b3)
            _rhs(k + h * a3, J + h * b3, P, dB, delta, &a4, &b4)
            k += h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
            J += h * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0
            if i % record_every == 0 or i == n_steps:
                ns[r] = i * h
                ks[r] = k
                Js[r] = J
                r += 1
    return np.asarray(ns), np.asarray(ks), np.asarray(Js)
