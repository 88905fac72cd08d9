"""Reference (numpy / pure Python) implementations of the hot kernels.

Signatures match :mod:`rotwall._ckernels` exactly; the selection happens in
:mod:`rotwall._kernels`.
"""
import math

import numpy as np


def observables(psi, weights, J, E, diag, off):
    """Weighted populations and expectation values over the columns of ``psi``.

    Returns ``(p, mean_j, mean_energy, alignment)`` as weighted sums; the
    caller divides by the total weight.
    """
    pops = psi.real ** 2 + psi.imag ** 2
    p = pops @ weights
    cross = (psi[2:].conj() * psi[:-2]).real
    align_cols = diag @ pops + 2.0 * (off @ cross)
    return p, float(J @ p), float(E @ p), float(align_cols @ weights)


def alignment_trace(psi, weights, E, diag, off, times):
    """<cos^2 theta> after free evolution for each time in ``times`` (units of t_rev)."""
    pops = psi.real ** 2 + psi.imag ** 2
    static = float((diag @ pops) @ weights)
    cross = (psi[2:].conj() * psi[:-2]) @ weights
    coeff = off * cross
    dE = E[2:] - E[:-2]
    out = np.empty(len(times))
    for i, t in enumerate(times):
        out[i] = static + 2.0 * float(np.real(coeff @ np.exp(1j * math.pi * dE * t)))
    return out


def _rhs(k, J, P, dB, delta):
    force = -math.pi * delta * (2.0 * J + 1.0) + 2.0 * math.pi * (1.0 + delta) * dB * J * (J + 1.0) * (2.0 * J + 1.0)
    return force, P * math.sin(2.0 * k)


def rk4_bloch(P, dB, delta, k0, J0, step, n_steps, record_every):
    """Classical RK4 for dk/dn = -U'(J), dJ/dn = P sin 2k.

    Returns arrays ``(n, k, J)`` sampled every ``record_every`` steps,
    including both end points.
    """
    n_rec = n_steps // record_every + 1
    if n_steps % record_every:
        n_rec += 1
    ns = np.empty(n_rec)
    ks = np.empty(n_rec)
    Js = np.empty(n_rec)
    k, J = float(k0), float(J0)
    ns[0], ks[0], Js[0] = 0.0, k, J
    r = 1
    h = float(step)
    for i in range(1, n_steps + 1):
        a1, b1 = _rhs(k, J, P, dB, delta)
        a2, b2 = _rhs(k + 0.5 * h * a1, J + 0.5 * h * b1, P, dB, delta)
        a3, b3 = _rhs(k + 0.5 * h * a2, J + 0.5 * h * b2, P, dB, delta)
        a4, b4 = _rhs(k + h * a3, J + h * b3, P, dB, delta)
        k += h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
        J += h * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0
        if i % record_every == 0 or i == n_steps:
            ns[r], ks[r], Js[r] = i * h, k, J
            r += 1
    return ns, ks, Js
