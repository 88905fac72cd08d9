"""Semiclassical Bloch-oscillation model on the J lattice.

H(k, J) = -(P/2) cos 2k + U(J) with the centrifugal "potential"
U(J) = -pi (D/B) J^2 (J+1)^2, so that

    dk/dn = -dU/dJ,    dJ/dn = P sin 2k,

with n the (continuous) pulse count.  A detuned train adds
pi delta J(J+1) to U and scales the distortion term by (1 + delta); both
follow from the one-cycle free phase reduced modulo 2 pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import DegenerateConfigurationError, HamiltonianDriftError, ParameterMismatchError

H_DRIFT_TOLERANCE = 1e-8
DEFAULT_STEP = 1e-3
DEFAULT_K0 = math.pi / 4


def bloch_potential(J, D_over_B: float, delta: float = 0.0):
    J = np.asarray(J, dtype=float)
    a = J * (J + 1.0)
    out = math.pi * delta * a - math.pi * (1.0 + delta) * D_over_B * a * a
    return float(out) if out.ndim == 0 else out


def bloch_force(J, D_over_B: float, delta: float = 0.0):
    """-dU/dJ."""
    J = np.asarray(J, dtype=float)
    out = -math.pi * delta * (2.0 * J + 1.0) + 2.0 * math.pi * (1.0 + delta) * D_over_B * J * (J + 1.0) * (2.0 * J + 1.0)
    return float(out) if out.ndim == 0 else out


def bloch_hamiltonian(k, J, P: float, D_over_B: float, delta: float = 0.0):
    return -0.5 * P * np.cos(2.0 * np.asarray(k)) + bloch_potential(J, D_over_B, delta)


@dataclass(frozen=True)
class SemiclassicalTrajectory:
    n: np.ndarray
    k: np.ndarray  # reduced to [0, pi)
    J: np.ndarray
    hamiltonian: float
    H: np.ndarray  # H evaluated along the samples
    P: float
    D_over_B: float
    delta: float = 0.0

    @property
    def samples(self):
        return list(zip(self.n, self.k, self.J))

    @property
    def relative_drift(self) -> float:
        return _relative_drift(self.H, self.hamiltonian, self.P, self.D_over_B, self.J[0], self.delta)


def _relative_drift(H, H0, P, D_over_B, J0, delta):
    scale = max(abs(H0), 0.5 * P, abs(bloch_potential(J0, D_over_B, delta)))
    if scale == 0:
        scale = 1.0
    return float(np.max(np.abs(H - H0)) / scale)


def integrate_bloch(
    P: float,
    D_over_B: float,
    k0: float = DEFAULT_K0,
    J0: float = 0.0,
    n_max: float = 32.0,
    step: float = DEFAULT_STEP,
    record_every: int = 1,
    delta: float = 0.0,
) -> SemiclassicalTrajectory:
    """Fixed-step RK4 integration with Hamiltonian-drift monitoring."""
    if P < 0:
        raise ValueError("P must be >= 0")
    if not (n_max > 0 and step > 0):
        raise ValueError("n_max and step must be > 0")
    n_steps = max(1, int(round(n_max / step)))
    n, k, J = _kernels.rk4_bloch(float(P), float(D_over_B), float(delta), float(k0), float(J0),
                                 float(n_max) / n_steps, n_steps, int(record_every))
    H0 = float(bloch_hamiltonian(k0, J0, P, D_over_B, delta))
    H = bloch_hamiltonian(k, J, P, D_over_B, delta)
    drift = _relative_drift(H, H0, P, D_over_B, J0, delta)
    if drift > H_DRIFT_TOLERANCE:
        raise HamiltonianDriftError(
            f"Hamiltonian drift {drift:.3g} exceeds {H_DRIFT_TOLERANCE:g}; reduce the step (now {step:g})"
        )
    return SemiclassicalTrajectory(n, np.mod(k, math.pi), J, H0, H, float(P), float(D_over_B), float(delta))


def turning_point(P: float, D_over_B: float, k0: float = DEFAULT_K0, J0: float = 0.0) -> float:
    """Upper reflection point J_R, where the orbit through (k0, J0) reaches cos 2k = -1.

    Solves U(J_R) = H0 - P/2 by bracketed root finding on J >= J0.
    """
    if not (P > 0 and D_over_B > 0):
        raise DegenerateConfigurationError("turning point needs P > 0 and D/B > 0")
    if J0 < 0:
        raise DegenerateConfigurationError("J0 must be >= 0")
    target = float(bloch_hamiltonian(k0, J0, P, D_over_B)) - 0.5 * P

    def f(J):
        return bloch_potential(J, D_over_B) - target

    lo = float(J0)
    if f(lo) == 0.0:
        return lo
    if f(lo) < 0:
        raise DegenerateConfigurationError("no turning point above J0")
    hi = max(1.0, 2.0 * lo)
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise DegenerateConfigurationError("turning point search diverged")
    return brentq(f, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=500)


def oscillation_period(traj: SemiclassicalTrajectory) -> float:
    """Mean spacing of successive maxima of J(n), linearly refined."""
    J = traj.J
    idx = np.nonzero((J[1:-1] > J[:-2]) & (J[1:-1] >= J[2:]))[0] + 1
    if len(idx) < 2:
        return math.nan
    # parabolic refinement of each maximum
    h = traj.n[1] - traj.n[0]
    a, b, c = J[idx - 1], J[idx], J[idx + 1]
    denom = a - 2 * b + c
    shift = np.where(denom != 0, 0.5 * (a - c) / np.where(denom != 0, denom, 1), 0.0)
    tops = traj.n[idx] + shift * h
    return float(np.mean(np.diff(tops)))


@dataclass(frozen=True)
class ComparisonReport:
    rms_deviation: float
    quantum_first_peak: int | None
    semiclassical_first_peak: float | None
    first_peak_offset: float | None
    n_compared: int


def _first_local_max(y):
    for i in range(1, len(y) - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1]:
            return i
    return None


def compare_quantum_semiclassical(quantum, trajectory: SemiclassicalTrajectory, rtol: float = 1e-9) -> ComparisonReport:
    """RMS deviation of quantum <J>(n) from |J(n)| at integer n, and first-peak offset.

    ``quantum`` is an :class:`~rotwall.dynamics.Evolution`; its molecule and
    train must match the trajectory's P and D/B.
    """
    P_q = quantum.train.P
    dB_q = quantum.params.D_over_B
    if not (math.isclose(P_q, trajectory.P, rel_tol=rtol, abs_tol=1e-15)
            and math.isclose(dB_q, trajectory.D_over_B, rel_tol=rtol, abs_tol=1e-18)
            and math.isclose(quantum.train.delta, trajectory.delta, abs_tol=1e-15)):
        raise ParameterMismatchError(
            f"quantum run (P={P_q}, D/B={dB_q}) and trajectory (P={trajectory.P}, D/B={trajectory.D_over_B}) differ"
        )
    mean_j = quantum.mean_j
    n_q = np.arange(len(mean_j))
    n_q = n_q[n_q <= trajectory.n[-1] + 1e-9]
    J_sc = np.abs(np.interp(n_q, trajectory.n, trajectory.J))
    rms = float(np.sqrt(np.mean((mean_j[: len(n_q)] - J_sc) ** 2)))

    iq = _first_local_max(mean_j)
    Jabs = np.abs(trajectory.J)
    isc = _first_local_max(Jabs)
    n_sc = float(trajectory.n[isc]) if isc is not None else None
    offset = abs(iq - n_sc) if (iq is not None and n_sc is not None) else None
    return ComparisonReport(rms, iq, n_sc, offset, len(n_q))
