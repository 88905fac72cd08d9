"""Single-M-block rotor machinery.

Basis states are |J, M> with J = |M| .. j_max.  The laser interaction only
couples J to J and J +- 2, so each M block splits into an even-J and an
odd-J chain.  Restricted to one chain, cos^2(theta) is tridiagonal, which is
what the kick construction exploits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidBasisError, TruncationLeakError
from .molecules import MoleculeParams, PulseTrainSpec

LEAK_FRACTION = 0.1
LEAK_TOLERANCE = 1e-8
NORM_TOLERANCE = 1e-10


def energy_level(J, params: MoleculeParams):
    """Rotational level J(J+1) - (D/B) J^2 (J+1)^2 in units of B.

    ``J`` may be an integer or an integer array.
    """
    J = np.asarray(J)
    if np.any(J < 0):
        raise ValueError("J must be >= 0")
    a = J * (J + 1.0)
    out = a - params.D_over_B * a * a
    return float(out) if out.ndim == 0 else out


def basis_J(M: int, j_max: int) -> np.ndarray:
    return np.arange(abs(M), j_max + 1)


def _check_basis(M: int, j_max: int):
    if j_max < abs(M) + 4:
        raise InvalidBasisError(f"j_max={j_max} too small for |M|={abs(M)}; need j_max >= |M| + 4")


@dataclass(frozen=True)
class Cos2Matrix:
    """Banded representation of <J',M|cos^2(theta)|J,M>.

    ``diag[i]`` belongs to J = |M| + i, ``offdiag2[i]`` couples J = |M| + i
    and J + 2.  The J, J+1 elements vanish identically.
    """

    M: int
    j_max: int
    diag: np.ndarray
    offdiag2: np.ndarray

    @property
    def J(self) -> np.ndarray:
        return basis_J(self.M, self.j_max)

    def to_dense(self) -> np.ndarray:
        n = len(self.diag)
        out = np.diag(self.diag)
        idx = np.arange(n - 2)
        out[idx, idx + 2] = self.offdiag2
        out[idx + 2, idx] = self.offdiag2
        return out

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        """Apply to a vector or to the columns of a matrix."""
        d = self.diag if vec.ndim == 1 else self.diag[:, None]
        o = self.offdiag2 if vec.ndim == 1 else self.offdiag2[:, None]
        out = d * vec
        out[:-2] += o * vec[2:]
        out[2:] += o * vec[:-2]
        return out


@lru_cache(maxsize=256)
def _cos2_elements(m: int, j_max: int):
    J = np.arange(m, j_max + 1, dtype=float)
    m2 = float(m * m)
    diag = 1.0 / 3.0 + (2.0 / 3.0) * (J * (J + 1.0) - 3.0 * m2) / ((2.0 * J - 1.0) * (2.0 * J + 3.0))
    Jl = J[:-2]
    off = np.sqrt(((Jl + 1.0) ** 2 - m2) * ((Jl + 2.0) ** 2 - m2)) / (
        (2.0 * Jl + 3.0) * np.sqrt((2.0 * Jl + 1.0) * (2.0 * Jl + 5.0))
    )
    diag.flags.writeable = False
    off.flags.writeable = False
    return diag, off


def cos2_matrix(M: int, j_max: int) -> Cos2Matrix:
    _check_basis(M, j_max)
    diag, off = _cos2_elements(abs(M), j_max)
    return Cos2Matrix(M, j_max, diag, off)


def free_propagator_phases(params: MoleculeParams, tau_over_trev: float, M: int, j_max: int) -> np.ndarray:
    """exp(-i E_J tau) over the block, tau in units of t_rev."""
    if not tau_over_trev > 0:
        raise ValueError("tau_over_trev must be > 0")
    J = basis_J(M, j_max).astype(float)
    a = J * (J + 1.0)
    # reduce each part mod 2 separately so the resonant rigid phase is exactly 1
    rigid = np.fmod(tau_over_trev * a, 2.0)
    distortion = np.fmod(tau_over_trev * params.D_over_B * a * a, 2.0)
    return np.exp(-1j * np.pi * (rigid - distortion))


@lru_cache(maxsize=256)
def _cos2_eigensystem(m: int, j_max: int):
    """Per-parity-chain (indices, eigenvalues, eigenvectors) of cos^2(theta)."""
    diag, off = _cos2_elements(m, j_max)
    chains = []
    for start in (0, 1):
        idx = np.arange(start, len(diag), 2)
        d = diag[idx]
        e = off[idx[:-1]]
        if len(idx) == 1:
            w, v = d.copy(), np.ones((1, 1))
        else:
            w, v = eigh_tridiagonal(d, e)
        for arr in (idx, w, v):
            arr.flags.writeable = False
        chains.append((idx, w, v))
    return tuple(chains)


def kick_operator(P: float, M: int, j_max: int) -> np.ndarray:
    """Dense exp(+i P cos^2 theta) on the M block."""
    if P < 0:
        raise ValueError("P must be >= 0")
    _check_basis(M, j_max)
    n = j_max - abs(M) + 1
    if P == 0:
        return np.eye(n, dtype=complex)
    U = np.zeros((n, n), dtype=complex)
    for idx, w, v in _cos2_eigensystem(abs(M), j_max):
        U[np.ix_(idx, idx)] = (v * np.exp(1j * P * w)) @ v.T
    return U


def kick_apply(P: float, M: int, j_max: int, amplitudes: np.ndarray) -> np.ndarray:
    """exp(+i P cos^2 theta) applied to a vector or to matrix columns without forming it."""
    _check_basis(M, j_max)
    if P == 0:
        return np.array(amplitudes, dtype=complex)
    out = np.empty_like(amplitudes, dtype=complex)
    for idx, w, v in _cos2_eigensystem(abs(M), j_max):
        phase = np.exp(1j * P * w)
        coeff = v.T @ amplitudes[idx]
        coeff *= phase if amplitudes.ndim == 1 else phase[:, None]
        out[idx] = v @ coeff
    return out


def unitarity_error(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def leak_probability(populations: np.ndarray) -> np.ndarray:
    """Probability held in the top ``LEAK_FRACTION`` of the basis (per column)."""
    n = populations.shape[0]
    top = max(1, math.ceil(LEAK_FRACTION * n))
    return populations[n - top:].sum(axis=0)


def auto_j_max(params: MoleculeParams, train: PulseTrainSpec, J0: int = 0) -> int:
    """Default basis cutoff: max(2 J_A, J0 + 4 N sqrt(P), 80)."""
    candidates = [80.0, J0 + 4.0 * train.N * math.sqrt(train.P)]
    if params.D > 0:
        candidates.append(2.0 * 0.5 * params.D_over_B ** (-1.0 / 3.0))
    return int(math.ceil(max(candidates)))


@dataclass(frozen=True)
class RotorBlockState:
    M: int
    j_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_basis(self.M, self.j_max)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.j_max - abs(self.M) + 1,):
            raise InvalidBasisError(
                f"amplitude vector has shape {amps.shape}, expected ({self.j_max - abs(self.M) + 1},)"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, J: int, M: int, j_max: int) -> "RotorBlockState":
        if not abs(M) <= J <= j_max:
            raise InvalidBasisError(f"|J={J}, M={M}> is not in the basis with j_max={j_max}")
        amps = np.zeros(j_max - abs(M) + 1, dtype=complex)
        amps[J - abs(M)] = 1.0
        return cls(M, j_max, amps)

    @property
    def J(self) -> np.ndarray:
        return basis_J(self.M, self.j_max)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.populations.sum()))

    def fidelity(self, other: "RotorBlockState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def apply_kick(state: RotorBlockState, P: float) -> RotorBlockState:
    if P < 0:
        raise ValueError("P must be >= 0")
    if abs(state.norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"state is not normalized (norm={state.norm!r})")
    out = kick_apply(P, state.M, state.j_max, state.amplitudes)
    leak = float(leak_probability(np.abs(out) ** 2))
    if leak > LEAK_TOLERANCE:
        raise TruncationLeakError(
            f"kick pushed probability {leak:.3g} into the top {LEAK_FRACTION:.0%} of the basis "
            f"(j_max={state.j_max}); increase j_max"
        )
    return RotorBlockState(state.M, state.j_max, out)


def apply_free(state: RotorBlockState, params: MoleculeParams, tau_over_trev: float) -> RotorBlockState:
    phases = free_propagator_phases(params, tau_over_trev, state.M, state.j_max)
    return RotorBlockState(state.M, state.j_max, phases * state.amplitudes)
