"""Quasienergy (Floquet) analysis of the resonantly kicked rotor."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .errors import NoWallError, NumericalQualityError, UnitarityError
from .molecules import MoleculeParams, PulseTrainSpec
from .rotor import basis_J, free_propagator_phases, kick_operator, unitarity_error

UNITARY_TOLERANCE = 1e-10
EIGENVALUE_MODULUS_TOLERANCE = 1e-8
SINGULAR_TOLERANCE = 1e-8

# exponential-tail fit settings for the localization length
TAIL_FLOOR = 1e-28
TAIL_MIN_POINTS = 3
TAIL_MAX_RESIDUAL = 3.0  # rms residual of ln|v|^2, nepers; Anderson tails fluctuate strongly

PR_LOC_THRESHOLD = 3.0
EXTENDED_FRACTION = 0.25

EXTENDED, TRANSITION, LOCALIZED = "extended", "transition", "localized"


@dataclass(frozen=True)
class FloquetSpectrum:
    """Quasienergies in units hbar/t_rev on [0, 2 pi / tau) plus per-state metrics."""

    M: int
    j_max: int
    quasienergies: np.ndarray
    eigenvectors: np.ndarray
    participation_ratios: np.ndarray
    localization_lengths: np.ndarray  # nan where undefined
    tau_over_trev: float = 1.0

    @property
    def J(self) -> np.ndarray:
        return basis_J(self.M, self.j_max)

    @property
    def peak_J(self) -> np.ndarray:
        return self.J[np.argmax(np.abs(self.eigenvectors), axis=0)]

    def __len__(self):
        return len(self.quasienergies)


@dataclass(frozen=True)
class WallEstimate:
    j_anderson: float
    j_anderson_rounded: int


def one_cycle_operator(params: MoleculeParams, train: PulseTrainSpec, M: int, j_max: int) -> np.ndarray:
    """U_free(tau) @ U_kick(P) on the M block."""
    phases = free_propagator_phases(params, train.tau_over_trev, M, j_max)
    return phases[:, None] * kick_operator(train.P, M, j_max)


def _parity_blocks(U: np.ndarray):
    """Index sets of the decoupled even/odd-J chains, or the whole space if U mixes them."""
    n = U.shape[0]
    even, odd = np.arange(0, n, 2), np.arange(1, n, 2)
    if n > 1 and np.max(np.abs(U[np.ix_(even, odd)])) == 0 and np.max(np.abs(U[np.ix_(odd, even)])) == 0:
        return [even, odd]
    return [np.arange(n)]


def participation_ratio(vectors: np.ndarray) -> np.ndarray:
    p = np.abs(vectors) ** 2
    return 1.0 / np.sum(p * p, axis=0)


def localization_length(vector: np.ndarray) -> float:
    """Decay length xi of |v_J|^2 ~ exp(-(J - J_peak)/xi) above the peak.

    Only sites of the peak's parity are used.  Returns nan when the tail has
    too few resolvable points or the log-linear fit is poor.
    """
    p = np.abs(vector) ** 2
    peak = int(np.argmax(p))
    idx = np.arange(peak, len(p), 2)
    tail = p[idx]
    keep = tail > TAIL_FLOOR
    # stop at the first unresolved site so the roundoff floor does not bias the slope
    if not keep.all():
        keep[np.argmin(keep):] = False
    x, y = idx[keep].astype(float), np.log(tail[keep])
    if len(x) < TAIL_MIN_POINTS:
        return math.nan
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    if slope > -1e-10 or math.sqrt(np.mean(resid ** 2)) > TAIL_MAX_RESIDUAL:
        return math.nan
    return -1.0 / slope


def floquet_spectrum(U: np.ndarray, M: int, tau_over_trev: float = 1.0) -> FloquetSpectrum:
    """Diagonalize a one-cycle operator.

    A complex Schur factorization is used per parity chain: for a normal
    matrix the triangular factor is diagonal and the Schur vectors form an
    orthonormal eigenbasis even inside degenerate subspaces.
    """
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    err = unitarity_error(U)
    if err > UNITARY_TOLERANCE:
        raise UnitarityError(f"one-cycle operator is not unitary (max |U^H U - I| = {err:.3g})")

    lam = np.empty(n, dtype=complex)
    vecs = np.zeros((n, n), dtype=complex)
    col = 0
    for idx in _parity_blocks(U):
        T, Z = schur(U[np.ix_(idx, idx)], output="complex")
        off = np.max(np.abs(np.triu(T, 1))) if len(idx) > 1 else 0.0
        if off > EIGENVALUE_MODULUS_TOLERANCE:
            raise NumericalQualityError(f"Schur form not diagonal (max off-diagonal {off:.3g}); operator not normal")
        m = len(idx)
        lam[col:col + m] = np.diag(T)
        vecs[idx, col:col + m] = Z
        col += m

    dev = np.max(np.abs(np.abs(lam) - 1.0))
    if dev > EIGENVALUE_MODULUS_TOLERANCE:
        raise NumericalQualityError(f"eigenvalue modulus deviates from 1 by {dev:.3g}")

    # fix the global phase: largest-magnitude component real and positive
    peaks = np.argmax(np.abs(vecs), axis=0)
    ph = vecs[peaks, np.arange(n)]
    vecs = vecs * (np.abs(ph) / ph)[None, :]

    eps = np.mod(-np.angle(lam), 2.0 * math.pi)
    eps[eps >= 2.0 * math.pi] = 0.0
    eps = eps / tau_over_trev

    J = basis_J(M, abs(M) + n - 1)
    order = np.lexsort((J[peaks], eps))
    vecs = vecs[:, order]
    eps = eps[order]

    pr = participation_ratio(vecs)
    xi = np.array([localization_length(vecs[:, i]) for i in range(n)])
    for arr in (eps, vecs, pr, xi):
        arr.flags.writeable = False
    return FloquetSpectrum(M, abs(M) + n - 1, eps, vecs, pr, xi, tau_over_trev)


def eigen_residuals(U: np.ndarray, spectrum: FloquetSpectrum) -> np.ndarray:
    """||U v - lambda v|| per state, lambda = exp(-i eps tau)."""
    lam = np.exp(-1j * spectrum.quasienergies * spectrum.tau_over_trev)
    V = spectrum.eigenvectors
    return np.linalg.norm(U @ V - V * lam[None, :], axis=0)


def site_phase(params: MoleculeParams, epsilon: float, J: int, tau_over_trev: float = 1.0) -> float:
    """Unreduced half-cycle phase tau (epsilon - E_J) / 2 in radians.

    ``epsilon`` is in units of B.
    """
    a = J * (J + 1.0)
    return 0.5 * math.pi * tau_over_trev * (epsilon - a + params.D_over_B * a * a)


def tightbinding_site_energy(params: MoleculeParams, epsilon: float, J: int, tau_over_trev: float = 1.0) -> float:
    """tan(tau (epsilon - E_J) / 2) for the equivalent tight-binding chain.

    ``epsilon`` is in units of B (a quasienergy q in units hbar/t_rev is
    q / pi).  A pole of the tangent is reported as a signed infinity: +inf
    when approached from below, -inf otherwise.
    """
    if J < 0:
        raise ValueError("J must be >= 0")
    a = J * (J + 1.0)
    # phase in units of pi, reduced to [0, 1); the rigid part is integral at resonance
    x = 0.5 * tau_over_trev * (epsilon - a + params.D_over_B * a * a)
    r = x - math.floor(x)
    if abs(r - 0.5) * math.pi < SINGULAR_TOLERANCE:
        return math.inf if r <= 0.5 else -math.inf
    return math.tan(math.pi * r)


def anderson_wall(params: MoleculeParams) -> WallEstimate:
    """J_A = (B/D)^(1/3) / 2, plus its rounding to the nearest multiple of 5."""
    if params.D <= 0:
        raise NoWallError(f"{params.name}: D = 0 (rigid rotor), no Anderson wall")
    ja = 0.5 * (params.B / params.D) ** (1.0 / 3.0)
    return WallEstimate(ja, int(5 * round(ja / 5.0)))


def classify_states(
    spectrum: FloquetSpectrum,
    wall: WallEstimate | None,
    pr_loc_threshold: float = PR_LOC_THRESHOLD,
    extended_fraction: float = EXTENDED_FRACTION,
) -> list[str]:
    """Label each state extended / transition / localized.

    localized: peak at or beyond the wall with PR below ``pr_loc_threshold``,
    or a single-site state (PR = 1) anywhere.  extended: peak below the wall
    with PR above ``extended_fraction`` times the number of same-parity sites
    below the wall.  Everything else is transition.  ``wall=None`` puts the
    wall at infinity.
    """
    ja = math.inf if wall is None else wall.j_anderson
    m = abs(spectrum.M)
    peaks = spectrum.peak_J
    labels = []
    for pk, pr in zip(peaks, spectrum.participation_ratios):
        if (pk >= ja and pr < pr_loc_threshold) or abs(pr - 1.0) < 1e-9:
            labels.append(LOCALIZED)
            continue
        top = min(ja, spectrum.j_max + 1)
        sites = len(range(m + (pk - m) % 2, int(math.ceil(top)), 2))
        if pk < ja and pr > extended_fraction * sites:
            labels.append(EXTENDED)
        else:
            labels.append(TRANSITION)
    return labels


def localized_onset(spectrum: FloquetSpectrum, pr_loc_threshold: float = PR_LOC_THRESHOLD) -> int:
    """Smallest J such that every state peaked at or above it has PR < threshold.

    States peaked inside the top 10% of the basis are ignored as truncation
    artifacts.
    """
    n = spectrum.j_max - abs(spectrum.M) + 1
    edge = spectrum.j_max - math.ceil(0.1 * n)
    peaks = spectrum.peak_J
    keep = peaks <= edge
    bad = peaks[keep & (spectrum.participation_ratios >= pr_loc_threshold)]
    return int(bad.max() + 1) if len(bad) else int(peaks[keep].min())


def extended_cutoff(spectrum: FloquetSpectrum, labels: list[str], support_floor: float = 1e-3) -> int | None:
    """J_R: largest J where the summed extended-state probability exceeds ``support_floor``."""
    sel = np.array([lab == EXTENDED for lab in labels])
    if not sel.any():
        return None
    support = np.sum(np.abs(spectrum.eigenvectors[:, sel]) ** 2, axis=1)
    J = spectrum.J[support > support_floor]
    return int(J.max()) if len(J) else None
