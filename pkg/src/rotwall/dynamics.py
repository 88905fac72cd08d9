"""Pulse-train propagation of pure states and thermal ensembles.

Pulses arrive at t = 0, tau, ..., (N-1) tau.  Record n holds the observables
immediately after pulse n; record 0 is the state before the train.
"""
from __future__ import annotations

import math
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, TruncationLeakError
from .molecules import MoleculeParams, PulseTrainSpec
from .rotor import (
    LEAK_FRACTION,
    LEAK_TOLERANCE,
    RotorBlockState,
    auto_j_max,
    basis_J,
    cos2_matrix,
    energy_level,
    free_propagator_phases,
    kick_apply,
    leak_probability,
)


@dataclass(frozen=True)
class EvolutionRecord:
    pulse_index: int
    j_distribution: np.ndarray  # p(J) for J = 0 .. j_max
    mean_j: float
    mean_energy: float  # units of B
    alignment: float


@dataclass(frozen=True)
class ThermalEnsembleSpec:
    temperature: float
    population_cutoff: float = 0.999

    def __post_init__(self):
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be > 0 K, got {self.temperature}")
        if not 0.9 < self.population_cutoff < 1.0:
            raise ConfigError(f"population_cutoff must lie in (0.9, 1), got {self.population_cutoff}")


class Evolution(Sequence):
    """Per-pulse records of one run together with the inputs that produced them."""

    def __init__(self, records, params, train, j_max, initial):
        self.records = tuple(records)
        self.params = params
        self.train = train
        self.j_max = j_max
        self.initial = initial

    def __getitem__(self, i):
        return self.records[i]

    def __len__(self):
        return len(self.records)

    @property
    def mean_j(self) -> np.ndarray:
        return np.array([r.mean_j for r in self.records])

    @property
    def alignment(self) -> np.ndarray:
        return np.array([r.alignment for r in self.records])

    @property
    def mean_energy(self) -> np.ndarray:
        return np.array([r.mean_energy for r in self.records])

    @property
    def distributions(self) -> np.ndarray:
        return np.array([r.j_distribution for r in self.records])


def _default_workers():
    return min(8, os.cpu_count() or 1)


def _propagate_block(params, train, M, j_max, J0s, weights):
    """Evolve the basis states |J0, M> (columns) through the train.

    Returns weighted sums per record: populations (N+1, j_max+1) and the
    arrays of <J>, <E>, <cos^2>.
    """
    m = abs(M)
    J = basis_J(M, j_max).astype(float)
    E = energy_level(basis_J(M, j_max), params)
    c2 = cos2_matrix(M, j_max)
    phases = free_propagator_phases(params, train.tau_over_trev, M, j_max)
    weights = np.ascontiguousarray(weights, dtype=float)

    psi = np.zeros((len(J), len(J0s)), dtype=complex)
    psi[np.asarray(J0s) - m, np.arange(len(J0s))] = 1.0

    n_rec = train.N + 1
    pops = np.zeros((n_rec, j_max + 1))
    sums = np.zeros((n_rec, 3))

    def record(n):
        p, mj, en, al = _kernels.observables(np.ascontiguousarray(psi), weights, J, E, c2.diag, c2.offdiag2)
        pops[n, m:] = p
        sums[n] = (mj, en, al)

    record(0)
    for n in range(1, n_rec):
        psi = kick_apply(train.P, M, j_max, psi)
        leak = leak_probability(np.abs(psi) ** 2)
        if np.any(leak > LEAK_TOLERANCE):
            bad = int(np.argmax(leak))
            raise TruncationLeakError(
                f"pulse {n}: probability {leak[bad]:.3g} in the top {LEAK_FRACTION:.0%} of the basis "
                f"for initial state (J0={J0s[bad]}, M0={M}), j_max={j_max}; increase j_max",
                pulse_index=n,
                initial=(int(J0s[bad]), M),
            )
        record(n)
        psi *= phases[:, None]
    return pops, sums


def _records(pops, sums, total_weight):
    return [
        EvolutionRecord(n, pops[n] / total_weight, *(sums[n] / total_weight))
        for n in range(len(pops))
    ]


def evolve_pure(params: MoleculeParams, train: PulseTrainSpec, J0: int, M0: int = 0, j_max: int | None = None) -> Evolution:
    if j_max is None:
        j_max = auto_j_max(params, train, J0)
    if not abs(M0) <= J0 <= j_max / 2:
        raise ConfigError(f"need |M0| <= J0 <= j_max/2, got J0={J0}, M0={M0}, j_max={j_max}")
    pops, sums = _propagate_block(params, train, M0, j_max, [J0], [1.0])
    return Evolution(_records(pops, sums, 1.0), params, train, j_max, (J0, M0))


def thermal_levels(params: MoleculeParams, ensemble: ThermalEnsembleSpec):
    """Retained initial levels J0 and their per-M-state Boltzmann weights.

    Levels are taken in increasing J until the cumulative weight (including
    2J+1 degeneracy and spin statistics) reaches the population cutoff.
    Weights are renormalized over the retained set.
    """
    kT = params.reduced_temperature(ensemble.temperature)
    J = np.arange(0, 4096)
    E = energy_level(J, params)
    rising = np.nonzero(np.diff(E) <= 0)[0]
    if len(rising):
        J, E = J[: rising[0] + 1], E[: rising[0] + 1]
    g = np.where(J % 2 == 0, params.g_even, params.g_odd)
    populated = g > 0
    E_ref = E[populated].min()
    w = g * np.exp(-(E - E_ref) / kT)
    level = w * (2 * J + 1)
    cum = np.cumsum(level) / level.sum()
    j_cut = int(np.searchsorted(cum, ensemble.population_cutoff))
    keep = slice(0, j_cut + 1)
    J, w, level = J[keep], w[keep], level[keep]
    return J[w > 0], w[w > 0] / level.sum()


def _thermal_branches(params, ensemble):
    J0s, w = thermal_levels(params, ensemble)
    branches = []
    for M in range(0, int(J0s.max()) + 1):
        sel = J0s >= M
        if not sel.any():
            continue
        factor = 1.0 if M == 0 else 2.0  # +-M blocks are identical
        branches.append((M, J0s[sel], factor * w[sel]))
    return J0s, branches


def evolve_thermal(
    params: MoleculeParams,
    train: PulseTrainSpec,
    ensemble: ThermalEnsembleSpec,
    j_max: int | None = None,
    workers: int | None = None,
) -> Evolution:
    J0s, branches = _thermal_branches(params, ensemble)
    if j_max is None:
        j_max = auto_j_max(params, train, int(J0s.max()))

    def run(branch):
        M, js, ws = branch
        return _propagate_block(params, train, M, j_max, js, ws)

    with ThreadPoolExecutor(max_workers=workers or _default_workers()) as pool:
        results = list(pool.map(run, branches))

    pops = np.zeros((train.N + 1, j_max + 1))
    sums = np.zeros((train.N + 1, 3))
    for p, s in results:
        pops += p
        sums += s
    total = sum(float(b[2].sum()) for b in branches)
    return Evolution(_records(pops, sums, total), params, train, j_max, ensemble)


def alignment_expectation(state: RotorBlockState) -> float:
    c2 = cos2_matrix(state.M, state.j_max)
    amps = state.amplitudes
    return float(np.real(np.vdot(amps, c2.matvec(amps))))


def rotational_energy(obj, params: MoleculeParams) -> float:
    """<E> in units of B for a :class:`RotorBlockState` or an :class:`EvolutionRecord`."""
    if isinstance(obj, RotorBlockState):
        return float(obj.populations @ energy_level(obj.J, params))
    p = np.asarray(obj.j_distribution)
    return float(p @ energy_level(np.arange(len(p)), params))


def sample_alignment_trace(
    params: MoleculeParams,
    train: PulseTrainSpec,
    initial,
    samples_per_period: int,
    j_max: int | None = None,
    extra_periods: int = 0,
    workers: int | None = None,
):
    """<cos^2 theta>(t) sampled on a uniform grid of ``samples_per_period`` points per period.

    ``initial`` is a ``(J0, M0)`` pair or a :class:`ThermalEnsembleSpec`.
    Sampling covers N + ``extra_periods`` periods starting right after the
    first pulse, plus the end point.  Returns ``(t, alignment)`` with t in
    units of t_rev.
    """
    if samples_per_period < 1:
        raise ConfigError("samples_per_period must be >= 1")
    if isinstance(initial, ThermalEnsembleSpec):
        J0s, branches = _thermal_branches(params, initial)
        j_top = int(J0s.max())
    else:
        J0, M0 = initial
        branches = [(M0, np.array([J0]), np.array([1.0]))]
        j_top = J0
    if j_max is None:
        j_max = auto_j_max(params, train, j_top)

    tau = train.tau_over_trev
    n_periods = train.N + extra_periods
    offsets = np.arange(samples_per_period) * tau / samples_per_period

    def run(branch):
        M, js, ws = branch
        m = abs(M)
        E = energy_level(basis_J(M, j_max), params)
        c2 = cos2_matrix(M, j_max)
        phases = free_propagator_phases(params, tau, M, j_max)
        ws = np.ascontiguousarray(ws, dtype=float)
        psi = np.zeros((j_max - m + 1, len(js)), dtype=complex)
        psi[js - m, np.arange(len(js))] = 1.0
        out = []
        for c in range(n_periods):
            if c < train.N:
                psi = kick_apply(train.P, M, j_max, psi)
            out.append(_kernels.alignment_trace(np.ascontiguousarray(psi), ws, E, c2.diag, c2.offdiag2, offsets))
            psi = psi * phases[:, None]
        out.append(_kernels.alignment_trace(np.ascontiguousarray(psi), ws, E, c2.diag, c2.offdiag2, np.zeros(1)))
        return np.concatenate(out)

    with ThreadPoolExecutor(max_workers=workers or _default_workers()) as pool:
        traces = list(pool.map(run, branches))
    total = sum(float(b[2].sum()) for b in branches)
    signal = np.sum(traces, axis=0) / total
    t = np.concatenate([c * tau + offsets for c in range(n_periods)] + [np.array([n_periods * tau])])
    return t, signal


def dominant_period(series: np.ndarray) -> float:
    """Period (in samples) of the strongest non-DC component of a real series."""
    x = np.asarray(series, dtype=float)
    spec = np.abs(np.fft.rfft(x - x.mean()))
    spec[0] = 0.0
    k = int(np.argmax(spec))
    if k == 0:
        return math.inf
    return len(x) / k
