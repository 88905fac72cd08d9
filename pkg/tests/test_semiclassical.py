import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rotwall import (
    PulseTrainSpec,
    bloch_potential,
    compare_quantum_semiclassical,
    evolve_pure,
    get_molecule,
    integrate_bloch,
    turning_point,
)
from rotwall.errors import DegenerateConfigurationError, HamiltonianDriftError, ParameterMismatchError
from rotwall.semiclassical import bloch_force, bloch_hamiltonian, oscillation_period

N2 = get_molecule("N2")
DB = N2.D_over_B


@pytest.fixture(scope="module")
def n2_traj():
    return integrate_bloch(3.0, DB, n_max=64)


def test_potential_examples():
    assert bloch_potential(0.0, DB) == 0.0
    assert bloch_potential(1.0, 1.0) == pytest.approx(-4 * math.pi, abs=1e-14)
    assert bloch_potential(19.7, 2.90e-6) == pytest.approx(-1.5, abs=0.02)


def test_force_is_minus_gradient():
    J = np.linspace(0, 60, 13)
    h = 1e-5
    num = -(bloch_potential(J + h, DB, 0.03) - bloch_potential(J - h, DB, 0.03)) / (2 * h)
    np.testing.assert_allclose(bloch_force(J, DB, 0.03), num, rtol=1e-7, atol=1e-9)


def test_p_zero_no_motion():
    tr = integrate_bloch(0.0, DB, J0=7.0, n_max=5)
    assert np.all(tr.J == 7.0)


def test_ballistic_without_distortion():
    tr = integrate_bloch(3.0, 0.0, n_max=10, record_every=100)
    np.testing.assert_allclose(tr.k, math.pi / 4, atol=1e-15)
    np.testing.assert_allclose(tr.J, 3.0 * tr.n, rtol=1e-12, atol=1e-12)


def test_hamiltonian_conserved(n2_traj):
    assert n2_traj.relative_drift < 1e-8
    assert n2_traj.hamiltonian == pytest.approx(0.0, abs=1e-15)
    assert np.all((n2_traj.k >= 0) & (n2_traj.k < math.pi))


def test_large_step_raises():
    with pytest.raises(HamiltonianDriftError):
        integrate_bloch(3.0, DB, n_max=32, step=0.5)


def test_bloch_oscillation_n2(n2_traj):
    first = n2_traj.n < 16
    imax = int(np.argmax(n2_traj.J[first]))
    assert n2_traj.J[imax] == pytest.approx(19.65, abs=0.01)
    assert n2_traj.n[imax] == pytest.approx(7.65, abs=0.01)
    # J(n) continues through negative J; |J| repeats every half period
    assert oscillation_period(n2_traj) / 2 == pytest.approx(16, abs=1)


def test_period_stable_under_step_halving(n2_traj):
    fine = integrate_bloch(3.0, DB, n_max=64, step=5e-4)
    assert oscillation_period(fine) == pytest.approx(oscillation_period(n2_traj), rel=1e-3)


@settings(max_examples=15, deadline=None)
@given(k0=st.floats(0, math.pi), J0=st.floats(0, 25))
def test_brillouin_zone_periodicity(k0, J0):
    a = integrate_bloch(3.0, DB, k0=k0, J0=J0, n_max=4, record_every=50)
    b = integrate_bloch(3.0, DB, k0=k0 + math.pi, J0=J0, n_max=4, record_every=50)
    np.testing.assert_allclose(a.J, b.J, atol=1e-9)
    d = np.abs(a.k - b.k)
    assert np.all(np.minimum(d, math.pi - d) < 1e-9)


def test_time_reversal():
    # flipping k reverses the flow: run forward, flip, run again, land on the flipped start
    fwd = integrate_bloch(3.0, DB, k0=0.4, J0=5.0, n_max=2.0)
    back = integrate_bloch(3.0, DB, k0=-fwd.k[-1], J0=fwd.J[-1], n_max=2.0)
    assert back.J[-1] == pytest.approx(5.0, abs=1e-9)
    assert np.mod(-back.k[-1], math.pi) == pytest.approx(0.4, abs=1e-9)
    # the velocity P sin 2k is odd in k
    step_p = integrate_bloch(3.0, DB, k0=0.4, J0=5.0, n_max=1e-3, step=1e-3)
    step_m = integrate_bloch(3.0, DB, k0=-0.4, J0=5.0, n_max=1e-3, step=1e-3)
    assert step_p.J[1] - 5.0 == pytest.approx(-(step_m.J[1] - 5.0), rel=1e-4)


def test_turning_point_matches_closed_form():
    jr = turning_point(3.0, DB)
    assert jr == pytest.approx(oracles.turning_point_closed_form(3.0, DB), abs=1e-10)
    assert jr == pytest.approx(19.7, abs=0.06)
    assert jr * (jr + 1) == pytest.approx(math.sqrt(3.0 / (2 * math.pi * DB)), rel=1e-10)


def test_turning_point_matches_integrated_extremum(n2_traj):
    assert n2_traj.J.max() == pytest.approx(turning_point(3.0, DB), abs=1e-6)


@pytest.mark.parametrize("k0,J0", [(0.3, 4.0), (1.0, 10.0), (math.pi / 4, 15.0)])
def test_turning_point_general_start(k0, J0):
    H0 = float(bloch_hamiltonian(k0, J0, 3.0, DB))
    jr = turning_point(3.0, DB, k0, J0)
    assert jr == pytest.approx(oracles.turning_point_closed_form(3.0, DB, H0), abs=1e-9)


def test_turning_point_scaling_and_limit():
    a, b = turning_point(3.0, DB), turning_point(3.0, 2 * DB)
    assert b * (b + 1) / (a * (a + 1)) == pytest.approx(2 ** -0.5, rel=1e-9)
    assert turning_point(1e-12, DB) < 1e-2


def test_turning_point_errors():
    with pytest.raises(DegenerateConfigurationError):
        turning_point(0.0, DB)
    with pytest.raises(DegenerateConfigurationError):
        turning_point(3.0, 0.0)


def test_detuning_adds_linear_potential():
    # a positive detuning raises U(J) like +pi delta J(J+1) at small J
    assert bloch_potential(3.0, 0.0, 0.01) == pytest.approx(math.pi * 0.01 * 12)
    tr = integrate_bloch(3.0, DB, n_max=20, delta=0.01)
    assert tr.relative_drift < 1e-8
    assert tr.J.max() < integrate_bloch(3.0, DB, n_max=20).J.max()


def test_compare_p_zero_is_exact():
    q = evolve_pure(N2, PulseTrainSpec(0.0, 5), 0)
    tr = integrate_bloch(0.0, DB, n_max=5)
    rep = compare_quantum_semiclassical(q, tr)
    assert rep.rms_deviation == 0.0 and rep.n_compared == 6


def test_compare_rigid_ballistic():
    from rotwall import MoleculeParams

    rigid = MoleculeParams("rigid", B=N2.B, D=0.0)
    q = evolve_pure(rigid, PulseTrainSpec(3.0, 12), 0, j_max=160)
    tr = integrate_bloch(3.0, 0.0, n_max=12)
    rep = compare_quantum_semiclassical(q, tr)
    assert rep.n_compared == 13
    # the quantum state is spread evenly over k, so its rate is the k-average of |P sin 2k|
    k0 = (np.arange(400) + 0.5) * math.pi / 400
    sc = np.mean([abs(integrate_bloch(3.0, 0.0, k0=k, n_max=12, step=0.01).J[-1]) for k in k0]) / 12
    assert sc == pytest.approx(2 * 3.0 / math.pi, rel=1e-4)
    slope_q = np.polyfit(np.arange(4, 13), q.mean_j[4:], 1)[0]
    assert slope_q == pytest.approx(sc, rel=0.05)
    # the k0 = pi/4 orbit is the fastest one
    assert tr.J[-1] == pytest.approx(36.0) and q.mean_j[-1] < tr.J[-1]


def test_compare_rejects_mismatch(n2_traj):
    q = evolve_pure(N2, PulseTrainSpec(2.0, 3), 0)
    with pytest.raises(ParameterMismatchError):
        compare_quantum_semiclassical(q, n2_traj)


def test_compare_n2_report(n2_traj):
    q = evolve_pure(N2, PulseTrainSpec(3.0, 32), 0)
    rep = compare_quantum_semiclassical(q, n2_traj)
    assert rep.n_compared == 33
    assert rep.semiclassical_first_peak == pytest.approx(7.65, abs=0.01)
    assert rep.quantum_first_peak in (8, 9, 10)
