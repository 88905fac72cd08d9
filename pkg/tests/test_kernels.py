"""Compiled and pure-Python kernels must agree."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from rotwall import _kernels, energy_level, get_molecule
from rotwall.rotor import cos2_matrix

BACKENDS = _kernels.available_backends()
N2 = get_molecule("N2")


def _random_block(rng, m=2, j_max=60, cols=5):
    n = j_max - m + 1
    psi = rng.normal(size=(n, cols)) + 1j * rng.normal(size=(n, cols))
    psi /= np.linalg.norm(psi, axis=0)
    c2 = cos2_matrix(m, j_max)
    J = np.arange(m, j_max + 1, dtype=float)
    E = energy_level(np.arange(m, j_max + 1), N2)
    w = rng.random(cols)
    return np.ascontiguousarray(psi), w, J, E, c2


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert _kernels.BACKEND in BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


@pytest.mark.parametrize("name", BACKENDS)
def test_observables_against_dense(name):
    k = _kernels.get_backend(name)
    rng = np.random.default_rng(3)
    psi, w, J, E, c2 = _random_block(rng)
    p, mj, en, al = k.observables(psi, w, J, E, c2.diag, c2.offdiag2)
    pops = np.abs(psi) ** 2
    np.testing.assert_allclose(p, pops @ w, rtol=1e-13)
    assert mj == pytest.approx(w @ (J @ pops), rel=1e-13)
    assert en == pytest.approx(w @ (E @ pops), rel=1e-13)
    dense = np.real(np.einsum("ic,ij,jc->c", psi.conj(), c2.to_dense(), psi))
    assert al == pytest.approx(w @ dense, rel=1e-13)


@pytest.mark.parametrize("name", BACKENDS)
def test_alignment_trace_against_dense(name):
    k = _kernels.get_backend(name)
    rng = np.random.default_rng(4)
    psi, w, J, E, c2 = _random_block(rng, m=0, j_max=40, cols=3)
    times = np.array([0.0, 0.013, 0.25, 0.71])
    got = k.alignment_trace(psi, w, E, c2.diag, c2.offdiag2, times)
    C = c2.to_dense()
    for t, g in zip(times, got):
        ph = np.exp(-1j * math.pi * E * t)[:, None]
        ref = w @ np.real(np.einsum("ic,ij,jc->c", (ph * psi).conj(), C, ph * psi))
        assert g == pytest.approx(ref, abs=1e-13)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree():
    py, cy = _kernels.get_backend("python"), _kernels.get_backend("cython")
    rng = np.random.default_rng(5)
    psi, w, J, E, c2 = _random_block(rng, m=1, j_max=90, cols=7)
    a = py.observables(psi, w, J, E, c2.diag, c2.offdiag2)
    b = cy.observables(psi, w, J, E, c2.diag, c2.offdiag2)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12)
    for x, y in zip(a[1:], b[1:]):
        assert x == pytest.approx(y, rel=1e-12)
    times = np.linspace(0, 1, 17)
    np.testing.assert_allclose(
        py.alignment_trace(psi, w, E, c2.diag, c2.offdiag2, times),
        cy.alignment_trace(psi, w, E, c2.diag, c2.offdiag2, times),
        rtol=1e-12,
    )
    args = (3.0, N2.D_over_B, 0.0, math.pi / 4, 0.0, 1e-3, 20000, 100)
    for x, y in zip(py.rk4_bloch(*args), cy.rk4_bloch(*args)):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_rk4_ballistic(name):
    k = _kernels.get_backend(name)
    n, kk, J = k.rk4_bloch(2.0, 0.0, 0.0, math.pi / 4, 1.0, 1e-3, 5000, 1000)
    np.testing.assert_allclose(n, [0, 1, 2, 3, 4, 5], atol=1e-12)
    np.testing.assert_allclose(J, 1.0 + 2.0 * n, atol=1e-12)


def test_env_var_forces_python():
    code = "import rotwall; print(rotwall.KERNEL_BACKEND)"
    env = dict(os.environ, ROTWALL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
