"""Independent reference computations used only by the tests.

Nothing here imports the code paths it checks: matrix elements come from
Gauss-Legendre quadrature over theta-functions built by recurrence, kicks
are applied pointwise in theta and projected back by quadrature.
"""
import numpy as np

N_NODES = 256
X, W = np.polynomial.legendre.leggauss(N_NODES)


def theta_functions(m, l_max, x=X):
    """Rows l = m..l_max of the orthonormal functions p_l^m(x), int p^2 dx = 1."""
    m = abs(m)
    s = np.sqrt(1.0 - x * x)
    p = np.full_like(x, np.sqrt(0.5))
    for k in range(1, m + 1):
        p = -np.sqrt((2 * k + 1) / (2 * k)) * s * p
    rows = [p]
    if l_max > m:
        rows.append(np.sqrt(2 * m + 3) * x * p)
    for l in range(m + 2, l_max + 1):
        a_l = np.sqrt((4 * l * l - 1) / (l * l - m * m))
        a_prev = np.sqrt((4 * (l - 1) ** 2 - 1) / ((l - 1) ** 2 - m * m))
        rows.append(a_l * (x * rows[-1] - rows[-2] / a_prev))
    return np.array(rows)


def cos2_elements(m, l_max):
    """Dense <l',m|cos^2|l,m> for l, l' = |m|..l_max by quadrature."""
    th = theta_functions(m, l_max)
    return (th * (W * X * X)) @ th.T


def overlap(m, l_max):
    th = theta_functions(m, l_max)
    return (th * W) @ th.T


def kick_by_quadrature(coeffs, m, P):
    """exp(i P cos^2 theta) applied on the theta grid and projected back."""
    l_max = abs(m) + len(coeffs) - 1
    th = theta_functions(m, l_max)
    psi_x = coeffs @ th
    return th @ (W * np.exp(1j * P * X * X) * psi_x)


def alignment_by_quadrature(coeffs, m):
    l_max = abs(m) + len(coeffs) - 1
    th = theta_functions(m, l_max)
    psi_x = coeffs @ th
    return float(np.sum(W * X * X * np.abs(psi_x) ** 2))


def turning_point_closed_form(P, D_over_B, H0=0.0):
    """Positive root of pi (D/B) x^2 = P/2 - H0 with x = J (J + 1)."""
    x = np.sqrt((0.5 * P - H0) / (np.pi * D_over_B))
    return (-1.0 + np.sqrt(1.0 + 4.0 * x)) / 2.0
