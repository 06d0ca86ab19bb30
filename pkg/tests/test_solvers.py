import numpy as np
import pytest
from scipy.integrate import trapezoid

from covaug.grid import Grid
from covaug.solvers import (CFLError, CoefficientError, assembled_elliptic_system,
                            solve_convdiff_1d, solve_convdiff_2d, solve_elliptic_1d,
                            solve_elliptic_2d, solve_wave_1d, solve_wave_2d)


def rel_l2(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


# -- 1D stationary diffusion ------------------------------------------------

def test_elliptic_1d_nodal_exactness():
    x = np.linspace(0, 1, 41)
    np.testing.assert_allclose(solve_elliptic_1d(1.0, 1.0, 41), (x**2 - x) / 2, atol=1e-12)


def test_elliptic_1d_zero_rhs():
    assert not np.any(solve_elliptic_1d(lambda x: 1 + x, 0.0, 11))


def test_elliptic_1d_sine_convergence():
    b = np.array([1.0, -0.5, 0.25])
    k = np.pi * np.arange(1, 4)
    f = lambda x: np.sin(np.outer(x, k)) @ b
    exact = lambda x: -np.sin(np.outer(x, k)) @ (b / k**2)
    errs = []
    for n in (51, 101):
        # variable coefficient makes the scheme non-exact at the nodes
        a = lambda x: 1 + 0.5 * np.sin(2 * np.pi * x)
        u_fine = solve_elliptic_1d(a, lambda x: f(x), 4 * (n - 1) + 1)[::4]
        errs.append(np.abs(solve_elliptic_1d(a, f, n) - u_fine).max())
    assert 3.5 <= errs[0] / errs[1] <= 4.5
    # constant coefficient: nodally exact up to the load quadrature
    u = solve_elliptic_1d(1.0, f, 101)
    assert np.abs(u - exact(np.linspace(0, 1, 101))).max() < 1e-3


def test_elliptic_1d_rejects_nonpositive():
    with pytest.raises(CoefficientError):
        solve_elliptic_1d(lambda x: x - 0.5, 1.0, 21)


# -- 1D convection-diffusion --------------------------------------------------

def oracle(x, t):
    return np.exp(x / 2 - t / 4) * np.sin(np.pi * x) * np.exp(-np.pi**2 * t)


def test_convdiff_1d_oracle_and_refinement():
    errs = []
    for n, nt in ((101, 201), (201, 401)):
        sol = solve_convdiff_1d(1.0, 1.0, lambda x: oracle(x, 0.0), n, nt, 0.05)
        errs.append(rel_l2(sol.final, oracle(np.linspace(0, 1, n), 0.05)))
    assert errs[0] <= 1e-3
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_convdiff_1d_zero_and_boundaries():
    assert not np.any(solve_convdiff_1d(1.0, 0.3, 0.0, 21, 11, 0.1).values)
    sol = solve_convdiff_1d(0.1, 0.3, lambda x: np.sin(3 * np.pi * x), 31, 21, 0.1)
    assert np.all(sol.values[:, 0] == 0) and np.all(sol.values[:, -1] == 0)
    assert sol.values.shape == (21, 31) and sol.dt == pytest.approx(0.005)


def test_convdiff_1d_linearity():
    p1 = lambda x: np.sin(np.pi * x)
    p2 = lambda x: x * (1 - x)
    a = solve_convdiff_1d(0.2, 0.5, p1, 41, 21, 0.2).values
    b = solve_convdiff_1d(0.2, 0.5, p2, 41, 21, 0.2).values
    c = solve_convdiff_1d(0.2, 0.5, lambda x: 2 * p1(x) - 3 * p2(x), 41, 21, 0.2).values
    np.testing.assert_allclose(c, 2 * a - 3 * b, atol=1e-10)


# -- 1D wave ------------------------------------------------------------------

def test_wave_1d_standing_wave():
    errs = []
    for n, nt in ((101, 1001), (201, 2001)):
        sol = solve_wave_1d(1.0, 0.0, 0.0, lambda x: np.sin(np.pi * x), n, nt, 1.0)
        x, t = np.linspace(0, 1, n), sol.times
        exact = np.sin(np.pi * x)[None] * np.cos(np.pi * t)[:, None]
        errs.append(rel_l2(sol.values, exact))
    assert errs[0] <= 1e-3
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_wave_1d_zero_and_cfl():
    assert not np.any(solve_wave_1d(1.0, 0.1, 0.2, 0.0, 21, 41, 1.0).values)
    with pytest.raises(CFLError):
        solve_wave_1d(1.0, 0.0, 0.0, lambda x: np.sin(np.pi * x), 101, 11, 1.0)
    with pytest.raises(CoefficientError):
        solve_wave_1d(-1.0, 0.0, 0.0, 0.0, 11, 101, 1.0)


# -- 2D -----------------------------------------------------------------------

def mode(n):
    X, Y = Grid(2, n).mesh()
    return np.sin(np.pi * X) * np.sin(np.pi * Y)


def test_elliptic_2d_manufactured():
    errs = []
    for n in (33, 65):
        u = solve_elliptic_2d(1.0, lambda x, y: -2 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y), n)
        errs.append(rel_l2(u, mode(n)))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_elliptic_2d_zero_and_algebraic_residual():
    assert not np.any(solve_elliptic_2d(1.0, 0.0, 17))
    f = lambda x, y: np.cos(3 * x) + y**2
    K, rhs, interior = assembled_elliptic_system(1.0, f, 33)
    u = solve_elliptic_2d(1.0, f, 33).reshape(-1)[interior]
    assert np.linalg.norm(K @ u - rhs) / np.linalg.norm(rhs) <= 1e-9


def test_elliptic_2d_rejects_indefinite():
    with pytest.raises(CoefficientError):
        solve_elliptic_2d((1.0, 2.0, 1.0), 1.0, 9)


def test_heat_2d():
    n, T = 65, 1e-2
    sol = solve_convdiff_2d(1.0, None, mode(n), n, 101, T)
    assert rel_l2(sol.final, np.exp(-2 * np.pi**2 * T) * mode(n)) <= 5e-3
    mass = trapezoid(trapezoid(sol.values, axis=-1), axis=-1)
    assert np.all(np.diff(mass) <= 1e-14)
    assert not np.any(solve_convdiff_2d(1.0, (0.3, 0.1), 0.0, 9, 5, 0.1).values)


def test_wave_2d_standing_wave_and_energy():
    n, T, nt = 65, 0.1, 101
    sol = solve_wave_2d(1.0, None, mode(n), n, nt, T)
    exact = mode(n) * np.cos(np.sqrt(2) * np.pi * T)
    assert rel_l2(sol.final, exact) <= 5e-3
    h, dt = 1 / (n - 1), T / (nt - 1)
    r = sol.values
    energies = []
    for k in range(1, nt - 1):
        vel = (r[k + 1] - r[k - 1]) / (2 * dt)
        gx, gy = np.diff(r[k], axis=0) / h, np.diff(r[k], axis=1) / h
        energies.append(0.5 * (np.sum(vel**2) + np.sum(gx**2) + np.sum(gy**2)) * h * h)
    energies = np.array(energies)
    assert np.ptp(energies) / energies.mean() < 0.01
    assert not np.any(solve_wave_2d(1.0, (0.2, 0.1), 0.0, 9, 9, 0.1).values)
    with pytest.raises(CFLError):
        solve_wave_2d(1.0, None, mode(33), 33, 3, 1.0)
