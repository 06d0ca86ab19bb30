"""Dirichlet solvers on the unit interval.

* stationary diffusion ``(a u')' = f``: linear FEM with midpoint ``a`` and
  nodal load quadrature,
* convection-diffusion ``phi_t + (v phi)' = (a phi')'``: conservative
  central differences, Crank-Nicolson in time,
* two-way wave ``rho_tt + v rho' = c rho'' + e rho``: central differences,
  leapfrog with a Taylor start from rest.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from ..grid import Grid, SpaceTimeField, midpoints_1d, sample_1d
from .errors import CFLError, CoefficientError, SolverError


def _check_positive(values, name):
    if not np.all(np.isfinite(values)):
        raise CoefficientError(f"{name} has non-finite values")
    if np.min(values) <= 0:
        raise CoefficientError(f"{name} must be uniformly positive (min {np.min(values):.3g})")


def _diffusion_bands(a_mid: np.ndarray, h: float) -> np.ndarray:
    """Banded interior matrix of ``u -> (a_{j+1/2}(u_{j+1}-u_j) - a_{j-1/2}(u_j-u_{j-1})) / h^2``."""
    m = a_mid.size - 1
    ab = np.zeros((3, m))
    ab[0, 1:] = a_mid[1:-1] / h**2
    ab[1, :] = -(a_mid[:-1] + a_mid[1:]) / h**2
    ab[2, :-1] = a_mid[1:-1] / h**2
    return ab


def _banded_matvec(ab: np.ndarray, u: np.ndarray) -> np.ndarray:
    out = ab[1] * u
    out[:-1] += ab[0, 1:] * u[1:]
    out[1:] += ab[2, :-1] * u[:-1]
    return out


def _solve(ab, rhs):
    try:
        out = solve_banded((1, 1), ab, rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal solve failed: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise SolverError("tridiagonal solve produced non-finite values")
    return out


def solve_elliptic_1d(a, f, n: int) -> np.ndarray:
    """Nodal values of the linear-FEM solution of ``(a u')' = f``, ``u(0) = u(1) = 0``."""
    grid = Grid(1, n)
    x, h = grid.axis, grid.h
    a_mid = midpoints_1d(a, x)
    _check_positive(a_mid, "diffusion coefficient")
    fx = sample_1d(f, x)
    u = np.zeros(n)
    u[1:-1] = _solve(_diffusion_bands(a_mid, h), fx[1:-1])
    return u


def _convdiff_operator(a, v, x, h):
    """Interior bands of ``L phi = (a phi')' - (v phi)'``."""
    a_mid = midpoints_1d(a, x)
    _check_positive(a_mid, "diffusion coefficient")
    vx = sample_1d(v, x)
    ab = _diffusion_bands(a_mid, h)
    # -(v_{j+1} phi_{j+1} - v_{j-1} phi_{j-1}) / 2h
    ab[0, 1:] -= vx[2:-1] / (2 * h)
    ab[2, :-1] += vx[1:-2] / (2 * h)
    return ab


def solve_convdiff_1d(a, v, phi0, n: int, nt: int, T: float) -> SpaceTimeField:
    if nt < 2:
        raise ValueError("nt must be at least 2")
    grid = Grid(1, n)
    x, h = grid.axis, grid.h
    dt = T / (nt - 1)
    L = _convdiff_operator(a, v, x, h)
    lhs = -0.5 * dt * L
    lhs[1] += 1.0
    rhs_op = 0.5 * dt * L
    rhs_op[1] += 1.0

    out = np.zeros((nt, n))
    phi = sample_1d(phi0, x)
    phi[0] = phi[-1] = 0.0
    out[0] = phi
    for k in range(1, nt):
        out[k, 1:-1] = _solve(lhs, _banded_matvec(rhs_op, out[k - 1, 1:-1]))
    return SpaceTimeField(out, float(T))


def wave_time_step_limit(c_max: float, h: float) -> float:
    return h / np.sqrt(c_max)


def solve_wave_1d(c, v, e, rho0, n: int, nt: int, T: float) -> SpaceTimeField:
    if nt < 2:
        raise ValueError("nt must be at least 2")
    grid = Grid(1, n)
    x, h = grid.axis, grid.h
    dt = T / (nt - 1)
    cx = sample_1d(c, x)
    _check_positive(cx, "wave coefficient c")
    limit = wave_time_step_limit(cx.max(), h)
    if dt > limit:
        raise CFLError(f"dt={dt:.3g} exceeds CFL limit {limit:.3g}")
    vx = sample_1d(v, x)[1:-1]
    ex = sample_1d(e, x)[1:-1]
    ci = cx[1:-1]

    def accel(r):
        inner = r[1:-1]
        lap = (r[2:] - 2 * inner + r[:-2]) / h**2
        grad = (r[2:] - r[:-2]) / (2 * h)
        return ci * lap - vx * grad + ex * inner

    out = np.zeros((nt, n))
    r0 = sample_1d(rho0, x)
    r0[0] = r0[-1] = 0.0
    out[0] = r0
    out[1, 1:-1] = r0[1:-1] + 0.5 * dt**2 * accel(r0)
    for k in range(2, nt):
        out[k, 1:-1] = 2 * out[k - 1, 1:-1] - out[k - 2, 1:-1] + dt**2 * accel(out[k - 1])
    if not np.all(np.isfinite(out)):
        raise SolverError("wave solution blew up")
    return SpaceTimeField(out, float(T))
