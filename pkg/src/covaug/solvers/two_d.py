"""Dirichlet solvers on the unit square.

Stationary diffusion and convection-diffusion use bilinear FEM (consistent
mass, Crank-Nicolson in time).  The wave equation is in non-divergence form
and uses second-order central differences with leapfrog.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import splu, spsolve

from ..grid import Grid, SpaceTimeField, sample_2d, sample_tensor_2d, sample_vector_2d
from .errors import CFLError, CoefficientError, SolverError
from .fem2d import BilinearMesh


def _tensor_at_q(mesh: BilinearMesh, A):
    if isinstance(A, (tuple, list)):
        return tuple(mesh.at_quadrature(c) for c in A)
    return sample_tensor_2d(A, mesh.qx, mesh.qy)


def _vector_at_q(mesh: BilinearMesh, v):
    if v is None:
        z = np.zeros(mesh.qx.shape)
        return z, z.copy()
    if isinstance(v, (tuple, list)):
        return tuple(mesh.at_quadrature(c) for c in v)
    return sample_vector_2d(v, mesh.qx, mesh.qy)


def _check_spd(a11, a12, a22, what="diffusion tensor"):
    if not (np.all(np.isfinite(a11)) and np.all(np.isfinite(a12)) and np.all(np.isfinite(a22))):
        raise CoefficientError(f"{what} has non-finite values")
    if np.min(a11) <= 0 or np.min(a11 * a22 - a12**2) <= 0:
        raise CoefficientError(f"{what} is not positive definite")


def _stiffness(mesh, A):
    a = _tensor_at_q(mesh, A)
    _check_spd(*a)
    return mesh.stiffness(*a)


def solve_elliptic_2d(A, f, n: int) -> np.ndarray:
    """Nodal ``(n, n)`` solution of ``div(A grad u) = f`` with ``u = 0`` on the boundary."""
    mesh = BilinearMesh(n)
    K = mesh.restrict(_stiffness(mesh, A))
    F = mesh.load(mesh.at_quadrature(f))[mesh.interior]
    u = np.zeros(n * n)
    if np.any(F):
        try:
            u[mesh.interior] = spsolve(K, -F)
        except RuntimeError as exc:
            raise SolverError(f"sparse solve failed: {exc}") from exc
        if not np.all(np.isfinite(u)):
            raise SolverError("sparse solve produced non-finite values")
    return u.reshape(n, n)


def assembled_elliptic_system(A, f, n: int):
    """Interior matrix and right-hand side ``K u = -F`` used by :func:`solve_elliptic_2d`."""
    mesh = BilinearMesh(n)
    K = mesh.restrict(_stiffness(mesh, A))
    F = mesh.load(mesh.at_quadrature(f))[mesh.interior]
    return K, -F, mesh.interior


def _dirichlet_initial(field, n):
    X, Y = Grid(2, n).mesh()
    u0 = sample_2d(field, X, Y)
    u0[0, :] = u0[-1, :] = u0[:, 0] = u0[:, -1] = 0.0
    return u0


def solve_convdiff_2d(A, v, phi0, n: int, nt: int, T: float) -> SpaceTimeField:
    """``phi_t + div(v phi) = div(A grad phi)``, Crank-Nicolson over ``nt`` levels."""
    if nt < 2:
        raise ValueError("nt must be at least 2")
    mesh = BilinearMesh(n)
    dt = T / (nt - 1)
    K = _stiffness(mesh, A)
    B = mesh.convection(*_vector_at_q(mesh, v))
    M = mesh.mass()
    op = mesh.restrict(K - B)
    Mi = mesh.restrict(M)
    try:
        lu = splu((Mi + 0.5 * dt * op).tocsc())
    except RuntimeError as exc:
        raise SolverError(f"factorization failed: {exc}") from exc
    rhs_op = (Mi - 0.5 * dt * op).tocsr()

    out = np.zeros((nt, n, n))
    out[0] = _dirichlet_initial(phi0, n)
    idx = mesh.interior
    cur = out[0].reshape(-1)[idx]
    for k in range(1, nt):
        cur = lu.solve(rhs_op @ cur)
        out[k].reshape(-1)[idx] = cur
    if not np.all(np.isfinite(out)):
        raise SolverError("convection-diffusion solution is not finite")
    return SpaceTimeField(out, float(T))


def wave_time_step_limit_2d(c11, c12, c22, h: float) -> float:
    return h / np.sqrt(np.max(c11 + c22 + np.abs(c12)))


def solve_wave_2d(c, v, rho0, n: int, nt: int, T: float) -> SpaceTimeField:
    """``rho_tt + v . grad rho = c : grad grad rho`` from rest (no source term)."""
    if nt < 2:
        raise ValueError("nt must be at least 2")
    grid = Grid(2, n)
    X, Y = grid.mesh()
    h = grid.h
    dt = T / (nt - 1)
    c11, c12, c22 = (arr[1:-1, 1:-1] for arr in sample_tensor_2d(c, X, Y))
    _check_spd(c11, c12, c22, "wave tensor c")
    limit = wave_time_step_limit_2d(c11, c12, c22, h)
    if dt > limit:
        raise CFLError(f"dt={dt:.3g} exceeds CFL limit {limit:.3g}")
    v1, v2 = (arr[1:-1, 1:-1] for arr in sample_vector_2d(v, X, Y))

    def accel(r):
        c = r[1:-1, 1:-1]
        rxx = (r[2:, 1:-1] - 2 * c + r[:-2, 1:-1]) / h**2
        ryy = (r[1:-1, 2:] - 2 * c + r[1:-1, :-2]) / h**2
        rxy = (r[2:, 2:] - r[2:, :-2] - r[:-2, 2:] + r[:-2, :-2]) / (4 * h**2)
        rx = (r[2:, 1:-1] - r[:-2, 1:-1]) / (2 * h)
        ry = (r[1:-1, 2:] - r[1:-1, :-2]) / (2 * h)
        return c11 * rxx + 2 * c12 * rxy + c22 * ryy - v1 * rx - v2 * ry

    out = np.zeros((nt, n, n))
    out[0] = _dirichlet_initial(rho0, n)
    out[1, 1:-1, 1:-1] = out[0, 1:-1, 1:-1] + 0.5 * dt**2 * accel(out[0])
    for k in range(2, nt):
        out[k, 1:-1, 1:-1] = (2 * out[k - 1, 1:-1, 1:-1] - out[k - 2, 1:-1, 1:-1]
                              + dt**2 * accel(out[k - 1]))
    if not np.all(np.isfinite(out)):
        raise SolverError("wave solution blew up")
    return SpaceTimeField(out, float(T))
