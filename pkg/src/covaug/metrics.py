"""Discrete PDE residuals and the test-error metrics.

Residuals use second-order central stencils at interior nodes (and interior
time levels), with the diffusion/flux term in conservative form for the
diffusion and convection-diffusion families.  Norms are relative to the
diffusion term, the one term present in every sample.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import CONVDIFF, ELLIPTIC, WAVE, ConvDiffFields, EllipticFields, WaveFields
from .grid import Grid


@dataclass(frozen=True)
class ResidualReport:
    l2_residual: float
    linf_residual: float
    grid: Grid
    equation: str

    def passed(self, tol: float) -> bool:
        return self.l2_residual <= tol

    def to_json(self) -> dict:
        return {"equation": self.equation, "grid": self.grid.to_json(),
                "l2_residual": self.l2_residual, "linf_residual": self.linf_residual}


def _ratio(num, den):
    return float(num / den) if den > 0 else (0.0 if num == 0 else float("inf"))


def _report(res: np.ndarray, ref: np.ndarray, grid: Grid, equation: str) -> ResidualReport:
    return ResidualReport(_ratio(np.linalg.norm(res), np.linalg.norm(ref)),
                          _ratio(np.abs(res).max(initial=0.0), np.abs(ref).max(initial=0.0)),
                          grid, equation)


# Spatial operators on interior nodes.  Arrays may carry leading (time) axes.

def _div_flux_1d(a, u, h):
    am = 0.5 * (a[1:] + a[:-1])
    flux = am * np.diff(u, axis=-1)
    return np.diff(flux, axis=-1) / h**2


def _dx(u, h):
    return (u[..., 2:] - u[..., :-2]) / (2 * h)


def _div_flux_2d(a, u, h):
    """Interior ``d_k(a^{kj} d_j u)`` for packed ``a = (a11, a12, a22)``."""
    a11, a12, a22 = a
    ax = 0.5 * (a11[1:, :] + a11[:-1, :])
    ay = 0.5 * (a22[:, 1:] + a22[:, :-1])
    fx = ax * np.diff(u, axis=-2)
    fy = ay * np.diff(u, axis=-1)
    out = np.diff(fx, axis=-2)[..., :, 1:-1] / h**2 + np.diff(fy, axis=-1)[..., 1:-1, :] / h**2
    # cross terms: d_x(a12 u_y) + d_y(a12 u_x), central
    uy = (u[..., :, 2:] - u[..., :, :-2]) / (2 * h)           # (.., n, n-2)
    ux = (u[..., 2:, :] - u[..., :-2, :]) / (2 * h)           # (.., n-2, n)
    gxy = a12[:, 1:-1] * uy
    gyx = a12[1:-1, :] * ux
    out = out + (gxy[..., 2:, :] - gxy[..., :-2, :]) / (2 * h)
    out = out + (gyx[..., :, 2:] - gyx[..., :, :-2]) / (2 * h)
    return out


def _div_vec_2d(v, u, h):
    """Interior ``d_i(v^i u)``."""
    f1, f2 = v[0] * u, v[1] * u
    return (f1[..., 2:, 1:-1] - f1[..., :-2, 1:-1]) / (2 * h) + (f2[..., 1:-1, 2:] - f2[..., 1:-1, :-2]) / (2 * h)


def _hessian_contract_2d(c, u, h):
    c11, c12, c22 = (comp[1:-1, 1:-1] for comp in c)
    m = u[..., 1:-1, 1:-1]
    uxx = (u[..., 2:, 1:-1] - 2 * m + u[..., :-2, 1:-1]) / h**2
    uyy = (u[..., 1:-1, 2:] - 2 * m + u[..., 1:-1, :-2]) / h**2
    uxy = (u[..., 2:, 2:] - u[..., 2:, :-2] - u[..., :-2, 2:] + u[..., :-2, :-2]) / (4 * h**2)
    return c11 * uxx + 2 * c12 * uxy + c22 * uyy


def _grad_dot_2d(v, u, h):
    v1, v2 = (comp[1:-1, 1:-1] for comp in v)
    ux = (u[..., 2:, 1:-1] - u[..., :-2, 1:-1]) / (2 * h)
    uy = (u[..., 1:-1, 2:] - u[..., 1:-1, :-2]) / (2 * h)
    return v1 * ux + v2 * uy


def _interior(arr, dim):
    return arr[..., 1:-1] if dim == 1 else arr[..., 1:-1, 1:-1]


def _arr(x, shape):
    return np.broadcast_to(np.asarray(x, dtype=float), shape)


def _tensor_arr(x, shape):
    """Packed tensor components; a scalar or single field ``s`` means ``s * I``."""
    x = np.asarray(x, dtype=float)
    if len(shape) == 3 and x.ndim < 3:
        s = np.broadcast_to(x, shape[1:])
        return np.stack([s, np.zeros(shape[1:]), s])
    return _arr(x, shape)


def residual_norm(kind: str, fields, grid: Grid, dt: float | None = None) -> ResidualReport:
    """Relative discrete residual of a PDE triple on ``grid``.

    ``kind`` is ``"elliptic"``, ``"convdiff"`` or ``"wave"``; time-dependent
    kinds need the full trajectory in ``fields`` and the step ``dt``.
    """
    if grid.n < 5:
        raise ValueError("residual needs at least 5 points per axis")
    D, h = grid.dim, grid.h
    tshape = (3,) + grid.shape if D == 2 else grid.shape
    vshape = (2,) + grid.shape if D == 2 else grid.shape
    div = _div_flux_1d if D == 1 else _div_flux_2d

    if kind == ELLIPTIC:
        assert isinstance(fields, EllipticFields)
        u = np.asarray(fields.u, dtype=float)
        diff = div(_tensor_arr(fields.a, tshape), u, h)
        res = diff - _interior(_arr(fields.f, grid.shape), D)
        return _report(res, diff, grid, kind)

    if dt is None or dt <= 0:
        raise ValueError("time-dependent residual needs dt > 0")

    if kind == CONVDIFF:
        assert isinstance(fields, ConvDiffFields)
        phi = np.asarray(fields.phi, dtype=float)
        if phi.ndim != D + 1 or phi.shape[0] < 3:
            raise ValueError("convection-diffusion residual needs at least 3 time levels")
        mid = phi[1:-1]
        diff = div(_tensor_arr(fields.a, tshape), mid, h)
        v = _arr(fields.v, vshape)
        conv = _dx(v * mid, h) if D == 1 else _div_vec_2d(v, mid, h)
        dphi = _interior((phi[2:] - phi[:-2]) / (2 * dt), D)
        return _report(dphi + conv - diff, diff, grid, kind)

    if kind == WAVE:
        assert isinstance(fields, WaveFields)
        rho = np.asarray(fields.rho, dtype=float)
        if rho.ndim != D + 1 or rho.shape[0] < 3:
            raise ValueError("wave residual needs at least 3 time levels")
        mid = rho[1:-1]
        if D == 1:
            c = _arr(fields.c, grid.shape)[1:-1]
            diff = c * (mid[..., 2:] - 2 * mid[..., 1:-1] + mid[..., :-2]) / h**2
            adv = _arr(fields.v, grid.shape)[1:-1] * _dx(mid, h)
        else:
            diff = _hessian_contract_2d(_tensor_arr(fields.c, tshape), mid, h)
            adv = _grad_dot_2d(_arr(fields.v, vshape), mid, h)
        react = _interior(_arr(fields.e, grid.shape), D) * _interior(mid, D)
        dtt = _interior((rho[2:] - 2 * mid + rho[:-2]) / dt**2, D)
        return _report(dtt + adv - diff - react, diff, grid, kind)

    raise ValueError(f"unknown equation kind {kind!r}")


def rel_l2_error(predictions, targets) -> float:
    """Mean over the batch of ``||p_i - t_i|| / ||t_i||``."""
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(targets, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {t.shape}")
    if p.ndim == 1:
        p, t = p[None], t[None]
    p = p.reshape(p.shape[0], -1)
    t = t.reshape(t.shape[0], -1)
    tn = np.linalg.norm(t, axis=1)
    if np.any(tn == 0):
        raise ZeroDivisionError("target with zero norm")
    return float(np.mean(np.linalg.norm(p - t, axis=1) / tn))


def relative_gain(e_plain: float, e_aug: float) -> float:
    """Percentage reduction of the test error due to augmentation."""
    if not e_plain > 0:
        raise ValueError("e_plain must be positive")
    return (1.0 - e_aug / e_plain) * 100.0
