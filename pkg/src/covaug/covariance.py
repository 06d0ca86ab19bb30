"""Transformation laws for diffusion, convection-diffusion and wave equations.

Given a map ``x(xi)`` of the unit cube onto itself, each ``transform_*``
function rewrites a solved triple (coefficients, data, solution) in the
coordinates ``xi`` so that the result solves the *same* parametric PDE on
the uniform ``xi`` grid.  Fields are either nodal arrays on the original
grid (resampled at ``x(xi)`` by piecewise-cubic Hermite interpolation) or
callables evaluated there directly.  Jacobian factors always come from the
map's closed form.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .fields import (CONVDIFF, ELLIPTIC, ConvDiffFields, EllipticFields, Sample, WaveFields,
                     dimension, family, fields_to_sample, sample_to_fields)
from .grid import Grid
from .maps import DomainError, JacobiJet, Map1D, Map2D, jacobi_jet, random_map_1d, random_map_2d
from .randfields import derive_rng

# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------


def _slopes(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative along the last axis."""
    f = values
    n = f.shape[-1]
    if n < 5:
        return np.gradient(f, h, axis=-1, edge_order=2)
    m = np.empty_like(f)
    m[..., 2:-2] = (-f[..., 4:] + 8 * f[..., 3:-1] - 8 * f[..., 1:-3] + f[..., :-4]) / (12 * h)
    m[..., 0] = (-25 * f[..., 0] + 48 * f[..., 1] - 36 * f[..., 2] + 16 * f[..., 3] - 3 * f[..., 4]) / (12 * h)
    m[..., 1] = (-3 * f[..., 0] - 10 * f[..., 1] + 18 * f[..., 2] - 6 * f[..., 3] + f[..., 4]) / (12 * h)
    m[..., -1] = (25 * f[..., -1] - 48 * f[..., -2] + 36 * f[..., -3] - 16 * f[..., -4] + 3 * f[..., -5]) / (12 * h)
    m[..., -2] = (3 * f[..., -1] + 10 * f[..., -2] - 18 * f[..., -3] + 6 * f[..., -4] - f[..., -5]) / (12 * h)
    return m


def _cell(q: np.ndarray, n: int):
    h = 1.0 / (n - 1)
    s = q / h
    idx = np.clip(np.floor(s).astype(int), 0, n - 2)
    return idx, s - idx, h


def _hermite(f0, f1, m0, m1, t, h):
    t2, t3 = t * t, t * t * t
    return ((2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * m0
            + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * m1)


def _interp_1d(values: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = values.shape[-1]
    idx, t, h = _cell(q, n)
    m = _slopes(values, h)
    return _hermite(values[..., idx], values[..., idx + 1], m[..., idx], m[..., idx + 1], t, h)


def resample_field(values, query) -> np.ndarray:
    """Interpolate nodal values on the uniform unit grid at ``query`` points.

    ``values`` has shape ``(..., n)`` in 1D or ``(..., n, n)`` in 2D, with any
    leading batch axes.  ``query`` is ``(P,)`` or ``(P, 2)``; the result is
    ``(..., P)``.  Uses cubic Hermite pieces with fourth-order
    finite-difference slopes, tensorised in 2D, so it is node-exact and
    reproduces polynomials up to degree three.
    """
    values = np.asarray(values, dtype=float)
    q = np.asarray(query, dtype=float)
    if q.size and (q.min() < -1e-12 or q.max() > 1 + 1e-12):
        raise DomainError("query points must lie in the unit interval/square")
    q = np.clip(q, 0.0, 1.0)
    if q.ndim == 1:
        return _interp_1d(values, q)
    if q.shape[-1] != 2 or values.ndim < 2 or values.shape[-1] != values.shape[-2]:
        raise ValueError("2D resampling needs (..., n, n) values and (P, 2) queries")
    n = values.shape[-1]
    # interpolate along x for every column, then along y per query point
    along_x = _interp_1d(np.swapaxes(values, -1, -2), q[:, 0])      # (..., n_y, P)
    rows = np.swapaxes(along_x, -1, -2)                                # (..., P, n_y)
    idx, t, h = _cell(q[:, 1], n)
    m = _slopes(rows, h)
    p = np.arange(q.shape[0])
    return _hermite(rows[..., p, idx], rows[..., p, idx + 1],
                    m[..., p, idx], m[..., p, idx + 1], t, h)


# ---------------------------------------------------------------------------
# Transformation laws
# ---------------------------------------------------------------------------


def resample_spd(values, query) -> np.ndarray:
    """Resample a nodal SPD field so the result is SPD at every query point.

    The log-Cholesky factors ``(log l11, l21, log l22)`` of the packed
    components ``(a11, a12, a22)`` (or ``log a`` in 1D) are interpolated
    instead of the entries themselves; component-wise cubics can lose
    definiteness between nodes of a rough tensor field.  Inputs that are
    not SPD at the nodes are resampled component-wise.
    """
    values = np.asarray(values, dtype=float)
    q = np.asarray(query, dtype=float)
    if q.ndim == 1:
        if np.all(values > 0):
            return np.exp(resample_field(np.log(values), q))
        return resample_field(values, q)
    a11, a12, a22 = values
    if not (np.all(a11 > 0) and np.all(a11 * a22 - a12**2 > 0)):
        return resample_field(values, q)
    l11 = np.sqrt(a11)
    l21 = a12 / l11
    l22 = np.sqrt(a22 - l21**2)
    g11, g21, g22 = resample_field(np.stack([np.log(l11), l21, np.log(l22)]), q)
    m11, m22 = np.exp(g11), np.exp(g22)
    return np.stack([m11**2, m11 * g21, g21**2 + m22**2])


def _grid_jet(m: Map1D | Map2D, grid: Grid) -> JacobiJet:
    if m.dim != grid.dim:
        raise ValueError(f"map dimension {m.dim} does not match grid dimension {grid.dim}")
    return jacobi_jet(m, grid.points())


def _at(field, jet: JacobiJet, grid: Grid, kind: str = "scalar"):
    """Evaluate ``field`` at ``x(xi)``; result has the point axis last.

    ``kind`` is ``"scalar"``, ``"tensor"`` (packed symmetric components) or
    ``"vector"``.  A scalar given for a 2D tensor means ``s * I``.  Callables
    receive the coordinates (``x`` or ``x, y``) and may return extra leading
    axes, e.g. time levels.
    """
    if field is None:
        return None
    P = jet.x.shape[0]
    if callable(field):
        args = (jet.x[:, 0],) if grid.dim == 1 else (jet.x[:, 0], jet.x[:, 1])
        out = field(*args)
        if isinstance(out, (tuple, list)):
            out = np.stack([np.broadcast_to(np.asarray(o, dtype=float), (P,)) for o in out])
        out = np.asarray(out, dtype=float)
    else:
        out = np.asarray(field, dtype=float)
        if out.ndim:
            q = jet.x[:, 0] if grid.dim == 1 else jet.x
            spd = kind == "tensor" and out.ndim == grid.dim + (grid.dim == 2)
            out = resample_spd(out, q) if spd else resample_field(out, q)
    if out.ndim == 0:
        out = np.full(P, float(out))
    if grid.dim == 2 and out.ndim == 1:
        if kind == "tensor":
            out = np.stack([out, np.zeros(P), out])
        elif kind == "vector":
            out = np.stack([out, out])
    return out


def _to_grid(values: np.ndarray, grid: Grid) -> np.ndarray:
    return np.ascontiguousarray(values.reshape(values.shape[:-1] + grid.shape))


def _tensor(comp: np.ndarray, dim: int) -> np.ndarray:
    """Packed components ``(C, P)`` to matrices ``(P, D, D)``."""
    if dim == 1:
        return comp.reshape(-1)[:, None, None]
    a11, a12, a22 = comp
    return np.stack([np.stack([a11, a12], -1), np.stack([a12, a22], -1)], -2)


def _pack(mat: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return mat[:, 0, 0]
    return np.stack([mat[:, 0, 0], 0.5 * (mat[:, 0, 1] + mat[:, 1, 0]), mat[:, 1, 1]])


def _vector(comp: np.ndarray, dim: int) -> np.ndarray:
    return comp.reshape(-1)[:, None] if dim == 1 else np.moveaxis(comp, 0, -1)


def _unvector(vec: np.ndarray, dim: int) -> np.ndarray:
    return vec[:, 0] if dim == 1 else np.moveaxis(vec, -1, 0)


def _congruence(inv: np.ndarray, A: np.ndarray) -> np.ndarray:
    """``(inv A inv^T)[k, b] = inv[k, a] A[a, j] inv[b, j]``."""
    return np.einsum("pka,paj,pbj->pkb", inv, A, inv)


def transform_elliptic(fields: EllipticFields, m: Map1D | Map2D, grid: Grid) -> EllipticFields:
    """``u~ = u(x)``, ``a~ = J inv a inv^T``, ``f~ = J f(x)``."""
    jet = _grid_jet(m, grid)
    D = grid.dim
    a = _tensor(_at(fields.a, jet, grid, "tensor"), D)
    a_new = jet.det[:, None, None] * _congruence(jet.inv_jac, a)
    f_new = jet.det * _at(fields.f, jet, grid)
    u_new = _at(fields.u, jet, grid)
    return EllipticFields(_to_grid(_pack(a_new, D), grid), _to_grid(f_new, grid),
                          _to_grid(u_new, grid))


def transform_convdiff(fields: ConvDiffFields, m: Map1D | Map2D, grid: Grid) -> ConvDiffFields:
    """``phi~ = J phi(x)``, ``a~ = inv a inv^T``, ``v~ = inv v + a~ grad(log J)``."""
    jet = _grid_jet(m, grid)
    D = grid.dim
    a_new = _congruence(jet.inv_jac, _tensor(_at(fields.a, jet, grid, "tensor"), D))
    v = _vector(_at(fields.v, jet, grid, "vector"), D)
    v_new = np.einsum("pki,pi->pk", jet.inv_jac, v) + np.einsum("pkb,pb->pk", a_new, jet.dlogJ)
    phi0_new = jet.det * _at(fields.phi0, jet, grid)
    phi = _at(fields.phi, jet, grid)
    phi_new = None if phi is None else _to_grid(jet.det * phi, grid)
    return ConvDiffFields(_to_grid(_pack(a_new, D), grid), _to_grid(_unvector(v_new, D), grid),
                          _to_grid(phi0_new, grid), phi_new)


def transform_wave(fields: WaveFields, m: Map1D | Map2D, grid: Grid) -> WaveFields:
    """``rho~ = rho(x)``, ``c~ = inv c inv^T``, ``v~^a = inv v - c^{kj} d2xi^a_{kj}``."""
    jet = _grid_jet(m, grid)
    D = grid.dim
    c = _tensor(_at(fields.c, jet, grid, "tensor"), D)
    c_new = _congruence(jet.inv_jac, c)
    v = _vector(_at(fields.v, jet, grid, "vector"), D)
    v_new = np.einsum("pai,pi->pa", jet.inv_jac, v) - np.einsum("pkj,pakj->pa", c, jet.d2xi)
    rho = _at(fields.rho, jet, grid)
    return WaveFields(_to_grid(_pack(c_new, D), grid), _to_grid(_unvector(v_new, D), grid),
                      _to_grid(_at(fields.rho0, jet, grid), grid),
                      None if rho is None else _to_grid(rho, grid),
                      _to_grid(_at(fields.e, jet, grid), grid))


_TRANSFORMS = {ELLIPTIC: transform_elliptic, CONVDIFF: transform_convdiff}


def transform_fields(kind: str, fields, m, grid: Grid):
    return _TRANSFORMS.get(kind, transform_wave)(fields, m, grid)


# ---------------------------------------------------------------------------
# Sample / dataset augmentation
# ---------------------------------------------------------------------------


def sample_grid(sample: Sample) -> Grid:
    return Grid(dimension(sample.equation), sample.target.shape[-1])


def augment_sample(sample: Sample, m: Map1D | Map2D) -> Sample:
    """Apply ``m`` to every channel of ``sample``; the map is recorded in provenance."""
    grid = sample_grid(sample)
    if m.dim != grid.dim:
        raise ValueError("map dimension does not match sample dimension")
    new = transform_fields(family(sample.equation), sample_to_fields(sample), m, grid)
    out = fields_to_sample(sample.equation, new, sample.provenance)
    aug = {**out.provenance.get("augmentation", {}), "map": m.to_json()}
    return out.with_provenance(augmentation=aug)


def random_map(rng: np.random.Generator, dim: int, n_modes: int | None = None,
               beta: float | None = None):
    """Map drawn from the default 1D (``N=5, beta=1``) or 2D (``N=5, beta=1e-5``) recipe."""
    if dim == 1:
        return random_map_1d(rng, n_modes or 5, 1.0 if beta is None else beta)
    return random_map_2d(rng, n_modes or 5, 1e-5 if beta is None else beta)


def augment_dataset(samples: list[Sample], m: int, master_seed: int, *,
                    n_modes: int | None = None, beta: float | None = None,
                    jobs: int = 1) -> list[Sample]:
    """Originals followed by ``m`` random-map replicas of each original.

    Replica ``r`` of sample ``i`` draws its map from ``derive_rng(master_seed, i, r)``,
    so the output does not depend on ``jobs``.
    """
    if m < 0:
        raise ValueError("augmentation factor must be non-negative")
    tasks = [(i, r) for i in range(len(samples)) for r in range(m)]

    def work(task):
        i, r = task
        src = samples[i]
        mp = random_map(derive_rng(master_seed, i, r), dimension(src.equation), n_modes, beta)
        out = augment_sample(src, mp)
        aug = {**out.provenance["augmentation"], "source": i, "replica": r,
               "seed": [int(master_seed), i, r]}
        return out.with_provenance(augmentation=aug)

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            augmented = list(pool.map(work, tasks))
    else:
        augmented = [work(t) for t in tasks]
    return list(samples) + augmented
