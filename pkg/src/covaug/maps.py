"""Random smooth bijections of the unit square and their derivative jets.

One-dimensional maps are cumulative distribution functions of strictly
positive trigonometric densities; two-dimensional maps blend four of them
by linear transfinite interpolation.  Every map exposes closed-form first
and second derivatives, from which :func:`jacobi_jet` assembles the inverse
Jacobian, its second derivatives and the gradient of the determinant.

Index conventions (batched over points ``P``)::

    jac[p, i, a]       = dx^i / dxi^a
    inv_jac[p, a, i]   = dxi^a / dx^i
    d2x[p, r, g, b]    = d^2 x^r / dxi^g dxi^b
    d2xi[p, a, i, j]   = d^2 xi^a / dx^i dx^j
    dJ[p, k]           = dJ / dxi^k
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SINGULAR_JACOBIAN = 1e-14
_POSITIVITY_GRID = 2048


class MapError(ValueError):
    """Invalid coordinate-map parameters."""


class NonMonotoneMapError(MapError):
    """The density behind a 1D map is not strictly positive."""


class SingularJacobianError(ArithmeticError):
    """The Jacobian determinant is (numerically) zero."""


class DomainError(ValueError):
    """Evaluation point outside the unit interval / square."""


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


def _check_unit(xi: np.ndarray, slack: float = 1e-12) -> None:
    if xi.size and (np.min(xi) < -slack or np.max(xi) > 1 + slack):
        raise DomainError("coordinates must lie in [0, 1]")


# ---------------------------------------------------------------------------
# 1D maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrigDensityParams:
    """Coefficients of ``p(x) = 1 + sum_k (c_k cos 2pi k x + d_k sin 2pi k x) / c0``.

    Leave ``normalization`` as ``None`` to use the safe value
    ``c0 = sum(|c_k| + |d_k|) + beta``, which makes ``p >= beta / c0 > 0``.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    beta: float = 1.0
    normalization: float | None = None

    def __post_init__(self):
        c = _frozen(self.cos_coeffs)
        d = _frozen(self.sin_coeffs)
        if c.shape != d.shape:
            raise MapError("cos_coeffs and sin_coeffs must have equal length")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(d)):
            raise MapError("coefficients must be finite")
        if not self.beta > 0:
            raise MapError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "cos_coeffs", c)
        object.__setattr__(self, "sin_coeffs", d)
        c0 = self.safe_normalization if self.normalization is None else float(self.normalization)
        object.__setattr__(self, "normalization", c0)
        if c0 == 0 or self.min_density() <= 0:
            raise NonMonotoneMapError(
                f"normalization c0={c0:g} gives a non-positive density; map is not monotone")

    @property
    def n_modes(self) -> int:
        return self.cos_coeffs.size

    @property
    def safe_normalization(self) -> float:
        return float(np.abs(self.cos_coeffs).sum() + np.abs(self.sin_coeffs).sum() + self.beta)

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.arange(1, self.n_modes + 1)
        arg = 2 * np.pi * np.multiply.outer(x, k)
        series = np.cos(arg) @ self.cos_coeffs + np.sin(arg) @ self.sin_coeffs
        return 1.0 + series / self.normalization

    def min_density(self, n: int = _POSITIVITY_GRID) -> float:
        return float(self.density(np.linspace(0.0, 1.0, n)).min())

    @classmethod
    def from_amplitude_phase(cls, amplitudes, phases, beta: float = 1.0,
                             normalization: float | None = None) -> "TrigDensityParams":
        """Convert ``sum_k A_k cos(2 pi k x + phi_k)`` to cos/sin coefficients."""
        amps = np.asarray(amplitudes, dtype=float)
        ph = np.asarray(phases, dtype=float)
        if amps.shape != ph.shape:
            raise MapError("amplitudes and phases must have equal length")
        return cls(amps * np.cos(ph), -amps * np.sin(ph), beta, normalization)

    def to_json(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "cos_coeffs": self.cos_coeffs.tolist(),
            "sin_coeffs": self.sin_coeffs.tolist(),
            "beta": float(self.beta),
            "normalization": float(self.normalization),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrigDensityParams":
        params = cls(obj["cos_coeffs"], obj["sin_coeffs"], obj["beta"], obj["normalization"])
        if params.n_modes != int(obj.get("n_modes", params.n_modes)):
            raise MapError("n_modes does not match coefficient length")
        return params


@dataclass(frozen=True)
class Map1D:
    """CDF map ``y(xi) = xi + sum_k (c_k sin 2pi k xi + d_k (1 - cos 2pi k xi)) / (2 pi k c0)``."""

    params: TrigDensityParams
    dim: int = field(default=1, init=False)

    def evaluate(self, xi):
        """Return ``(y, dy/dxi, d2y/dxi2)`` with the shape of ``xi``."""
        xi = np.asarray(xi, dtype=float)
        _check_unit(xi)
        p = self.params
        k = np.arange(1, p.n_modes + 1)
        c, d, c0 = p.cos_coeffs, p.sin_coeffs, p.normalization
        w = 2 * np.pi * k
        arg = np.multiply.outer(xi, w)
        s, co = np.sin(arg), np.cos(arg)
        y = xi + (s @ (c / (w * c0)) + (1 - co) @ (d / (w * c0)))
        dy = 1 + (co @ c + s @ d) / c0
        d2y = (-s @ (c * w) + co @ (d * w)) / c0
        return y, dy, d2y

    __call__ = evaluate

    def to_json(self) -> dict:
        return {"kind": "map1d", "params": self.params.to_json()}


def build_map_1d(params: TrigDensityParams) -> Map1D:
    return Map1D(params)


def eval_map_1d(m: Map1D, xi):
    return m.evaluate(xi)


def identity_map_1d() -> Map1D:
    return Map1D(TrigDensityParams([], []))


def random_map_1d(rng: np.random.Generator, n_modes: int = 5, beta: float = 1.0) -> Map1D:
    """Density ``beta + sum_i A_i cos(2 pi i x + phi_i)`` with standard normal ``A, phi``.

    The safe normalization is always used so the map is a bijection.
    """
    amps = rng.standard_normal(n_modes)
    phases = rng.standard_normal(n_modes)
    return Map1D(TrigDensityParams.from_amplitude_phase(amps, phases, beta))


def random_edge_map(rng: np.random.Generator, n_modes: int = 5, beta: float = 1e-5,
                    normalization: float = 1.0) -> Map1D:
    """Edge map for 2D grids: fixed ``c0`` unless the density dips to zero.

    When ``min p <= 0`` on the probe grid the safe normalization replaces
    the fixed one.
    """
    c = rng.standard_normal(n_modes)
    d = rng.standard_normal(n_modes)
    try:
        return Map1D(TrigDensityParams(c, d, beta, normalization))
    except NonMonotoneMapError:
        return Map1D(TrigDensityParams(c, d, beta))


# ---------------------------------------------------------------------------
# 2D maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Map2D:
    """Transfinite blend of four edge maps.

    ``x1 = y1(xi1)(1 - xi2) + y2(xi1) xi2`` and
    ``x2 = y3(xi2)(1 - xi1) + y4(xi2) xi1``.
    """

    y1: Map1D
    y2: Map1D
    y3: Map1D
    y4: Map1D
    dim: int = field(default=2, init=False)

    def evaluate(self, xi):
        """Return ``(x, jac, d2x)`` for points of shape ``(P, 2)``."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        if xi.shape[-1] != 2:
            raise DomainError("2D map expects points of shape (P, 2)")
        _check_unit(xi)
        s, t = xi[:, 0], xi[:, 1]
        a1, da1, dda1 = self.y1.evaluate(s)
        a2, da2, dda2 = self.y2.evaluate(s)
        b3, db3, ddb3 = self.y3.evaluate(t)
        b4, db4, ddb4 = self.y4.evaluate(t)

        P = xi.shape[0]
        x = np.empty((P, 2))
        x[:, 0] = a1 * (1 - t) + a2 * t
        x[:, 1] = b3 * (1 - s) + b4 * s

        jac = np.empty((P, 2, 2))
        jac[:, 0, 0] = da1 * (1 - t) + da2 * t
        jac[:, 0, 1] = a2 - a1
        jac[:, 1, 0] = b4 - b3
        jac[:, 1, 1] = db3 * (1 - s) + db4 * s

        d2x = np.zeros((P, 2, 2, 2))
        d2x[:, 0, 0, 0] = dda1 * (1 - t) + dda2 * t
        d2x[:, 0, 0, 1] = d2x[:, 0, 1, 0] = da2 - da1
        d2x[:, 1, 1, 1] = ddb3 * (1 - s) + ddb4 * s
        d2x[:, 1, 0, 1] = d2x[:, 1, 1, 0] = db4 - db3
        return x, jac, d2x

    __call__ = evaluate

    @property
    def edges(self) -> tuple[Map1D, Map1D, Map1D, Map1D]:
        return (self.y1, self.y2, self.y3, self.y4)

    def to_json(self) -> dict:
        return {"kind": "map2d", "edges": [e.params.to_json() for e in self.edges]}


def build_map_2d(y1: Map1D, y2: Map1D, y3: Map1D, y4: Map1D) -> Map2D:
    return Map2D(y1, y2, y3, y4)


def identity_map_2d() -> Map2D:
    e = identity_map_1d()
    return Map2D(e, e, e, e)


def random_map_2d(rng: np.random.Generator, n_modes: int = 5, beta: float = 1e-5,
                  normalization: float = 1.0, check_n: int = 65,
                  max_tries: int = 100) -> Map2D:
    """Draw four edge maps and blend them; redraw if ``J <= 0`` on a check grid."""
    g = np.linspace(0.0, 1.0, check_n)
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    for _ in range(max_tries):
        m = Map2D(*(random_edge_map(rng, n_modes, beta, normalization) for _ in range(4)))
        _, jac, _ = m.evaluate(pts)
        if np.linalg.det(jac).min() > SINGULAR_JACOBIAN:
            return m
    raise MapError(f"no map with positive Jacobian after {max_tries} draws")


def map_from_json(obj: dict) -> Map1D | Map2D:
    if obj["kind"] == "map1d":
        return Map1D(TrigDensityParams.from_json(obj["params"]))
    if obj["kind"] == "map2d":
        return Map2D(*(Map1D(TrigDensityParams.from_json(e)) for e in obj["edges"]))
    raise MapError(f"unknown map kind {obj['kind']!r}")


# ---------------------------------------------------------------------------
# Jacobian calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobiJet:
    point: np.ndarray
    x: np.ndarray
    jac: np.ndarray
    det: np.ndarray
    inv_jac: np.ndarray
    d2x: np.ndarray
    d2xi: np.ndarray
    dJ: np.ndarray

    @property
    def dim(self) -> int:
        return self.jac.shape[-1]

    @property
    def dlogJ(self) -> np.ndarray:
        """``(1/J) dJ/dxi^k``."""
        return self.dJ / self.det[:, None]


def _raw_jet(m, xi):
    """Points (P, D), x (P, D), jac (P, D, D), d2x (P, D, D, D)."""
    if m.dim == 1:
        xi = np.asarray(xi, dtype=float).reshape(-1)
        y, dy, d2y = m.evaluate(xi)
        return xi[:, None], y[:, None], dy[:, None, None], d2y[:, None, None, None]
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    x, jac, d2x = m.evaluate(xi)
    return xi, x, jac, d2x


def jet_from_derivatives(point, x, jac, d2x) -> JacobiJet:
    """Assemble a :class:`JacobiJet` from first and second derivatives of ``x(xi)``."""
    det = np.linalg.det(jac)
    if np.any(~np.isfinite(det)) or np.any(np.abs(det) < SINGULAR_JACOBIAN):
        raise SingularJacobianError("|det J| below 1e-14")
    inv = np.linalg.inv(jac)
    d2xi = -np.einsum("pgi,pth,pak,pkgt->paih", inv, inv, inv, d2x, optimize=True)
    dJ = det[:, None] * np.einsum("pmi,pimk->pk", inv, d2x)
    return JacobiJet(point, x, jac, det, inv, d2x, d2xi, dJ)


def jacobi_jet(m: Map1D | Map2D, xi) -> JacobiJet:
    return jet_from_derivatives(*_raw_jet(m, xi))


@dataclass(frozen=True)
class IdentityReport:
    inverse: float
    det_gradient: float
    inverse_hessian: float
    divergence: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.inverse, self.det_gradient, self.inverse_hessian, self.divergence) <= self.tol

    def to_json(self) -> dict:
        return {"inverse": self.inverse, "det_gradient": self.det_gradient,
                "inverse_hessian": self.inverse_hessian, "divergence": self.divergence,
                "tol": self.tol, "passed": self.passed}


def _rel(err: np.ndarray, ref: np.ndarray) -> float:
    """Largest pointwise error over a unit-floored reference magnitude."""
    axes = tuple(range(1, err.ndim))
    scale = np.maximum(np.abs(ref).max(axis=axes) if axes else np.abs(ref), 1.0)
    e = np.abs(err).max(axis=axes) if axes else np.abs(err)
    return float((e / scale).max()) if e.size else 0.0


def check_calculus_identities(m: Map1D | Map2D, points, tol: float = 1e-6,
                              step: float = 1e-5) -> IdentityReport:
    """Compare the analytic jet against central finite differences.

    Checked: ``jac @ inv_jac = I``, the determinant-gradient formula, the
    inverse-map Hessian formula, and ``(1/J) d/dxi^j (J dxi^j/dx^i) = 0``.
    Points must sit at least ``step`` away from the boundary.
    """
    jet = jacobi_jet(m, points)
    P, D = jet.point.shape
    eye = np.eye(D)
    inverse = float(np.abs(jet.jac @ jet.inv_jac - eye).max()) if P else 0.0

    # d/dxi^k of det, inv_jac and J*inv_jac, by central differences
    ddet = np.empty((P, D))
    dinv = np.empty((P, D, D, D))        # [p, a, i, k] = d inv[a, i] / dxi^k
    div = np.zeros((P, D))
    div_scale = np.zeros((P, D))
    for k in range(D):
        shift = np.zeros(D)
        shift[k] = step
        jp = jacobi_jet(m, jet.point + shift if D > 1 else (jet.point + shift)[:, 0])
        jm = jacobi_jet(m, jet.point - shift if D > 1 else (jet.point - shift)[:, 0])
        ddet[:, k] = (jp.det - jm.det) / (2 * step)
        dinv[..., k] = (jp.inv_jac - jm.inv_jac) / (2 * step)
        # sum over j = k of d/dxi^k (J inv[k, i])
        term = ((jp.det[:, None] * jp.inv_jac[:, k, :])
                - (jm.det[:, None] * jm.inv_jac[:, k, :])) / (2 * step)
        div += term
        div_scale += np.abs(term)

    det_gradient = _rel(jet.dJ - ddet, ddet)
    d2xi_fd = np.einsum("paik,pkj->paij", dinv, jet.inv_jac)
    inverse_hessian = _rel(jet.d2xi - d2xi_fd, d2xi_fd)
    divergence = float((np.abs(div) / np.maximum(div_scale, 1.0)).max()) if P else 0.0
    return IdentityReport(inverse, det_gradient, inverse_hessian, divergence, tol)


def grid_distortion(m: Map1D | Map2D, n: int) -> float:
    """Largest sup-norm displacement ``|x(xi) - xi|`` over the uniform ``n^D`` grid."""
    if n < 2:
        raise ValueError("n must be at least 2")
    g = np.linspace(0.0, 1.0, n)
    if m.dim == 1:
        return float(np.abs(m.evaluate(g)[0] - g).max())
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    return float(np.abs(m.evaluate(pts)[0] - pts).max())
