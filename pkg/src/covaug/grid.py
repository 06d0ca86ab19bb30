"""Uniform node-centred grids on the unit interval/square and field sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.n < 3:
            raise ValueError("grid needs at least 3 points per axis")

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    def points(self) -> np.ndarray:
        """Node coordinates, ``(n,)`` in 1D and ``(n*n, 2)`` (``ij`` order) in 2D."""
        g = self.axis
        if self.dim == 1:
            return g
        return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)

    def mesh(self):
        g = self.axis
        return np.meshgrid(g, g, indexing="ij")

    def to_json(self) -> dict:
        return {"dim": self.dim, "n": self.n}


@dataclass(frozen=True)
class SpaceTimeField:
    """All time levels of a Dirichlet solution, ``values[t_index, ...space]``."""

    values: np.ndarray
    t_final: float

    @property
    def nt(self) -> int:
        return self.values.shape[0]

    @property
    def dt(self) -> float:
        return self.t_final / (self.nt - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.nt)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]


# Fields may be given as callables, scalars, or nodal arrays.

def sample_1d(field, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if callable(field):
        return np.broadcast_to(np.asarray(field(x), dtype=float), x.shape).copy()
    arr = np.asarray(field, dtype=float)
    if arr.ndim == 0:
        return np.full(x.shape, float(arr))
    if arr.shape != x.shape:
        raise ValueError(f"nodal field of shape {arr.shape} does not match grid {x.shape}")
    return arr.copy()


def midpoints_1d(field, x) -> np.ndarray:
    """Field at cell midpoints; nodal arrays are averaged."""
    x = np.asarray(x, dtype=float)
    mid = 0.5 * (x[1:] + x[:-1])
    if callable(field) or np.ndim(field) == 0:
        return sample_1d(field, mid)
    arr = sample_1d(field, x)
    return 0.5 * (arr[1:] + arr[:-1])


def sample_2d(field, X, Y) -> np.ndarray:
    if callable(field):
        return np.broadcast_to(np.asarray(field(X, Y), dtype=float), X.shape).copy()
    arr = np.asarray(field, dtype=float)
    if arr.ndim == 0:
        return np.full(X.shape, float(arr))
    if arr.shape != X.shape:
        raise ValueError(f"nodal field of shape {arr.shape} does not match grid {X.shape}")
    return arr.copy()


def sample_tensor_2d(field, X, Y):
    """Symmetric matrix field as ``(a11, a12, a22)``.

    Accepts an object returning that triple when called, a triple of
    scalar fields, or a scalar field meaning ``field * I``.
    """
    if isinstance(field, (tuple, list)):
        return tuple(sample_2d(f, X, Y) for f in field)
    if callable(field):
        out = field(X, Y)
        if isinstance(out, tuple):
            return tuple(np.broadcast_to(np.asarray(o, dtype=float), X.shape).copy() for o in out)
        s = np.broadcast_to(np.asarray(out, dtype=float), X.shape).copy()
        return s, np.zeros_like(s), s.copy()
    s = sample_2d(field, X, Y)
    return s, np.zeros_like(s), s.copy()


def sample_vector_2d(field, X, Y):
    if field is None:
        z = np.zeros(X.shape)
        return z, z.copy()
    if isinstance(field, (tuple, list)):
        return sample_2d(field[0], X, Y), sample_2d(field[1], X, Y)
    out = field(X, Y)
    return (np.broadcast_to(np.asarray(out[0], dtype=float), X.shape).copy(),
            np.broadcast_to(np.asarray(out[1], dtype=float), X.shape).copy())
