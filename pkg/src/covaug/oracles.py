"""Closed-form solutions used to check solvers and transformed equations.

``ConvDiffExact`` solves ``phi_t + phi_x = phi_xx`` on ``[0, 1]`` with zero
Dirichlet data.  ``EllipticExact`` solves ``phi'' + phi' = f`` for a
trigonometric ``f``; since ``phi'' + phi' = e^{-x} (e^x phi')'`` it also
provides the stationary-diffusion triple ``a = e^x, f_div = e^x f, u = phi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConvDiffExact:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float).reshape(-1))

    def _parts(self, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        k = np.arange(1, self.coeffs.size + 1) * np.pi
        decay = np.exp(-np.multiply.outer(t, k**2)) * self.coeffs
        arg = np.multiply.outer(x, k)
        env = np.exp(x / 2 - t / 4)
        s = (np.sin(arg) * decay).sum(-1)
        ds = (k * np.cos(arg) * decay).sum(-1)
        dds = (-(k**2) * np.sin(arg) * decay).sum(-1)
        dts = (-(k**2) * np.sin(arg) * decay).sum(-1)
        return env, s, ds, dds, dts

    def __call__(self, x, t=0.0):
        env, s, *_ = self._parts(x, t)
        return env * s

    def initial(self, x):
        return self(x, 0.0)

    def derivatives(self, x, t):
        """``(phi, phi_t, phi_x, phi_xx)``."""
        env, s, ds, dds, dts = self._parts(x, t)
        phi = env * s
        phi_t = env * (dts - s / 4)
        phi_x = env * (s / 2 + ds)
        phi_xx = env * (s / 4 + ds + dds)
        return phi, phi_t, phi_x, phi_xx


def exact_convdiff(oracle: ConvDiffExact, x, t):
    return oracle(x, t)


def _particular(a0, a, b, x):
    """Particular solution and its first two derivatives."""
    x = np.asarray(x, dtype=float)
    n = np.arange(1, a.size + 1)
    sc = (a - n * b) / (n * (n**2 + 1))
    cc = -(b + n * a) / (n * (n**2 + 1))
    arg = np.multiply.outer(x, n)
    s, c = np.sin(arg), np.cos(arg)
    S = a0 * x + s @ sc + c @ cc
    dS = a0 + c @ (n * sc) - s @ (n * cc)
    ddS = -s @ (n**2 * sc) - c @ (n**2 * cc)
    return S, dS, ddS


def fit_elliptic_constants(a_coeffs, b_coeffs):
    """``(c1, c2)`` such that ``S(x) - c1 e^{-x} + c2`` vanishes at 0 and 1."""
    a_coeffs = np.asarray(a_coeffs, dtype=float).reshape(-1)
    b_coeffs = np.asarray(b_coeffs, dtype=float).reshape(-1)
    S0 = _particular(a_coeffs[0], a_coeffs[1:], b_coeffs, 0.0)[0]
    S1 = _particular(a_coeffs[0], a_coeffs[1:], b_coeffs, 1.0)[0]
    mat = np.array([[-1.0, 1.0], [-np.exp(-1.0), 1.0]])
    c1, c2 = np.linalg.solve(mat, [-S0, -S1])
    return float(c1), float(c2)


@dataclass(frozen=True)
class EllipticExact:
    """``a_coeffs = (a_0, a_1..a_N)``, ``b_coeffs = (b_1..b_N)``."""

    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    c1: float | None = None
    c2: float | None = None

    def __post_init__(self):
        a = np.asarray(self.a_coeffs, dtype=float).reshape(-1)
        b = np.asarray(self.b_coeffs, dtype=float).reshape(-1)
        if a.size != b.size + 1:
            raise ValueError("need N+1 cosine coefficients (incl. a_0) and N sine coefficients")
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "b_coeffs", b)
        if self.c1 is None or self.c2 is None:
            c1, c2 = fit_elliptic_constants(a, b)
            object.__setattr__(self, "c1", c1)
            object.__setattr__(self, "c2", c2)

    def rhs(self, x):
        x = np.asarray(x, dtype=float)
        n = np.arange(1, self.b_coeffs.size + 1)
        arg = np.multiply.outer(x, n)
        return self.a_coeffs[0] + np.cos(arg) @ self.a_coeffs[1:] + np.sin(arg) @ self.b_coeffs

    def derivatives(self, x):
        """``(phi, phi', phi'')``."""
        S, dS, ddS = _particular(self.a_coeffs[0], self.a_coeffs[1:], self.b_coeffs, x)
        e = np.exp(-np.asarray(x, dtype=float))
        return S - self.c1 * e + self.c2, dS + self.c1 * e, ddS - self.c1 * e

    def __call__(self, x):
        return self.derivatives(x)[0]

    def diffusion_triple(self):
        """Callables ``(a, f, u)`` solving ``(a u')' = f`` on ``[0, 1]``."""
        return np.exp, (lambda x: np.exp(x) * self.rhs(x)), self

    @classmethod
    def random(cls, rng: np.random.Generator, N: int = 3) -> "EllipticExact":
        return cls(rng.standard_normal(N + 1), rng.standard_normal(N))


def exact_elliptic(oracle: EllipticExact, x):
    return oracle(x)
