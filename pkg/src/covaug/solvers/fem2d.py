"""Bilinear quadrilateral elements on the uniform ``n x n`` node grid.

Node ``(i, j)`` (``x`` index first) has global number ``i * n + j``.  Element
``(i, j)`` owns nodes ``(i, j), (i+1, j), (i+1, j+1), (i, j+1)``.  All element
integrals use 2x2 Gauss quadrature.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse

from ..grid import sample_2d

_G = 1.0 / np.sqrt(3.0)
# reference coordinates in [-1, 1]^2 of the quadrature points (unit weights)
_QR = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])
# local node corners in reference coordinates
_CORNERS = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)


def _shape(q):
    r, s = q
    return 0.25 * (1 + _CORNERS[:, 0] * r) * (1 + _CORNERS[:, 1] * s)


def _shape_grad(q):
    """d N_a / d(r, s), shape (4, 2)."""
    r, s = q
    return 0.25 * np.stack([_CORNERS[:, 0] * (1 + _CORNERS[:, 1] * s),
                            _CORNERS[:, 1] * (1 + _CORNERS[:, 0] * r)], axis=1)


_N = np.stack([_shape(q) for q in _QR])          # (Q, 4)
_DN = np.stack([_shape_grad(q) for q in _QR])    # (Q, 4, 2)


class BilinearMesh:
    def __init__(self, n: int):
        if n < 3:
            raise ValueError("n must be at least 3")
        self.n = n
        self.h = 1.0 / (n - 1)
        i, j = np.meshgrid(np.arange(n - 1), np.arange(n - 1), indexing="ij")
        i, j = i.ravel(), j.ravel()
        self.elements = np.stack([i * n + j, (i + 1) * n + j,
                                  (i + 1) * n + j + 1, i * n + j + 1], axis=1)
        x0, y0 = i * self.h, j * self.h
        self.qx = x0[:, None] + 0.5 * self.h * (1 + _QR[None, :, 0])
        self.qy = y0[:, None] + 0.5 * self.h * (1 + _QR[None, :, 1])
        self.detJ = 0.25 * self.h**2
        self.grad = _DN * (2.0 / self.h)            # physical gradients (Q, 4, 2)
        on_edge = np.zeros((n, n), dtype=bool)
        on_edge[0, :] = on_edge[-1, :] = on_edge[:, 0] = on_edge[:, -1] = True
        self.interior = np.flatnonzero(~on_edge.ravel())

    def at_quadrature(self, field) -> np.ndarray:
        """Field values at quadrature points, shape ``(E, Q)``.

        Nodal ``(n, n)`` arrays are interpolated with the element shape functions.
        """
        if not callable(field) and np.ndim(field) == 2:
            nodal = np.asarray(field, dtype=float).reshape(-1)
            return nodal[self.elements] @ _N.T
        return sample_2d(field, self.qx, self.qy)

    def _assemble(self, local: np.ndarray) -> sparse.csr_matrix:
        rows = np.repeat(self.elements, 4, axis=1).ravel()
        cols = np.tile(self.elements, (1, 4)).ravel()
        N = self.n * self.n
        return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(N, N)).tocsr()

    def stiffness(self, a11, a12, a22) -> sparse.csr_matrix:
        """``K_ab = int grad N_a . A grad N_b`` with ``A`` given at quadrature points."""
        g = self.grad
        gx, gy = g[..., 0], g[..., 1]          # (Q, 4)
        xx = np.einsum("qa,qb->qab", gx, gx)
        xy = np.einsum("qa,qb->qab", gx, gy)
        yy = np.einsum("qa,qb->qab", gy, gy)
        local = self.detJ * (np.einsum("eq,qab->eab", a11, xx)
                             + np.einsum("eq,qab->eab", a12, xy + xy.transpose(0, 2, 1))
                             + np.einsum("eq,qab->eab", a22, yy))
        return self._assemble(local)

    def mass(self) -> sparse.csr_matrix:
        local = self.detJ * np.einsum("qa,qb->ab", _N, _N)
        return self._assemble(np.broadcast_to(local, (len(self.elements), 4, 4)))

    def convection(self, v1, v2) -> sparse.csr_matrix:
        """``B_ab = int (v . grad N_a) N_b``, the weak form of ``-div(v phi)`` tested by ``N_a``."""
        g = self.grad
        local = self.detJ * (np.einsum("eq,qa,qb->eab", v1, g[..., 0], _N)
                             + np.einsum("eq,qa,qb->eab", v2, g[..., 1], _N))
        return self._assemble(local)

    def load(self, fq) -> np.ndarray:
        local = self.detJ * np.einsum("eq,qa->ea", fq, _N)
        out = np.zeros(self.n * self.n)
        np.add.at(out, self.elements.ravel(), local.ravel())
        return out

    def restrict(self, M: sparse.csr_matrix) -> sparse.csc_matrix:
        idx = self.interior
        return M[idx][:, idx].tocsc()
