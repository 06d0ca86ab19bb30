"""Random coefficient functions with closed-form evaluation.

Two 1D families are provided: a phase-shifted cosine series on ``k = 0..N``
(optionally shifted to be positive) and a sine series on ``sin(pi (k+1) x)``
that vanishes at both endpoints.  In 2D a truncated complex Fourier series
is used, and SPD matrix fields are built as ``I + L L^T`` from three of them.

Seeds are derived with :func:`derive_rng`, so sample ``i`` of a dataset does
not depend on how many samples were drawn before it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COS_PHASE = "cos_phase"
SIN_DIRICHLET = "sin_dirichlet"


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream ``(master_seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(ss)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class TrigField1D:
    kind: str
    coeffs: np.ndarray
    phases: np.ndarray | None = None
    decay: bool = False
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in (COS_PHASE, SIN_DIRICHLET):
            raise ValueError(f"unknown field kind {self.kind!r}")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float).reshape(-1))
        if self.kind == COS_PHASE:
            ph = np.zeros_like(self.coeffs) if self.phases is None else self.phases
            object.__setattr__(self, "phases", np.asarray(ph, dtype=float).reshape(-1))

    @property
    def n(self) -> int:
        """Highest mode index ``N`` (modes run over ``k = 0..N``)."""
        return self.coeffs.size - 1

    def weights(self) -> np.ndarray:
        """Effective per-mode amplitudes, including decay and scale."""
        w = self.coeffs * self.scale
        if self.decay:
            k = np.maximum(np.arange(self.coeffs.size), 1)
            w = w / k**2
        return w

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(self.coeffs.size)
        if self.kind == COS_PHASE:
            basis = np.cos(2 * np.pi * np.multiply.outer(x, k) + self.phases)
        else:
            basis = np.sin(np.pi * np.multiply.outer(x, k + 1))
        return basis @ self.weights()

    def to_json(self) -> dict:
        out = {"kind": self.kind, "coeffs": self.coeffs.tolist(),
               "decay": self.decay, "scale": float(self.scale)}
        if self.kind == COS_PHASE:
            out["phases"] = self.phases.tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "TrigField1D":
        return cls(obj["kind"], obj["coeffs"], obj.get("phases"), obj.get("decay", False),
                   obj.get("scale", 1.0))


def sample_cos_field(rng_seed, N: int, scale: float = 1.0, positive: bool = False,
                     epsilon: float = 1e-2, decay: bool = False) -> TrigField1D:
    """``s * sum_{k=0}^N c_k cos(2 pi k x + p_k)`` with standard normal ``c, p``.

    With ``positive`` the constant mode is replaced by ``p_0 = 0``,
    ``c_0 = sum_{k>0} |c_k| + epsilon`` so the field is at least ``s * epsilon``.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if positive and not epsilon > 0:
        raise ValueError("epsilon must be positive for a positive field")
    rng = _rng(rng_seed)
    c = rng.standard_normal(N + 1)
    p = rng.standard_normal(N + 1)
    if positive:
        p[0] = 0.0
        tail = np.abs(c[1:])
        if decay:
            tail = tail / np.arange(1, N + 1) ** 2
        c[0] = tail.sum() + epsilon
    return TrigField1D(COS_PHASE, c, p, decay, scale)


def sample_sin_field(rng_seed, N: int, scale: float = 1.0, decay: bool = False) -> TrigField1D:
    """``s * sum_{k=0}^N c_k sin(pi (k+1) x)``; zero at both ends."""
    if N < 0:
        raise ValueError("N must be non-negative")
    c = _rng(rng_seed).standard_normal(N + 1)
    return TrigField1D(SIN_DIRICHLET, c, None, decay, scale)


# ---------------------------------------------------------------------------
# 2D
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fourier2DField:
    """``s * Re sum_{m,n=-M}^{M} c_mn exp(2 pi i (m x + n y))``."""

    m_max: int
    coeffs: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        size = 2 * self.m_max + 1
        if c.shape != (size, size):
            raise ValueError(f"coeffs must have shape ({size}, {size})")
        object.__setattr__(self, "coeffs", c)

    def _basis(self, x):
        m = np.arange(-self.m_max, self.m_max + 1)
        return np.exp(2j * np.pi * np.multiply.outer(np.asarray(x, dtype=float), m))

    def __call__(self, x, y):
        """Pointwise evaluation; ``x`` and ``y`` broadcast together."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        ex, ey = self._basis(x), self._basis(y)
        val = np.einsum("...m,mn,...n->...", ex, self.coeffs, ey)
        return self.scale * val.real

    def on_grid(self, gx, gy=None):
        """Values on the tensor grid ``gx x gy`` (``ij`` indexing)."""
        gy = gx if gy is None else gy
        return self.scale * (self._basis(gx) @ self.coeffs @ self._basis(gy).T).real

    def to_json(self) -> dict:
        return {"m_max": self.m_max, "re": self.coeffs.real.tolist(),
                "im": self.coeffs.imag.tolist(), "scale": float(self.scale)}

    @classmethod
    def from_json(cls, obj: dict) -> "Fourier2DField":
        c = np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])
        return cls(obj["m_max"], c, obj.get("scale", 1.0))


def sample_fourier_2d(rng_seed, M: int, scale: float = 1.0) -> Fourier2DField:
    if M < 0:
        raise ValueError("M must be non-negative")
    rng = _rng(rng_seed)
    size = 2 * M + 1
    c = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return Fourier2DField(M, c, scale)


def _zero_field() -> Fourier2DField:
    return Fourier2DField(0, np.zeros((1, 1)))


@dataclass(frozen=True)
class SPDField2D:
    """``A = I + L L^T`` with ``L = [[|l11|, 0], [l21, |l22|]]``.

    With ``diagonal`` set the off-diagonal entry is dropped and ``A22 = A11``.
    """

    l11: Fourier2DField
    l21: Fourier2DField
    l22: Fourier2DField
    diagonal: bool = False

    @staticmethod
    def _assemble(l11, l21, l22, diagonal):
        l11, l22 = np.abs(l11), np.abs(l22)
        a11 = 1.0 + l11**2
        if diagonal:
            return a11, np.zeros_like(a11), a11.copy()
        return a11, l11 * l21, 1.0 + l21**2 + l22**2

    def __call__(self, x, y):
        """``(a11, a12, a22)`` at the broadcast points."""
        return self._assemble(self.l11(x, y), self.l21(x, y), self.l22(x, y), self.diagonal)

    def on_grid(self, gx, gy=None):
        return self._assemble(self.l11.on_grid(gx, gy), self.l21.on_grid(gx, gy),
                              self.l22.on_grid(gx, gy), self.diagonal)

    def to_json(self) -> dict:
        return {"l11": self.l11.to_json(), "l21": self.l21.to_json(),
                "l22": self.l22.to_json(), "diagonal": self.diagonal}

    @classmethod
    def from_json(cls, obj: dict) -> "SPDField2D":
        return cls(Fourier2DField.from_json(obj["l11"]), Fourier2DField.from_json(obj["l21"]),
                   Fourier2DField.from_json(obj["l22"]), obj.get("diagonal", False))


def identity_spd() -> SPDField2D:
    z = _zero_field()
    return SPDField2D(z, z, z)


def sample_spd_field(rng_seed, M: int, scale: float = 1.0) -> SPDField2D:
    rng = _rng(rng_seed)
    return SPDField2D(*(sample_fourier_2d(rng, M, scale) for _ in range(3)))


def restrict_to_diagonal(spd: SPDField2D) -> SPDField2D:
    return SPDField2D(spd.l11, spd.l21, spd.l22, diagonal=True)


def min_eigenvalue(a11, a12, a22):
    """Smaller eigenvalue of the symmetric 2x2 matrices ``[[a11, a12], [a12, a22]]``."""
    mean = 0.5 * (a11 + a22)
    return mean - np.sqrt((0.5 * (a11 - a22)) ** 2 + a12**2)
