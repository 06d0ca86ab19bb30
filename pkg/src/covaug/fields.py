"""Field bundles per equation family and the per-dataset channel schema.

Tensor coefficients are stored by their independent components: a single
array in 1D, and ``(a11, a12, a22)`` stacked on a leading axis of length 3
in 2D.  Vector coefficients in 2D are stacked as ``(v1, v2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

ELLIPTIC = "elliptic"
CONVDIFF = "convdiff"
WAVE = "wave"

DATASET_NAMES = (
    "elliptic_1d", "convdiff_1d", "wave5_1d", "wave10_1d",
    "elliptic_alpha_2d", "elliptic_beta_2d", "convdiff_2d", "wave_2d",
)

# channel order: features..., target
SCHEMAS = {
    "elliptic_1d": (("a", "f"), "u"),
    "convdiff_1d": (("a", "v", "phi0"), "phi"),
    "wave5_1d": (("c", "v", "e", "rho0"), "rho"),
    "wave10_1d": (("c", "v", "e", "rho0"), "rho"),
    "elliptic_alpha_2d": (("a11", "a12", "a22", "f"), "u"),
    "elliptic_beta_2d": (("a11", "a12", "a22", "f"), "u"),
    "convdiff_2d": (("a11", "a12", "a22", "v1", "v2", "phi0"), "phi"),
    "wave_2d": (("c11", "c12", "c22", "v1", "v2", "rho0"), "rho"),
}


def family(name: str) -> str:
    if name.startswith("elliptic"):
        return ELLIPTIC
    if name.startswith("convdiff"):
        return CONVDIFF
    if name.startswith("wave"):
        return WAVE
    raise ValueError(f"unknown equation {name!r}")


def dimension(name: str) -> int:
    if name not in SCHEMAS:
        raise ValueError(f"unknown equation {name!r}")
    return 2 if name.endswith("_2d") else 1


def time_dependent(name: str) -> bool:
    return family(name) != ELLIPTIC


@dataclass
class EllipticFields:
    a: Any
    f: Any
    u: Any


@dataclass
class ConvDiffFields:
    a: Any
    v: Any
    phi0: Any
    phi: Any = None


@dataclass
class WaveFields:
    c: Any
    v: Any
    rho0: Any
    rho: Any = None
    e: Any = 0.0


@dataclass
class Sample:
    equation: str
    features: dict[str, np.ndarray]
    target: np.ndarray
    provenance: dict = field(default_factory=dict)

    def with_provenance(self, **extra) -> "Sample":
        return replace(self, provenance={**self.provenance, **extra})


def _stack(features, names):
    return np.stack([features[k] for k in names])


def sample_to_fields(s: Sample):
    f = s.features
    two_d = dimension(s.equation) == 2
    kind = family(s.equation)
    if kind == ELLIPTIC:
        a = _stack(f, ("a11", "a12", "a22")) if two_d else f["a"]
        return EllipticFields(a, f["f"], s.target)
    if kind == CONVDIFF:
        a = _stack(f, ("a11", "a12", "a22")) if two_d else f["a"]
        v = _stack(f, ("v1", "v2")) if two_d else f["v"]
        return ConvDiffFields(a, v, f["phi0"], s.target)
    c = _stack(f, ("c11", "c12", "c22")) if two_d else f["c"]
    v = _stack(f, ("v1", "v2")) if two_d else f["v"]
    e = f.get("e", np.zeros_like(f["rho0"]))
    return WaveFields(c, v, f["rho0"], s.target, e)


def fields_to_sample(name: str, fields, provenance: dict | None = None) -> Sample:
    two_d = dimension(name) == 2
    kind = family(name)
    feats: dict[str, np.ndarray] = {}
    if kind == ELLIPTIC:
        if two_d:
            feats.update(zip(("a11", "a12", "a22"), fields.a))
        else:
            feats["a"] = fields.a
        feats["f"] = fields.f
        target = fields.u
    elif kind == CONVDIFF:
        if two_d:
            feats.update(zip(("a11", "a12", "a22"), fields.a))
            feats.update(zip(("v1", "v2"), fields.v))
        else:
            feats["a"], feats["v"] = fields.a, fields.v
        feats["phi0"] = fields.phi0
        target = fields.phi
    else:
        if two_d:
            feats.update(zip(("c11", "c12", "c22"), fields.c))
            feats.update(zip(("v1", "v2"), fields.v))
        else:
            feats["c"], feats["v"], feats["e"] = fields.c, fields.v, fields.e
        feats["rho0"] = fields.rho0
        target = fields.rho
    names, _ = SCHEMAS[name]
    feats = {k: np.ascontiguousarray(feats[k], dtype=float) for k in names}
    return Sample(name, feats, np.ascontiguousarray(target, dtype=float), dict(provenance or {}))
