"""Named dataset recipes, generation, and NPY/JSON persistence.

Every sample is generated from its own generator
``derive_rng(master_seed, GENERATION_KEY, index, attempt)``; a sample whose
solve fails is redrawn with the next attempt number and the failure is kept
in its provenance, so a dataset always has the requested size and is
reproducible regardless of the number of workers.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .fields import (CONVDIFF, DATASET_NAMES, ELLIPTIC, SCHEMAS, ConvDiffFields, EllipticFields,
                     Sample, WaveFields, dimension, family, fields_to_sample, time_dependent)
from .grid import Grid
from .randfields import (derive_rng, restrict_to_diagonal, sample_cos_field, sample_fourier_2d,
                         sample_sin_field, sample_spd_field)
from .solvers import (SolverError, solve_convdiff_1d, solve_convdiff_2d, solve_elliptic_1d,
                      solve_elliptic_2d, solve_wave_1d, solve_wave_2d)
from .solvers.one_d import wave_time_step_limit
from .solvers.two_d import wave_time_step_limit_2d

GENERATION_KEY = 0x67656E
MANIFEST = "manifest.json"
FORMAT_VERSION = 1
CFL_SAFETY = 0.9


class DatasetError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "elliptic_1d": dict(n=100, rhs_modes=3, coeff_modes=5),
    "convdiff_1d": dict(n=100, nt=200, t_final=1.0, rhs_modes=10, coeff_modes=5, scale=0.01),
    "wave5_1d": dict(n=100, nt=1000, t_final=1.0, rhs_modes=5, coeff_modes=5, scale=0.1),
    "wave10_1d": dict(n=100, nt=1000, t_final=1.0, rhs_modes=10, coeff_modes=10, scale=0.1),
    "elliptic_alpha_2d": dict(n=100, fourier_modes=5),
    "elliptic_beta_2d": dict(n=100, fourier_modes=5),
    "convdiff_2d": dict(n=100, nt=100, t_final=1e-2, fourier_modes=5),
    "wave_2d": dict(n=100, nt=100, fourier_modes=5, scale=0.2),
}
_SCALE_2D = {"simple": 0.1, "complex": 0.5}
_WAVE_T = {"simple": 0.1, "complex": 1.0}


@dataclass(frozen=True)
class DatasetSpec:
    """Recipe parameters; ``None`` entries take the per-name default.

    ``rhs_modes``/``coeff_modes`` are the 1D mode counts ``N`` for
    right-hand sides (or initial data) and coefficients, ``fourier_modes`` is
    ``M`` for the 2D Fourier fields.
    """

    name: str
    n_samples: int = 0
    master_seed: int = 0
    n: int | None = None
    nt: int | None = None
    t_final: float | None = None
    rhs_modes: int | None = None
    coeff_modes: int | None = None
    fourier_modes: int | None = None
    scale: float | None = None
    complexity: str = "simple"
    epsilon: float = 1e-2
    full_trajectory: bool = False
    max_attempts: int = 10

    def __post_init__(self):
        if self.name not in DATASET_NAMES:
            raise ValueError(f"unknown dataset {self.name!r}; choose from {', '.join(DATASET_NAMES)}")
        if self.complexity not in _SCALE_2D:
            raise ValueError("complexity must be 'simple' or 'complex'")
        if self.n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")
        defaults = dict(_DEFAULTS[self.name])
        if dimension(self.name) == 2:
            defaults.setdefault("scale", _SCALE_2D[self.complexity])
            if self.name == "wave_2d":
                defaults["t_final"] = _WAVE_T[self.complexity]
        for key, value in defaults.items():
            if getattr(self, key) is None:
                object.__setattr__(self, key, value)
        if self.n < 5:
            raise ValueError("grid needs at least 5 points per axis")
        if time_dependent(self.name) and (self.nt is None or self.nt < 3):
            raise ValueError("time-dependent datasets need nt >= 3")

    @property
    def dim(self) -> int:
        return dimension(self.name)

    @property
    def grid(self) -> Grid:
        return Grid(self.dim, self.n)

    @property
    def dt(self) -> float | None:
        return self.t_final / (self.nt - 1) if time_dependent(self.name) else None

    @property
    def stores_trajectory(self) -> bool:
        return time_dependent(self.name) and (self.dim == 1 or self.full_trajectory)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "DatasetSpec":
        return cls(**obj)


@dataclass
class Dataset:
    spec: DatasetSpec
    samples: list[Sample] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def failed(self) -> list[int]:
        """Indices of samples that needed more than one attempt."""
        return [i for i, s in enumerate(self.samples) if s.provenance.get("failures")]

    def channel(self, name: str) -> np.ndarray:
        _, target = SCHEMAS[self.spec.name]
        if name == target:
            return np.stack([s.target for s in self.samples])
        return np.stack([s.features[name] for s in self.samples])


# ---------------------------------------------------------------------------
# Recipes
# ---------------------------------------------------------------------------


def _window(X, Y):
    """``sin(pi x) sin(pi y)``, exactly zero on the boundary nodes."""
    w = np.sin(np.pi * X) * np.sin(np.pi * Y)
    w[0, :] = w[-1, :] = w[:, 0] = w[:, -1] = 0.0
    return w


def _substeps(nt: int, T: float, limit: float) -> int:
    """Smallest multiple ``q`` with ``T / (q (nt-1))`` inside the stable range."""
    return max(1, math.ceil(T / ((nt - 1) * CFL_SAFETY * limit)))


def _elliptic_1d(spec, rng, x):
    f = sample_sin_field(rng, spec.rhs_modes - 1)(x)
    a = sample_cos_field(rng, spec.coeff_modes, positive=True, epsilon=spec.epsilon)(x)
    return EllipticFields(a, f, solve_elliptic_1d(a, f, spec.n)), {}


def _convdiff_1d(spec, rng, x):
    s = spec.scale
    a = sample_cos_field(rng, spec.coeff_modes, s, positive=True, epsilon=spec.epsilon)(x)
    v = sample_cos_field(rng, spec.coeff_modes, s, positive=True, epsilon=spec.epsilon)(x)
    phi0 = sample_sin_field(rng, spec.rhs_modes - 1)(x)
    sol = solve_convdiff_1d(a, v, phi0, spec.n, spec.nt, spec.t_final)
    return ConvDiffFields(a, v, phi0, sol.values), {}


def _wave_1d(spec, rng, x):
    s, N = spec.scale, spec.coeff_modes
    root = sample_cos_field(rng, N, s, positive=True, epsilon=spec.epsilon, decay=True)(x)
    c = root**2
    v = sample_cos_field(rng, N, s, decay=True)(x)
    e = sample_cos_field(rng, N, s, decay=True)(x)
    rho0 = sample_sin_field(rng, spec.rhs_modes - 1, decay=True)(x)
    q = _substeps(spec.nt, spec.t_final, wave_time_step_limit(c.max(), 1.0 / (spec.n - 1)))
    sol = solve_wave_1d(c, v, e, rho0, spec.n, q * (spec.nt - 1) + 1, spec.t_final)
    return WaveFields(c, v, rho0, sol.values[::q], e), {"substeps": q}


def _elliptic_2d(spec, rng, X, Y):
    g = spec.grid.axis
    spd = sample_spd_field(rng, spec.fourier_modes, spec.scale)
    if spec.name == "elliptic_beta_2d":
        spd = restrict_to_diagonal(spd)
    A = np.stack(spd.on_grid(g))
    f = sample_fourier_2d(rng, spec.fourier_modes, spec.scale).on_grid(g)
    return EllipticFields(A, f, solve_elliptic_2d(tuple(A), f, spec.n)), {}


def _convdiff_2d(spec, rng, X, Y):
    g = spec.grid.axis
    A = np.stack(sample_spd_field(rng, spec.fourier_modes, spec.scale).on_grid(g))
    v = np.stack([sample_fourier_2d(rng, spec.fourier_modes, spec.scale).on_grid(g)
                  for _ in range(2)])
    phi0 = sample_fourier_2d(rng, spec.fourier_modes, spec.scale).on_grid(g) * _window(X, Y)
    sol = solve_convdiff_2d(tuple(A), tuple(v), phi0, spec.n, spec.nt, spec.t_final)
    return ConvDiffFields(A, v, phi0, sol.values), {}


def _wave_2d(spec, rng, X, Y):
    g = spec.grid.axis
    c = np.stack(sample_spd_field(rng, spec.fourier_modes, spec.scale).on_grid(g))
    v = np.stack([sample_fourier_2d(rng, spec.fourier_modes, spec.scale).on_grid(g)
                  for _ in range(2)])
    rho0 = sample_fourier_2d(rng, spec.fourier_modes, spec.scale).on_grid(g) * _window(X, Y)
    inner = tuple(comp[1:-1, 1:-1] for comp in c)
    q = _substeps(spec.nt, spec.t_final, wave_time_step_limit_2d(*inner, 1.0 / (spec.n - 1)))
    sol = solve_wave_2d(tuple(c), tuple(v), rho0, spec.n, q * (spec.nt - 1) + 1, spec.t_final)
    return WaveFields(c, v, rho0, sol.values[::q], np.zeros_like(rho0)), {"substeps": q}


_RECIPES = {
    "elliptic_1d": _elliptic_1d, "convdiff_1d": _convdiff_1d,
    "wave5_1d": _wave_1d, "wave10_1d": _wave_1d,
    "elliptic_alpha_2d": _elliptic_2d, "elliptic_beta_2d": _elliptic_2d,
    "convdiff_2d": _convdiff_2d, "wave_2d": _wave_2d,
}


def generate_fields(spec: DatasetSpec, rng: np.random.Generator):
    """One solved field bundle for ``spec`` (full trajectories for dynamic problems)."""
    grid = spec.grid
    coords = (grid.axis,) if spec.dim == 1 else grid.mesh()
    return _RECIPES[spec.name](spec, rng, *coords)


def generate_sample(spec: DatasetSpec, index: int) -> Sample:
    failures = []
    for attempt in range(spec.max_attempts):
        key = [int(spec.master_seed), GENERATION_KEY, int(index), attempt]
        try:
            fields, extra = generate_fields(spec, derive_rng(*key))
        except (SolverError, ValueError, ArithmeticError) as exc:
            failures.append({"attempt": attempt, "error": f"{type(exc).__name__}: {exc}"})
            continue
        if family(spec.name) != ELLIPTIC and not spec.stores_trajectory:
            target = fields.phi if family(spec.name) == CONVDIFF else fields.rho
            fields = replace(fields, **{("phi" if family(spec.name) == CONVDIFF else "rho"): target[-1]})
        prov = {"index": int(index), "seed": key, "status": "ok", **extra}
        if failures:
            prov["failures"] = failures
        return fields_to_sample(spec.name, fields, prov)
    raise DatasetError(f"sample {index} failed {spec.max_attempts} attempts: {failures[-1]['error']}")


def generate_dataset(spec: DatasetSpec, jobs: int = 1) -> Dataset:
    indices = range(spec.n_samples)
    if jobs > 1 and spec.n_samples > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(lambda i: generate_sample(spec, i), indices))
    else:
        samples = [generate_sample(spec, i) for i in indices]
    return Dataset(spec, samples, [{"command": "generate", "spec": spec.to_json()}])


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def _channel_names(name: str) -> list[str]:
    feats, target = SCHEMAS[name]
    return [*feats, target]


def write_dataset(ds: Dataset, path) -> Path:
    """One ``<channel>.npy`` per channel (sample axis first) plus ``manifest.json``."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    channels = []
    for name in _channel_names(ds.spec.name):
        if ds.samples:
            arr = ds.channel(name)
        else:
            arr = np.zeros((0,) + ds.spec.grid.shape)
        arr = np.ascontiguousarray(arr, dtype="<f8")
        fname = f"{name}.npy"
        np.save(root / fname, arr, allow_pickle=False)
        channels.append({"name": name, "shape": list(arr.shape), "file": fname})
    manifest = {
        "format_version": FORMAT_VERSION,
        "spec": ds.spec.to_json(),
        "channels": channels,
        "samples": [s.provenance for s in ds.samples],
        "history": ds.history,
    }
    with open(root / MANIFEST, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return root


def read_manifest(path) -> dict:
    with open(Path(path) / MANIFEST, encoding="utf-8") as fh:
        return json.load(fh)


def read_dataset(path) -> Dataset:
    root = Path(path)
    manifest = read_manifest(root)
    spec = DatasetSpec.from_json(manifest["spec"])
    prov = manifest["samples"]
    arrays = {}
    for ch in manifest["channels"]:
        try:
            arr = np.load(root / ch["file"], allow_pickle=False)
        except ValueError as exc:
            raise DatasetError(f"malformed NPY file {ch['file']}: {exc}") from exc
        if list(arr.shape) != list(ch["shape"]) or arr.shape[0] != len(prov):
            raise DatasetError(f"channel {ch['name']} has shape {arr.shape}, manifest says "
                               f"{ch['shape']} with {len(prov)} samples")
        if arr.dtype != np.dtype("<f8"):
            raise DatasetError(f"channel {ch['name']} has dtype {arr.dtype}, expected <f8")
        arrays[ch["name"]] = arr
    feats, target = SCHEMAS[spec.name]
    missing = set(feats) | {target}
    missing -= set(arrays)
    if missing:
        raise DatasetError(f"missing channels: {sorted(missing)}")
    samples = [Sample(spec.name, {k: arrays[k][i] for k in feats}, arrays[target][i], dict(p))
               for i, p in enumerate(prov)]
    return Dataset(spec, samples, list(manifest.get("history", [])))
