import json

import numpy as np
import pytest

from covaug.covariance import augment_dataset
from covaug.datasets import (Dataset, DatasetError, DatasetSpec, generate_dataset, read_dataset,
                             write_dataset)
from covaug.fields import SCHEMAS, family, sample_to_fields
from covaug.metrics import residual_norm

SMALL_2D = dict(n=17, nt=9)


def test_spec_defaults():
    s = DatasetSpec("elliptic_1d")
    assert (s.n, s.rhs_modes, s.coeff_modes) == (100, 3, 5)
    s = DatasetSpec("convdiff_1d")
    assert (s.scale, s.t_final, s.nt) == (0.01, 1.0, 200)
    s = DatasetSpec("wave10_1d")
    assert (s.scale, s.nt, s.coeff_modes) == (0.1, 1000, 10)
    assert DatasetSpec("elliptic_alpha_2d", complexity="complex").scale == 0.5
    assert DatasetSpec("wave_2d").scale == 0.2
    assert DatasetSpec("wave_2d", complexity="complex").t_final == 1.0
    assert DatasetSpec("convdiff_2d").t_final == 1e-2
    with pytest.raises(ValueError):
        DatasetSpec("heat_3d")
    with pytest.raises(ValueError):
        DatasetSpec("elliptic_1d", n=4)


def test_elliptic_1d_samples():
    ds = generate_dataset(DatasetSpec("elliptic_1d", 4, 3))
    assert len(ds) == 4
    for s in ds.samples:
        assert s.features["a"].shape == (100,) and s.features["f"].shape == (100,)
        assert s.target.shape == (100,)
        assert s.target[0] == 0 and s.target[-1] == 0
        assert s.features["a"].min() > 0


def test_empty_dataset(tmp_path):
    ds = generate_dataset(DatasetSpec("elliptic_1d", 0, 3))
    write_dataset(ds, tmp_path)
    back = read_dataset(tmp_path)
    assert len(back) == 0
    assert json.loads((tmp_path / "manifest.json").read_text())["samples"] == []


@pytest.mark.parametrize("name", list(SCHEMAS))
def test_schema_conformance(name):
    spec = DatasetSpec(name, 2, 1, **({} if name.endswith("_1d") else SMALL_2D))
    ds = generate_dataset(spec)
    feats, _ = SCHEMAS[name]
    for s in ds.samples:
        assert tuple(s.features) == feats
        for arr in s.features.values():
            assert arr.shape == spec.grid.shape
        if name != "elliptic_1d" and family(name) != "elliptic" and spec.stores_trajectory:
            assert s.target.shape == (spec.nt,) + spec.grid.shape
        else:
            assert s.target.shape == spec.grid.shape
    if name == "wave_2d":
        assert "e" not in feats and "f" not in feats


def test_dirichlet_channels_vanish():
    for name in ("convdiff_1d", "wave5_1d"):
        s = generate_dataset(DatasetSpec(name, 1, 0)).samples[0]
        assert np.all(s.target[:, [0, -1]] == 0)
    for name in ("elliptic_alpha_2d", "convdiff_2d", "wave_2d"):
        s = generate_dataset(DatasetSpec(name, 1, 0, **SMALL_2D)).samples[0]
        for arr in (s.target, s.features.get("phi0", s.features.get("rho0", s.target))):
            assert not np.any(arr[0]) and not np.any(arr[-1])
            assert not np.any(arr[:, 0]) and not np.any(arr[:, -1])


def test_elliptic_beta_is_diagonal():
    s = generate_dataset(DatasetSpec("elliptic_beta_2d", 1, 0, n=17)).samples[0]
    assert not np.any(s.features["a12"])
    np.testing.assert_array_equal(s.features["a11"], s.features["a22"])


def test_wave_2d_substeps_recorded():
    ds = generate_dataset(DatasetSpec("wave_2d", 1, 0, n=33, nt=5, complexity="complex"))
    assert ds.samples[0].provenance["substeps"] > 1


def test_original_residuals_small():
    ds = generate_dataset(DatasetSpec("elliptic_1d", 3, 0))
    for s in ds.samples:
        assert residual_norm("elliptic", sample_to_fields(s), ds.spec.grid).l2_residual < 1e-10
    ds = generate_dataset(DatasetSpec("wave5_1d", 2, 0))
    for s in ds.samples:
        assert residual_norm("wave", sample_to_fields(s), ds.spec.grid, ds.spec.dt).l2_residual < 1e-8


def test_determinism_across_jobs():
    spec = DatasetSpec("convdiff_1d", 4, 11, nt=20)
    a, b = generate_dataset(spec), generate_dataset(spec, jobs=4)
    for s, t in zip(a.samples, b.samples):
        np.testing.assert_array_equal(s.target, t.target)
        assert s.provenance == t.provenance


def test_failed_samples_are_redrawn(monkeypatch):
    import covaug.datasets as mod
    calls = {"n": 0}
    real = mod._RECIPES["elliptic_1d"]

    def flaky(spec, rng, x):
        calls["n"] += 1
        if calls["n"] == 1:
            raise mod.SolverError("synthetic failure")
        return real(spec, rng, x)

    monkeypatch.setitem(mod._RECIPES, "elliptic_1d", flaky)
    ds = generate_dataset(DatasetSpec("elliptic_1d", 2, 0))
    assert ds.failed == [0]
    assert ds.samples[0].provenance["seed"][-1] == 1
    assert "synthetic failure" in ds.samples[0].provenance["failures"][0]["error"]

    monkeypatch.setitem(mod._RECIPES, "elliptic_1d",
                        lambda *a: (_ for _ in ()).throw(mod.SolverError("always")))
    with pytest.raises(DatasetError):
        generate_dataset(DatasetSpec("elliptic_1d", 1, 0, max_attempts=2))


def test_round_trip_bit_identical(tmp_path):
    ds = generate_dataset(DatasetSpec("elliptic_1d", 5, 2))
    aug = Dataset(ds.spec, augment_dataset(ds.samples, 1, 4), ds.history)
    write_dataset(aug, tmp_path / "a")
    back = read_dataset(tmp_path / "a")
    for s, t in zip(aug.samples, back.samples):
        for k in s.features:
            assert s.features[k].tobytes() == t.features[k].tobytes()
        assert s.target.tobytes() == t.target.tobytes()
        assert s.provenance == t.provenance
    write_dataset(back, tmp_path / "b")
    for f in ("a.npy", "f.npy", "u.npy", "manifest.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert all("map" in p["augmentation"] for p in manifest["samples"][5:])
    assert {c["name"] for c in manifest["channels"]} == {"a", "f", "u"}


def test_npy_header(tmp_path):
    ds = generate_dataset(DatasetSpec("elliptic_1d", 16, 0))
    write_dataset(ds, tmp_path)
    raw = (tmp_path / "u.npy").read_bytes()
    assert raw[:6] == b"\x93NUMPY" and raw[6:8] == b"\x01\x00"
    header = raw[10:10 + int.from_bytes(raw[8:10], "little")].decode("latin1")
    assert "'descr': '<f8'" in header and "'shape': (16, 100)" in header
    assert "'fortran_order': False" in header


def test_read_rejects_bad_files(tmp_path):
    ds = generate_dataset(DatasetSpec("elliptic_1d", 2, 0))
    write_dataset(ds, tmp_path)
    (tmp_path / "a.npy").write_bytes(b"not an npy file")
    with pytest.raises(DatasetError):
        read_dataset(tmp_path)
    write_dataset(ds, tmp_path)
    np.save(tmp_path / "f.npy", np.zeros((3, 100)))
    with pytest.raises(DatasetError):
        read_dataset(tmp_path)
