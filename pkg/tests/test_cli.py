import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from covaug.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def digest(path):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(path.iterdir())}


def test_generate_writes_channels(tmp_path, capsys):
    out = tmp_path / "d1"
    assert run("generate", "--equation", "elliptic_1d", "--samples", 8, "--seed", 7, "--out", out) == 0
    assert sorted(p.name for p in out.iterdir()) == ["a.npy", "f.npy", "manifest.json", "u.npy"]
    assert "generated 8 elliptic_1d samples" in capsys.readouterr().err


def test_generate_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert run("generate", "--equation", "convdiff_1d", "--samples", 3, "--seed", 1,
                   "--nt", 20, "--out", tmp_path / d) == 0
    assert digest(tmp_path / "a") == digest(tmp_path / "b")


def test_usage_errors(tmp_path, monkeypatch):
    with pytest.raises(SystemExit) as exc:
        run("generate", "--equation", "nope", "--samples", 1, "--out", tmp_path)
    assert exc.value.code == 2
    monkeypatch.delenv("COVAUG_OUT", raising=False)
    assert run("generate", "--equation", "elliptic_1d", "--samples", 1) == 2
    assert run("generate", "--equation", "elliptic_1d", "--samples", 1, "--grid", 3,
               "--out", tmp_path) == 2


def test_out_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("COVAUG_OUT", str(tmp_path / "env"))
    assert run("generate", "--equation", "elliptic_1d", "--samples", 1) == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_augment_verify_inspect(tmp_path, capsys):
    src, dst = tmp_path / "src", tmp_path / "dst"
    run("generate", "--equation", "elliptic_1d", "--samples", 8, "--seed", 7, "--out", src)
    capsys.readouterr()
    assert run("augment", "--in", src, "--factor", 2, "--seed", 3, "--out", dst, "--verify",
               "--map-modes", 5, "--map-beta", 1.0) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert len(lines) == 24 and all(l["status"] == "pass" for l in lines)
    assert run("verify", "--in", dst) == 0
    capsys.readouterr()
    assert run("inspect", "--in", dst) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["samples"] == 24 and info["augmented"] == 16
    assert [h["command"] for h in info["history"]] == ["generate", "augment"]
    assert run("verify", "--in", dst, "--tol", 1e-12) == 1


def test_augment_factor_zero(tmp_path):
    src, dst = tmp_path / "src", tmp_path / "dst"
    run("generate", "--equation", "elliptic_1d", "--samples", 3, "--out", src)
    assert run("augment", "--in", src, "--factor", 0, "--out", dst) == 0
    a, b = digest(src), digest(dst)
    assert all(a[k] == b[k] for k in ("a.npy", "f.npy", "u.npy"))
    assert run("augment", "--in", src, "--factor", -1, "--out", dst) == 2


def test_verify_skips_final_slices(tmp_path, capsys):
    d = tmp_path / "cd"
    run("generate", "--equation", "convdiff_2d", "--samples", 2, "--grid", 17, "--nt", 5, "--out", d)
    capsys.readouterr()
    assert run("verify", "--in", d) == 0
    assert all(json.loads(l)["status"] == "skipped" for l in capsys.readouterr().out.splitlines())


def test_metrics(tmp_path, capsys):
    t = np.random.default_rng(0).standard_normal((4, 10))
    np.save(tmp_path / "t.npy", t)
    np.save(tmp_path / "p.npy", t)
    np.save(tmp_path / "b.npy", 2 * t)
    np.save(tmp_path / "bad.npy", t[:2])
    assert run("metrics", "--pred", tmp_path / "p.npy", "--target", tmp_path / "t.npy",
               "--baseline", tmp_path / "b.npy") == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["rel_l2_error"] == 0.0
    assert rep["baseline_rel_l2_error"] == pytest.approx(1.0)
    assert rep["relative_gain_percent"] == pytest.approx(100.0)
    assert run("metrics", "--pred", tmp_path / "bad.npy", "--target", tmp_path / "t.npy") == 2
    assert run("metrics", "--pred", tmp_path / "missing.npy", "--target", tmp_path / "t.npy") == 2


def test_missing_dataset(tmp_path):
    assert run("verify", "--in", tmp_path / "nothing") == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "covaug.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "generate" in proc.stdout
