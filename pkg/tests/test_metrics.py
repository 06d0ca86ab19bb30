import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covaug.fields import ConvDiffFields, EllipticFields, WaveFields
from covaug.grid import Grid
from covaug.metrics import rel_l2_error, relative_gain, residual_norm


def manufactured(n):
    g = Grid(2, n)
    X, Y = g.mesh()
    u = np.sin(np.pi * X) * np.sin(np.pi * Y)
    return g, EllipticFields(1.0, -2 * np.pi**2 * u, u)


def test_manufactured_elliptic_2d():
    g, f = manufactured(65)
    assert residual_norm("elliptic", f, g).l2_residual <= 2e-3
    g, f = manufactured(129)
    assert residual_norm("elliptic", f, g).l2_residual <= 5e-4


def test_zero_fields():
    g = Grid(1, 11)
    rep = residual_norm("elliptic", EllipticFields(1.0, np.zeros(11), np.zeros(11)), g)
    assert rep.l2_residual == 0.0 and rep.linf_residual == 0.0
    rep = residual_norm("convdiff", ConvDiffFields(1.0, 0.0, 0.0, np.zeros((4, 11))), g, 0.1)
    assert rep.l2_residual == 0.0


def test_report_json_and_errors():
    g, f = manufactured(17)
    rep = residual_norm("elliptic", f, g)
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["equation"] == "elliptic" and obj["grid"] == {"dim": 2, "n": 17}
    with pytest.raises(ValueError):
        residual_norm("elliptic", f, Grid(2, 4))
    with pytest.raises(ValueError):
        residual_norm("convdiff", ConvDiffFields(1.0, 0.0, 0.0, np.zeros((3, 9))), Grid(1, 9))
    with pytest.raises(ValueError):
        residual_norm("heat", f, g)


def test_scaling_leaves_relative_residual_unchanged():
    g, f = manufactured(33)
    r1 = residual_norm("elliptic", f, g).l2_residual
    r2 = residual_norm("elliptic", EllipticFields(1.0, 3.5 * f.f, 3.5 * f.u), g).l2_residual
    assert r2 == pytest.approx(r1, rel=1e-12)


def test_wave_1d_standing_wave_residual():
    g = Grid(1, 101)
    t = np.linspace(0, 1, 1001)
    rho = np.sin(np.pi * g.axis)[None] * np.cos(np.pi * t)[:, None]
    rep = residual_norm("wave", WaveFields(1.0, 0.0, rho[0], rho), g, t[1])
    assert rep.l2_residual < 1e-3


def test_rel_l2_error_cases():
    t = np.random.default_rng(0).standard_normal((5, 7))
    assert rel_l2_error(t, t) == 0.0
    assert rel_l2_error(np.zeros_like(t), t) == pytest.approx(1.0)
    assert rel_l2_error(2 * t, t) == pytest.approx(1.0)
    with pytest.raises(ZeroDivisionError):
        rel_l2_error(t, np.zeros_like(t))
    with pytest.raises(ValueError):
        rel_l2_error(t[:, :3], t)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000), st.floats(0.01, 100.0))
def test_rel_l2_error_scale_invariant(seed, lam):
    r = np.random.default_rng(seed)
    p, t = r.standard_normal((3, 4, 4)), r.standard_normal((3, 4, 4))
    assert rel_l2_error(lam * p, lam * t) == pytest.approx(rel_l2_error(p, t), rel=1e-12)


def test_relative_gain_table_values():
    assert relative_gain(0.105, 0.021) == pytest.approx(80.0, abs=1e-9)
    assert round(relative_gain(0.034, 0.021)) == 38
    assert relative_gain(0.2, 0.2) == 0.0
    with pytest.raises(ValueError):
        relative_gain(0.0, 0.1)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-6, 10.0), st.floats(-100.0, 100.0))
def test_relative_gain_inverse(e, g):
    assert relative_gain(e, (1 - g / 100) * e) == pytest.approx(g, abs=1e-9)
