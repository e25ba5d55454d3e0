import math

import pytest

import fluxfocus as ff


def test_constants_and_version():
    assert ff.__version__
    assert ff.mu0 == pytest.approx(4e-7 * math.pi, rel=1e-9)
    assert ff.nv_moment > 1.8e-23


def test_free_dipole_limit():
    m = [0.1, -0.3, 1.0]
    r = [0.2e-7, 0.1e-7, 0.3e-7]
    b = ff.field_centered(m, r, 1.0)
    f = ff.free_dipole_field(m, r)
    assert max(abs(x - y) for x, y in zip(b, f)) < 1e-3 * max(abs(y) for y in f)


def test_inplane_field_and_asymptote():
    R = 1e-6
    bz = ff.field_inplane("z", 1.0, 0.5 * R, R)[2]
    scale = ff.mu0 / (4 * math.pi * (0.5 * R) ** 3)
    assert -bz / scale * math.pi / 2 == pytest.approx(1.768886, rel=1e-6)
    assert ff.field_inplane("z", 1.0, 2 * R, R)[2] == 0.0
    with pytest.raises(ValueError):
        ff.edge_asymptote("centered", 1.0, 2 * R, R)
    with pytest.raises(ValueError):
        ff.field_inplane("w", 1.0, 0.5 * R, R)


def test_n_vector_on_axis():
    n, c, alpha = ff.n_vector([0.0, 0.0, 1.0], 1.0)
    assert alpha == pytest.approx(1.0)
    assert c == pytest.approx(0.5 + 1 / math.pi)


def test_singularity_maps_to_arithmetic_error():
    with pytest.raises(ArithmeticError):
        ff.free_dipole_field([0, 0, 1], [0, 0, 0])


def test_power_law_fit_and_smoothing():
    L = [10 ** (-7 + 0.2 * k) for k in range(10)]
    B = [3.0 * x ** -2.5 for x in L]
    fit = ff.fit_power_law(L, B)
    assert fit.slope == pytest.approx(-2.5, abs=1e-12)
    mean, std = ff.smooth(L, B, 3)
    assert len(mean) == len(B) and std[0] == 0.0
    with pytest.raises(ValueError):
        ff.fit_power_law(L[:3], B[:3])


def test_analytic_sweep():
    radii = [1e-5 * 10 ** (0.1 * k) for k in range(20)]
    out = ff.sweep("centered", 100e-9, radii)
    assert out["fit"].slope == pytest.approx(-2.5, abs=0.05)


def test_small_numeric_solve():
    s = ff.solve_circle(1e-6, nx=24, ny=24, convention="physical")
    g = s["g"]
    assert g.shape == (24, 24)
    labels = s["labels"]
    flat = g.reshape(-1)
    assert all(flat[k] == 0.0 for k, l in enumerate(labels) if l == 2)
    assert s["aperture_spread"] < 0.05
    with pytest.raises(ValueError):
        ff.solve_circle(1e-6, nx=24, ny=24, convention="other")


def test_coupling_and_db():
    e = ff.coupling_estimate(ff.nv_moment, 1e-3, 300e-9)
    assert e["coupling"] == pytest.approx(ff.nv_moment * 1e-3 / ff.planck)
    assert ff.field_db(1e-3) == pytest.approx(20.0)
