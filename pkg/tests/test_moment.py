import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oklab.errors import InputError, NumericFailure
from oklab.moment import (
    Box,
    MomentModel,
    RegMax,
    capped_potential,
    ellipsoid_symplectic_volume,
    hessian,
    image_hausdorff,
    inverse_moment_map,
    moment_map,
    omega_mass,
    potential,
    reg_max,
    symplectic_volume,
)
from oklab.quadrature import cubature

LINE = MomentModel([(0,), (1,)])
TRIANGLE = MomentModel([(0, 0), (1, 0), (0, 1)])
KITE = MomentModel([(0, 0), (4, 0), (0, 4), (1, 1)])


def test_potential_examples():
    assert potential(MomentModel([(0,)]), [[3.7]]) == pytest.approx([0.0])
    assert potential(LINE, [[0.0]]) == pytest.approx([math.log(2)], rel=1e-12)
    big = potential(KITE, [[1e4, -1e4], [-1e4, -1e4]])
    assert np.all(np.isfinite(big))
    assert big[0] == pytest.approx(4e4, rel=1e-12)


def test_moment_map_examples():
    assert moment_map(LINE, [[0.0]])[0] == pytest.approx([0.5])
    assert moment_map(TRIANGLE, [[0.0, 0.0]])[0] == pytest.approx([1 / 3, 1 / 3])
    for d in (1, 3, 7):
        x = 50 / d
        closed = d * math.exp(d * x) / (1 + math.exp(d * x))
        assert moment_map(MomentModel([(0,), (d,)]), [[x]])[0, 0] == pytest.approx(closed, abs=1e-12)
        assert abs(closed - d) <= 1e-6 * d


def test_hessian_examples():
    assert hessian(LINE, [[0.0]])[0, 0, 0] == pytest.approx(0.25)
    assert hessian(MomentModel([(0,)]), [[2.0]])[0, 0, 0] == pytest.approx(0.0)


def test_gradient_and_hessian_against_differences():
    rng = np.random.default_rng(0)
    x = rng.uniform(-3, 3, size=(100, 2))
    h = 1e-4
    eye = np.eye(2)
    fd_grad = np.stack([(potential(KITE, x + h * e) - potential(KITE, x - h * e)) / (2 * h) for e in eye], axis=-1)
    fd_hess = np.stack([(moment_map(KITE, x + h * e) - moment_map(KITE, x - h * e)) / (2 * h) for e in eye], axis=-1)
    assert np.abs(fd_grad - moment_map(KITE, x)).max() <= 1e-6
    assert np.abs(fd_hess - hessian(KITE, x)).max() <= 1e-6


def test_image_inside_hull():
    x = np.random.default_rng(1).normal(scale=1.5, size=(500, 2))
    y = moment_map(KITE, x)
    for nrm, off in KITE.hull.facets:
        assert np.all(y @ np.array(nrm, dtype=float) < float(off))


@pytest.mark.parametrize("d", [1, 2, 5])
def test_symplectic_volume_segment(d):
    assert symplectic_volume(MomentModel([(0,), (d,)])) == pytest.approx(d, rel=1e-3)


def test_symplectic_volume_regions():
    assert symplectic_volume(TRIANGLE) == pytest.approx(0.5, rel=1e-3)
    half = Box((-np.inf,), (0.0,))
    assert symplectic_volume(LINE, half) == pytest.approx(0.5, rel=1e-4)
    assert omega_mass(TRIANGLE) == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(InputError):
        symplectic_volume(MomentModel([(0, 0), (1, 1)]))


def test_cubature_budget():
    with pytest.raises(NumericFailure):
        cubature(lambda x: 1 / np.sqrt(np.abs(x[:, 0] - 0.3) + 1e-300), [0.0], [1.0], rtol=1e-12, max_cells=50)


def test_cubature_is_independent_of_worker_count(monkeypatch):
    f = lambda x: np.exp(-np.sum(x**2, axis=1)) * (1 + x[:, 0] ** 2)
    monkeypatch.setenv("OKLAB_THREADS", "1")
    one = cubature(f, [-np.inf, -np.inf], [np.inf, np.inf], rtol=1e-8)
    monkeypatch.setenv("OKLAB_THREADS", "4")
    four = cubature(f, [-np.inf, -np.inf], [np.inf, np.inf], rtol=1e-8)
    assert one == four
    assert one[0] == pytest.approx(1.5 * math.pi, rel=1e-7)


def test_inverse_moment_map():
    y = np.array([[0.5, 0.5], [3.0, 0.2], [0.1, 0.1]])
    x, ok = inverse_moment_map(KITE, y)
    assert ok.all()
    np.testing.assert_allclose(moment_map(KITE, x), y, atol=1e-8)


def test_image_hausdorff_at_large_radius():
    assert image_hausdorff(KITE, 40) <= 1e-2
    assert image_hausdorff(KITE, 2) > image_hausdorff(KITE, 40)


def test_reg_max_examples():
    assert reg_max(1.0, 0.0, 5.0) == 5.0
    v = float(reg_max(1.0, 3.0, 3.0))
    assert 3 < v <= 3.5
    assert v == pytest.approx(3 + 3 / 16)


pairs = st.tuples(st.floats(-5, 5), st.floats(-5, 5))


@given(pairs, st.floats(0.05, 2))
def test_reg_max_properties(p, delta):
    x, y = p
    rm = RegMax(delta)
    v = float(rm(x, y))
    assert v == pytest.approx(float(rm(y, x)))
    assert v >= max(x, y) - 1e-12
    if abs(x - y) >= delta:
        assert v == max(x, y)
    assert v <= max(x, y) + delta / 2 + 1e-12


def test_reg_max_is_c2_and_convex():
    rm = RegMax(0.7)
    t = np.linspace(-2, 2, 4001)
    assert np.all(rm.d2m(t) >= 0)
    for a in (-0.7, 0.7):
        assert rm.m(a - 1e-9) == pytest.approx(rm.m(a + 1e-9), abs=1e-8)
        assert rm.dm(a - 1e-9) == pytest.approx(rm.dm(a + 1e-9), abs=1e-8)
        assert rm.d2m(a - 1e-9) == pytest.approx(rm.d2m(a + 1e-9), abs=1e-7)
    with pytest.raises(InputError):
        RegMax(0.0)


def test_capped_potential_one_dimensional():
    field = capped_potential(MomentModel([(0,), (4,)]), Box((0.0,), (math.log(2),)), margin=0.5)
    report = field.verify(1000)
    assert report["equal_on_U"] <= 1e-12
    assert report["max_outside_window"] == 0.0
    assert report["min_hessian_eigenvalue"] > 0
    assert 0 < report["max_abs_correction"] < np.inf


def test_capped_potential_precondition():
    with pytest.raises(InputError) as info:
        capped_potential(MomentModel([(0,), (4,)]), Box((0.0,), (math.log(4),)), margin=0.0)
    assert info.value.point == (4.0,)


def test_capped_potential_two_dimensional():
    model = MomentModel([(0, 0), (1, 0), (0, 1), (0, 2), (0, 3), (0, 4)])
    field = capped_potential(model, Box((-1.0, -1.0), (-0.5, 0.0)), margin=0.1)
    report = field.verify(900)
    assert report["equal_on_U"] <= 1e-12
    assert report["max_outside_window"] == 0.0
    assert report["min_hessian_eigenvalue"] >= -1e-9
    x = np.random.default_rng(3).uniform(-4, 4, size=(50, 2))
    v, g, _ = field.evaluate(x)
    h = 1e-6
    fd = np.stack([(field.value(x + h * e) - field.value(x - h * e)) / (2 * h) for e in np.eye(2)], axis=-1)
    assert np.abs(fd - g).max() <= 1e-4


@pytest.mark.parametrize("a, expected", [((1, 2), 2), ((1, 4), 4), ((1, 1, 2), 2), ((1, 1, 4), 4)])
def test_ellipsoid_volume(a, expected):
    assert ellipsoid_symplectic_volume(a) == pytest.approx(expected, rel=1e-6)
