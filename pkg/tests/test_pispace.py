"""Profile space: algebra, evaluation, sphere norms, projection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bicap.fields import HARMONICS
from bicap.pispace import PiProfile, project_to_pi
from bicap.sphgrid import AnnulusGrid, ScalarField

coef = st.floats(min_value=-3.0, max_value=3.0)


def test_validation():
    with pytest.raises(ValueError):
        PiProfile((1.0, 2.0, 3.0))  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        PiProfile((1.0, float("nan"), 0.0, 0.0))
    with pytest.raises(ValueError):
        PiProfile((0.0, 0.0, 0.0, 0.0)).normalized()


@given(st.tuples(coef, coef, coef, coef))
@settings(max_examples=100, deadline=None)
def test_algebra(b):
    P = PiProfile(b)
    assert P.norm == pytest.approx(math.sqrt(sum(c * c for c in b)), rel=1e-12)
    if P.norm > 1e-6:
        assert PiProfile(b).normalized().norm == pytest.approx(1.0, rel=1e-12)
    Q = PiProfile((1.0, 0.0, -0.5, 2.0))
    assert (P + Q - Q).b == pytest.approx(P.b, abs=1e-12)
    assert (2.0 * P).b == pytest.approx(tuple(2.0 * c for c in b), abs=1e-12)


def test_eval_on_axis_points():
    P = PiProfile((1.0, 2.0, 0.0, -1.0))
    assert P.eval(np.array([3.0, 0.0, 0.0])) == pytest.approx(3.0)
    assert P.eval(np.array([0.0, 0.0, -2.0])) == pytest.approx(2.0)
    # lifted value is |x| * value and vanishes at the origin
    assert P.eval_lifted(np.array([0.0, 0.0, -2.0])) == pytest.approx(4.0)
    assert P.eval_lifted(np.zeros(3)) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        P.eval(np.zeros(3))


def test_sphere_l2_closed_form():
    # quadrature of the squared profile must match the parity closed form
    grid = AnnulusGrid(0.9, 1.1, 8, 24, 24)
    P = PiProfile((0.7, -0.3, 0.5, 1.1))
    num = grid.sphere_integral(P.eval_on_sphere(grid) ** 2)
    assert num == pytest.approx(P.sphere_l2_sq(), rel=1e-12)
    assert P.sphere_l2_sq() == pytest.approx(
        4.0 * math.pi * 0.49 + 4.0 * math.pi / 3.0 * (0.09 + 0.25 + 1.21), rel=1e-14
    )


def test_laplace_beltrami_action():
    P = PiProfile((0.7, -0.3, 0.5, 1.1))
    L = P.laplace_beltrami_action()
    assert L.b == (0.0, 0.6, -1.0, -2.2)


@given(st.tuples(coef, coef, coef, coef), st.integers(min_value=0, max_value=10))
@settings(max_examples=50, deadline=None)
def test_projection_fixed_point(b, seed):
    grid = AnnulusGrid(0.5, 2.0, 12, 12, 12)
    P = PiProfile(b)
    back = project_to_pi(P.as_field(grid))
    assert np.asarray(back.b) == pytest.approx(np.asarray(b), abs=1e-10)


def test_projection_kills_higher_harmonics():
    grid = AnnulusGrid(0.5, 2.0, 12, 24, 24)
    for Y in HARMONICS:
        if Y.degree < 2:
            continue
        field = ScalarField(grid, np.broadcast_to(Y.on_grid(grid), grid.shape).copy())
        back = project_to_pi(field)
        assert back.norm < 1e-10, Y.label


def test_projection_linearity():
    grid = AnnulusGrid(0.5, 2.0, 12, 16, 16)
    P = PiProfile((0.2, 1.0, 0.0, -0.5))
    Y = HARMONICS[2]
    mixed = P.as_field(grid).values + np.broadcast_to(Y.on_grid(grid), grid.shape)
    back = project_to_pi(ScalarField(grid, mixed.copy()))
    assert np.asarray(back.b) == pytest.approx(np.asarray(P.b), abs=1e-10)


def test_projection_requires_annulus():
    from bicap.sphgrid import VoxelGrid

    g = VoxelGrid.cube(1.0, 9)
    with pytest.raises(TypeError):
        project_to_pi(ScalarField(g, np.zeros(g.dims)))
