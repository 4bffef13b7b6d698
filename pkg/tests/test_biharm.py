"""Clamped-plate experiments: solves, Green columns, gradient bounds, decay."""

import math

import numpy as np
import pytest

from bicap.biharm import (
    DirichletProblem,
    default_pairs,
    free_space_mixed_oracle,
    green_sample,
    mixed_gradient_sup,
    punctured_ball_demo,
    riesz_estimate_check,
    solve_dirichlet,
)
from bicap.fields import voxel_bump_field
from bicap.sphgrid import VoxelGrid

from conftest import STABILITY_CASES


def _ball_mask(grid, r2=0.81):
    x, y, z = grid.coords()
    return x * x + y * y + z * z < r2


def test_variational_identity_on_masked_ball():
    grid = VoxelGrid.cube(1.0, 25)
    mask = _ball_mask(grid)
    src = voxel_bump_field(grid, center=(0.2, -0.1, 0.15), radius=0.3)
    rhs = np.where(mask, src.values, 0.0)
    sol = solve_dirichlet(DirichletProblem(grid, mask, rhs=rhs, tol=1e-10))
    assert sol.variational_defect < 1e-10
    assert sol.energy > 0.0
    assert sol.load_product == pytest.approx(sol.energy, rel=1e-10)
    # the minimiser vanishes off the mask
    assert np.all(sol.field.values[~mask] == 0.0)


def test_zero_load_gives_zero_field():
    grid = VoxelGrid.cube(1.0, 17)
    mask = _ball_mask(grid)
    sol = solve_dirichlet(DirichletProblem(grid, mask, rhs=None))
    assert sol.energy == 0.0
    assert sol.load_product == 0.0
    assert np.all(sol.field.values == 0.0)


def test_problem_validation():
    grid = VoxelGrid.cube(1.0, 17)
    mask = _ball_mask(grid)
    with pytest.raises(ValueError, match="mask does not match"):
        DirichletProblem(grid, mask[:-1])
    with pytest.raises(ValueError, match="empty"):
        DirichletProblem(grid, np.zeros(grid.dims, bool))
    two = np.zeros(grid.dims, bool)
    two[2:4, 2:4, 2:4] = True
    two[10:13, 10:13, 10:13] = True
    with pytest.raises(ValueError, match="connected"):
        DirichletProblem(grid, two)
    bad_rhs = np.ones(grid.dims)
    with pytest.raises(ValueError, match="supported inside"):
        DirichletProblem(grid, mask, rhs=bad_rhs)
    with pytest.raises(ValueError, match="rhs does not match"):
        DirichletProblem(grid, mask, rhs=np.zeros((3, 3, 3)))


def test_green_columns_are_symmetric():
    grid = VoxelGrid.cube(1.0, 33)
    mask = _ball_mask(grid)
    pts = [(10, 16, 16), (16, 20, 16), (20, 16, 12)]
    cols = {p: green_sample(grid, mask, p, tol=1e-10) for p in pts}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            a = cols[pts[i]].value(pts[j])
            b = cols[pts[j]].value(pts[i])
            assert a == pytest.approx(b, rel=1e-10)
            assert a > 0.0


def test_green_source_must_be_interior():
    grid = VoxelGrid.cube(1.0, 17)
    mask = _ball_mask(grid)
    with pytest.raises(ValueError, match="grid boundary"):
        green_sample(grid, mask, (0, 8, 8))
    edge = tuple(np.argwhere(mask)[0])  # a mask node with outside neighbours
    with pytest.raises(ValueError, match="not interior"):
        green_sample(grid, mask, edge)


def test_free_space_mixed_oracle_closed_form():
    assert free_space_mixed_oracle() == math.sqrt(2.0) / (8.0 * math.pi)


def test_mixed_gradient_rejects_bad_pairs():
    grid = VoxelGrid.cube(1.0, 25)
    mask = _ball_mask(grid)
    good = default_pairs(grid, mask)
    with pytest.raises(ValueError, match="at least 16"):
        mixed_gradient_sup(grid, mask, good[:4])
    close = list(good)
    close[0] = ((12, 12, 12), (12, 12, 14))  # two cells apart
    with pytest.raises(ValueError, match="four cells"):
        mixed_gradient_sup(grid, mask, close)
    outside = list(good)
    outside[0] = ((1, 1, 1), good[0][1])  # corner node is off the ball
    with pytest.raises(ValueError, match="not interior"):
        mixed_gradient_sup(grid, mask, outside)


def test_default_pairs_are_deterministic_and_separated():
    grid = VoxelGrid.cube(1.0, 33)
    mask = _ball_mask(grid)
    p1 = default_pairs(grid, mask, seed=3)
    p2 = default_pairs(grid, mask, seed=3)
    p3 = default_pairs(grid, mask, seed=4)
    assert p1 == p2
    assert p1 != p3
    assert len(p1) == 16
    for x, y in p1:
        assert np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)) >= 4.0
    tiny = VoxelGrid.cube(1.0, 7)
    with pytest.raises(ValueError, match="targets away|too small"):
        default_pairs(tiny, np.ones(tiny.dims, bool))


def test_punctured_ball_report(punctured_demo):
    rep, _ = punctured_demo
    assert rep.n == 49
    # unit-speed radial field near the puncture
    assert 0.95 <= rep.sup_grad_core <= 1.05
    assert rep.sup_grad_core == pytest.approx(1.0, rel=1e-6)
    # gradient directions at (h,0,0) and (0,0,h) are orthogonal radial rays
    assert math.degrees(rep.gradient_angle) >= 85.0
    assert rep.grad_x_axis == pytest.approx([1.0, 0.0, 0.0], abs=1e-9)
    assert rep.grad_z_axis == pytest.approx([0.0, 0.0, 1.0], abs=1e-9)
    # the volume load vanishes identically near the puncture and the field
    # vanishes identically outside the transition shell
    assert rep.rhs_inner_sup == 0.0
    assert rep.boundary_max == 0.0
    assert rep.rhs_shell_sup > 0.0
    assert rep.energy > 0.0


def test_punctured_ball_even_size_is_bumped():
    assert punctured_ball_demo(48).n == 49
    with pytest.raises(ValueError, match="n >= 32"):
        punctured_ball_demo(16)


def test_riesz_zero_data_reports_zero():
    grid = VoxelGrid.cube(1.0, 17)
    rep = riesz_estimate_check(grid, sample_nodes=[(8, 8, 8)])
    assert rep.samples == ((0.0, 0.0),)
    assert rep.ratio_sup == 0.0


def test_riesz_majorant_dominates_gradient():
    grid = VoxelGrid.cube(1.0, 33)
    bump = voxel_bump_field(grid, center=(0.0, 0.0, 0.0), radius=0.5).values
    f = np.stack([1.0 * bump, -0.5 * bump, 0.25 * bump])
    nodes = [(16, 16, 16), (12, 16, 16), (16, 20, 12), (10, 10, 10)]
    rep = riesz_estimate_check(grid, f_vec=f, h_scal=0.7 * bump, sample_nodes=nodes)
    assert 0.0 < rep.ratio_sup <= 1.0
    for lhs, rhs in rep.samples:
        assert lhs <= rhs
    rep_f = riesz_estimate_check(grid, f_vec=f, sample_nodes=nodes)
    assert 0.0 < rep_f.ratio_sup <= 1.0


def test_riesz_validation():
    grid = VoxelGrid.cube(1.0, 17)
    with pytest.raises(ValueError, match="sample node"):
        riesz_estimate_check(grid)
    with pytest.raises(ValueError, match="shape"):
        riesz_estimate_check(grid, f_vec=np.zeros(grid.dims), sample_nodes=[(8, 8, 8)])
    bad = np.ones(grid.dims)
    with pytest.raises(ValueError, match="supported inside"):
        riesz_estimate_check(grid, h_scal=bad, sample_nodes=[(8, 8, 8)])


@pytest.mark.slow
@pytest.mark.parametrize("name", STABILITY_CASES)
def test_mixed_gradient_stable_under_refinement(stability_reports, name):
    reports, _ = stability_reports
    coarse, fine = reports[name][48], reports[name][64]
    assert coarse.mixed_sup > 0.0 and coarse.grad_sup > 0.0
    assert abs(fine.mixed_sup - coarse.mixed_sup) / coarse.mixed_sup < 0.10
    assert abs(fine.grad_sup - coarse.grad_sup) / coarse.grad_sup < 0.10
    assert len(coarse.pair_values) >= 16


@pytest.mark.slow
def test_deep_interior_hessian_matches_free_space(freespace_report):
    rep, _ = freespace_report
    oracle = free_space_mixed_oracle()
    for _, mixed, _ in rep.pair_values:
        assert abs(mixed - oracle) / oracle < 0.15
    assert len(rep.pair_values) == 18


@pytest.mark.slow
def test_gradient_sup_decays_with_capacity_sum(decay_report):
    rep, _ = decay_report
    every = rep.config("every")
    assert every.slope_vs_s is not None and every.slope_vs_s < 0.0
    assert every.r2_vs_s >= 0.8
    none = rep.config("none")
    assert none.no_layers
    assert np.all(none.s_values == 0.0)
    assert none.slope_vs_s is None
    assert abs(none.slope_vs_l) <= 0.05
    alt = rep.config("alternate")
    assert alt.slope_vs_s is not None and alt.slope_vs_s < 0.0
    # more obstructed layers -> smaller interior sup, at every radius
    assert np.all(none.sup_values >= alt.sup_values)
    assert np.all(alt.sup_values >= every.sup_values)
