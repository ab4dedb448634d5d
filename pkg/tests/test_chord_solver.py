import math

import numpy as np
import pytest

from src.anisotropy import ellipse, hexagon, l1, l2, lp
from src.chord_solver import (
    ENTER,
    EXIT,
    evaluate,
    interior_ball_check,
    level_arcs,
    level_grid,
    modulus_check,
    solve_regularized,
    solve_strict,
    trace_check,
)
from src.domain import constant_data, cos_data, disk, linear_data, square, superellipse, two_bump_data
from src.errors import DomainError, HypothesisError, NotUniformlyConvexError


def _interior_points(n=400, radius=0.7, seed=0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    a = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.stack([r * np.cos(a), r * np.sin(a)], axis=1)


def test_level_arcs_single_arc(unit_disk, cos_f):
    arcs = level_arcs(unit_disk, cos_f, 0.3)
    assert len(arcs) == 2
    assert sorted(arcs.labels) == sorted([ENTER, EXIT])
    assert np.allclose(arcs.points[:, 0], 0.3, atol=1e-12)
    assert len(arcs.arcs) == 1
    assert not arcs.perturbed


def test_level_arcs_outside_range(unit_disk, cos_f):
    assert level_arcs(unit_disk, cos_f, -2.0).full
    assert level_arcs(unit_disk, cos_f, 2.0).empty


def test_level_hitting_a_sample_is_shifted(unit_disk, cos_f):
    t = float(cos_f.values[10])
    arcs = level_arcs(unit_disk, cos_f, t, value_tol=1e-9)
    assert arcs.perturbed
    assert 0 < arcs.t - t <= 4e-9
    assert len(arcs) == 2
    # the maximum itself is shifted past the range
    assert level_arcs(unit_disk, cos_f, 1.0).empty


def test_level_grid():
    f = cos_data(disk(1.0, 64))
    assert level_grid(f, 5).tolist() == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])
    assert level_grid(f, 1).tolist() == pytest.approx([0.0])
    assert level_grid(f, [0.1, 0.2]).tolist() == [0.1, 0.2]
    with pytest.raises(ValueError):
        level_grid(f, 0)


@pytest.mark.parametrize("norm", [l2(), lp(3.0), ellipse([[1.0, 0.3], [0.3, 2.0]])], ids=lambda n: n.form)
def test_linear_data_is_reproduced(unit_disk, linear_f, norm):
    # every level of <x, e1> is a single vertical chord whatever the strictly convex norm
    family = solve_strict(norm, unit_disk, linear_f, levels=101)
    pts = _interior_points()
    assert np.allclose(family.evaluate(pts), pts[:, 0], atol=1e-6)


def test_cos_data_solution(unit_disk, cos_f):
    family = solve_strict(l2(), unit_disk, cos_f, levels=101)
    assert len(family) == 101
    assert family.check_nesting()["nested"]
    assert family.check_disjoint()["disjoint"]
    assert family.check_adjacent_crossings() == []
    assert family.endpoint_residual() < 1e-9
    trace = trace_check(family, cos_f)
    assert trace["max_deviation"] <= 1e-3
    assert evaluate(family, [0.25, 0.1]) == pytest.approx(0.25, abs=1e-6)


def test_trace_reaches_the_extremes(unit_disk, cos_f):
    family = solve_strict(l2(), unit_disk, cos_f, levels=101)
    s = np.array([0.0, 0.5 * unit_disk.perimeter])
    assert family.trace(s) == pytest.approx(cos_f(s), abs=1e-3)


def test_truncated_level_grid_shows_in_the_trace(unit_disk, cos_f):
    family = solve_strict(l2(), unit_disk, cos_f, levels=np.linspace(-0.5, 0.5, 51))
    trace = trace_check(family, cos_f)
    assert trace["max_deviation"] == pytest.approx(0.5, abs=0.01)


def test_evaluate_outside_raises(unit_disk, cos_f):
    family = solve_strict(l2(), unit_disk, cos_f, levels=21)
    with pytest.raises(DomainError):
        family.evaluate([[1.5, 0.0]])


def test_raster_and_geometry(unit_disk, cos_f):
    family = solve_strict(l2(), unit_disk, cos_f, levels=21)
    xs, ys, U = family.raster(32)
    assert U.shape == (32, 32)
    assert np.isnan(U[0, 0])
    inside = ~np.isnan(U)
    assert np.all(U[inside] >= -1.0 - 1e-6) and np.all(U[inside] <= 1.0 + 1e-6)
    geometry = family.level_geometry()
    assert len(geometry) == 21
    assert all({"t", "full", "curves"} <= set(lv) for lv in geometry)


def test_two_bump_data_gives_two_chords(unit_disk):
    f = two_bump_data(unit_disk, (1.0, 0.6))
    family = solve_strict(l2(), unit_disk, f, levels=51)
    counts = [len(lv.curves) for lv in family.levels]
    assert max(counts) == 2
    assert family.check_nesting()["nested"]
    assert family.check_disjoint()["disjoint"]


def test_constant_data(unit_disk):
    f = constant_data(unit_disk, 0.7)
    family = solve_strict(l2(), unit_disk, f)
    assert len(family) == 1
    assert np.allclose(family.evaluate(_interior_points(20)), 0.7)


def test_hypotheses_are_checked(unit_disk, cos_f):
    with pytest.raises(HypothesisError):
        solve_strict(l1(), unit_disk, cos_f)
    with pytest.raises(HypothesisError):
        solve_strict(hexagon(), unit_disk, cos_f)
    sq = square(1.0)
    with pytest.raises(HypothesisError):
        solve_strict(l2(), sq, cos_data(sq))
    with pytest.raises(HypothesisError):
        solve_regularized(l1(), sq, cos_data(sq), [0.5])


def test_regularized_schedule(unit_disk, cos_f):
    family, report = solve_regularized(l1(), unit_disk, cos_f, [0.125, 0.5, 0.25], levels=41, sample_grid=16)
    assert report.eps == [0.5, 0.25, 0.125]
    assert len(report.sup_distances) == 2
    assert not report.collapsed
    assert len(family) == 41
    assert family.check_nesting()["nested"]
    assert report.to_dict()["eps"] == [0.5, 0.25, 0.125]


def test_regularized_collapses_for_strictly_convex_norm(unit_disk, cos_f):
    _, report = solve_regularized(l2(), unit_disk, cos_f, [0.5, 0.25], levels=21)
    assert report.collapsed
    assert report.eps == []


def test_regularized_rejects_bad_schedule(unit_disk, cos_f):
    with pytest.raises(ValueError):
        solve_regularized(l1(), unit_disk, cos_f, [], levels=11)
    with pytest.raises(ValueError):
        solve_regularized(l1(), unit_disk, cos_f, [0.5, 0.0], levels=11)


def test_modulus_check_for_linear_data():
    dom = disk(1.0, 256)
    f = linear_data(dom)
    family = solve_strict(l2(), dom, f, levels=101)
    report = modulus_check(family, dom, f.modulus, pairs=5000, pool=500)
    assert report["passed"]
    assert report["exponent"] == pytest.approx(0.5)
    assert report["c_omega"] == pytest.approx(4.0, rel=1e-2)
    assert report["solution_holder_exponent"] == pytest.approx(0.5)


def test_interior_ball_check(unit_disk, cos_f):
    family = solve_strict(l2(), unit_disk, cos_f, levels=21)
    report = interior_ball_check(family, n=200)
    assert report["plateau_points"] > 0
    assert report["min_radius"] > 0


@pytest.mark.slow
def test_regularized_l1_along_halving_schedule(unit_disk, cos_f):
    schedule = [2.0 ** -k for k in range(11)]
    family, report = solve_regularized(l1(), unit_disk, cos_f, schedule, levels=101)
    assert len(report.sup_distances) == 10
    assert report.monotone_tail
    assert report.cauchy and not report.warning
    assert report.trace_deviation <= 1e-3
    modulus = modulus_check(family, unit_disk, cos_f.modulus, pairs=20_000, pool=1000)
    assert modulus["passed"]
    assert modulus["max_ratio"] <= 1.0 + 1e-3


def test_modulus_check_beta_mode_uses_one_exponent():
    dom = superellipse(4.0, 256)
    f = linear_data(dom)
    family = solve_strict(l2(), dom, f, levels=101)
    report = modulus_check(family, dom, f.modulus, beta_mode=True, pairs=5000, pool=500)
    assert report["beta"] == pytest.approx(2.0)
    assert report["exponent"] == pytest.approx(0.25)
    assert report["c_omega"] == pytest.approx(dom.regularity_constant(2.0))
    assert report["passed"]

    try:
        a0 = dom.uniform_convexity_coefficient(0.0)
    except NotUniformlyConvexError:
        with pytest.raises(NotUniformlyConvexError):
            modulus_check(family, dom, f.modulus, pairs=5000, pool=500)
        return
    plain = modulus_check(family, dom, f.modulus, pairs=5000, pool=500)
    assert plain["beta"] == 0.0
    assert plain["exponent"] == pytest.approx(0.5)
    assert plain["c_omega"] == pytest.approx(dom.diameter + 1.0 / a0)
    assert plain["c_omega"] != pytest.approx(report["c_omega"])
