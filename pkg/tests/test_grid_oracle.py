import math

import numpy as np
import pytest

from src.anisotropy import hexagon, l1, l2, regularize
from src.chord_solver import solve_strict
from src.counterexamples import nonunique_pair
from src.domain import linear_data
from src.grid_oracle import (
    GridFunction,
    PolarBallProjector,
    compare,
    harmonic_start,
    minimize_tv,
    polar_value,
    project_polar_ball,
    project_polygon,
    restart_spread,
)


def _linear_grid(domain, f, resolution):
    return GridFunction.from_callable(domain, f, lambda p: p[:, 0], resolution)


def test_grid_layout(unit_disk, cos_f):
    grid = GridFunction(unit_disk, cos_f, 40)
    assert grid.shape == (40, 40)
    assert grid.interior.sum() * grid.cell_area == pytest.approx(unit_disk.area, rel=0.05)
    assert not np.any(grid.interior & grid.boundary)
    assert np.all(grid.gradient_mask[grid.interior])
    with pytest.raises(ValueError):
        GridFunction(unit_disk, cos_f, 4)
    with pytest.raises(ValueError):
        GridFunction(unit_disk, cos_f, 16, values=np.zeros((8, 8)))


def test_divergence_is_negative_adjoint(unit_disk, cos_f):
    grid = GridFunction(unit_disk, cos_f, 32)
    rng = np.random.default_rng(0)
    u = rng.normal(size=grid.shape)
    p = rng.normal(size=(2,) + grid.shape)
    lhs = float(np.sum(grid.gradient(u) * p))
    rhs = -float(np.sum(u * grid.divergence(p)))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-8)


def test_linear_raster_energies(unit_disk, linear_f):
    grid = _linear_grid(unit_disk, linear_f, 64)
    # one-sided differences of x are (1, 0) on every interior cell with an interior neighbour along x
    m = grid.interior
    nb = np.zeros_like(m)
    nb[:-1, :] |= m[1:, :]
    nb[1:, :] |= m[:-1, :]
    expected = grid.cell_area * np.sum(m & nb)
    assert grid.interior_tv(l2()) == pytest.approx(expected, rel=1e-9)
    assert grid.interior_tv(l1()) == pytest.approx(expected, rel=1e-9)
    assert grid.coarea_tv(l2()) == pytest.approx(unit_disk.area, rel=0.1)


def test_plane_fit_trace_is_exact_for_linear_values(unit_disk, linear_f):
    grid = _linear_grid(unit_disk, linear_f, 48)
    s = np.linspace(0.0, unit_disk.perimeter, 64, endpoint=False)
    assert np.allclose(grid.trace(s), unit_disk.point_at(s)[:, 0], atol=1e-6)


def test_level_segments_of_linear_raster(unit_disk, linear_f):
    grid = _linear_grid(unit_disk, linear_f, 64)
    segs = grid.level_segments(0.013)
    assert len(segs) > 0
    assert np.allclose(segs[:, :, 0], 0.013, atol=1e-9)
    assert grid.level_length(l2(), 0.013) == pytest.approx(2.0, abs=0.2)


def test_project_polygon():
    square = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    z = np.array([[0.5, 0.2], [3.0, 0.0], [2.0, 2.0]])
    out = project_polygon(z, square)
    assert np.allclose(out, [[0.5, 0.2], [1.0, 0.0], [1.0, 1.0]])


def test_polar_ball_projection_l2_and_l1():
    assert np.allclose(project_polar_ball(l2(), [3.0, 4.0]), [0.6, 0.8])
    assert np.allclose(project_polar_ball(l2(), [0.3, 0.4]), [0.3, 0.4])
    # the polar ball of l1 is the l_inf box
    assert np.allclose(project_polar_ball(l1(), [2.0, 0.5]), [1.0, 0.5])
    # phi + eps l2 has polar ball box + eps disk
    proj = PolarBallProjector(regularize(l1(), 0.1))
    assert proj.box and proj.radius == pytest.approx(0.1)
    assert np.allclose(proj(np.array([5.0, 0.0])), [1.1, 0.0])


@pytest.mark.parametrize("norm", [l1(), l2(), hexagon(0.3), regularize(hexagon(), 0.2)], ids=lambda n: n.form)
def test_projection_lands_in_polar_ball(norm):
    rng = np.random.default_rng(1)
    z = 3.0 * rng.normal(size=(200, 2))
    w = PolarBallProjector(norm)(z)
    assert np.all(polar_value(norm, w) <= 1.0 + 1e-6)
    # already feasible points are left in place
    small = 0.1 * z / np.linalg.norm(z, axis=1)[:, None] / norm.gamma_upper
    assert np.allclose(PolarBallProjector(norm)(small), small)


def test_harmonic_start_keeps_pinned_cells(unit_disk, cos_f):
    grid = GridFunction(unit_disk, cos_f, 32)
    u = harmonic_start(grid, sweeps=20)
    assert np.array_equal(u[~grid.interior], grid.values[~grid.interior])
    assert np.all(u[grid.interior] >= cos_f.min - 1e-12)
    assert np.all(u[grid.interior] <= cos_f.max + 1e-12)


def test_minimize_tv_rejects_small_grid(unit_disk, cos_f):
    with pytest.raises(ValueError):
        minimize_tv(l2(), unit_disk, cos_f, resolution=16)


def test_minimize_tv_reduces_noisy_energy(unit_disk, linear_f):
    grid = _linear_grid(unit_disk, linear_f, 32)
    rng = np.random.default_rng(0)
    noisy = grid.values + np.where(grid.interior, rng.normal(size=grid.shape), 0.0)
    start = grid.dirichlet_energy(l2(), noisy)
    result = minimize_tv(l2(), unit_disk, linear_f, resolution=32, iters=300, tol=0.0, init=noisy,
                         divergence_window=10 ** 6)
    assert result.iterations == 300
    assert len(result.energies) == len(result.gaps) == 300
    assert result.energy < 0.5 * start
    out = result.grid
    assert np.array_equal(out.values[~out.interior], grid.values[~grid.interior])
    assert set(result.to_dict()) >= {"iterations", "converged", "energy", "gap", "resolution", "h"}


@pytest.mark.slow
def test_minimize_tv_approaches_linear_energy(unit_disk, linear_f):
    reference = _linear_grid(unit_disk, linear_f, 32).dirichlet_energy(l2())
    result = minimize_tv(l2(), unit_disk, linear_f, resolution=32, iters=2000, tol=0.0,
                         divergence_window=10 ** 6)
    assert result.energy <= 1.25 * reference


def test_compare_linear_family_with_linear_raster(unit_disk, linear_f):
    family = solve_strict(l2(), unit_disk, linear_f, levels=101)
    grid = _linear_grid(unit_disk, linear_f, 32)
    report = compare(family, grid, l2())
    assert report["cells"] == int(grid.interior.sum())
    assert report["sup"] < 0.025
    assert report["l1"] < 0.02 * unit_disk.area
    assert report["energy_family"] == pytest.approx(math.pi, rel=0.05)


def _raster_of(solution, grid):
    vals = grid.values.copy()
    vals[grid.interior] = solution.evaluate(grid.interior_points(), check_inside=False)
    return vals


def test_restart_spread_needs_two_runs(unit_disk, cos_f):
    with pytest.raises(ValueError):
        restart_spread(l2(), unit_disk, cos_f, seeds=(0,), resolution=32, iters=2, tol=0.0)


@pytest.mark.slow
def test_restarts_agree_for_strictly_convex_norm(unit_disk, cos_f):
    tol = 1e-3
    report = restart_spread(l2(), unit_disk, cos_f, seeds=(0, 1, 2), noise=0.02, resolution=32,
                            iters=3000, tol=tol, divergence_window=10 ** 6)
    assert report["runs"] == 3
    assert report["l1_spread"] <= 10 * tol
    assert report["energy_spread"] <= 10 * tol


@pytest.mark.slow
def test_restarts_keep_distinct_minimizers_for_l1(unit_disk):
    # both starts are monotone along each axis, so both attain the row and column telescoping bound
    tol = 1e-3
    pair = nonunique_pair(l1(), unit_disk, band_fraction=0.4, kappa=0.9)
    f = linear_data(unit_disk, pair.report["nu0"])
    grid = GridFunction(unit_disk, f, 64)
    inits = [_raster_of(pair.baseline, grid), _raster_of(pair.solution, grid)]
    assert grid.l1_distance(inits[1]) > 10 * tol
    report = restart_spread(l1(), unit_disk, f, inits=inits, resolution=64, iters=300, tol=tol,
                            divergence_window=10 ** 6)
    assert report["l1_spread"] > 5 * tol
    lo, hi = min(report["energies"]), max(report["energies"])
    assert hi == pytest.approx(lo, rel=0.02)


def test_energy_trace_nonincreasing_after_burn_in(unit_disk, cos_f):
    result = minimize_tv(l2(), unit_disk, cos_f, resolution=32, iters=200, tol=0.0, burn_in=50,
                         init_sweeps=5, divergence_window=10 ** 6)
    assert len(result.raw_energies) == len(result.energies) == 200
    tail = np.asarray(result.energies[50:])
    assert np.all(np.diff(tail) <= 1e-10)
    assert result.energy == pytest.approx(min(result.raw_energies[50:]))
    assert result.grid.dirichlet_energy(l2()) == pytest.approx(result.energy)


@pytest.mark.slow
@pytest.mark.parametrize("norm", [l2(), regularize(l1(), 0.05)], ids=["l2", "l1+0.05l2"])
def test_solver_agrees_with_oracle_on_cos_data(unit_disk, cos_f, norm):
    family = solve_strict(norm, unit_disk, cos_f, levels=101)
    result = minimize_tv(norm, unit_disk, cos_f, resolution=256, iters=500, tol=1e-4)
    report = compare(family, result.grid, norm)
    assert report["l1"] <= 0.02 * cos_f.oscillation * unit_disk.area
    assert report["energy_grid"] == pytest.approx(report["energy_family"], rel=0.02)
