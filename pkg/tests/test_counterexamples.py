import math

import numpy as np
import pytest

from src.anisotropy import example_two_facet, hexagon, l1, l2
from src.counterexamples import (
    INDETERMINATE,
    SATISFIED,
    STAIRCASE,
    TRIANGLE,
    VIOLATED,
    barrier_check,
    cantor_function,
    facet_perturbation,
    non_sbv_minimizer,
    non_w11_minimizer,
    nonunique_pair,
    perturbation_report,
    vanishing_l1_family,
)
from src.domain import disk, lens, square
from src.errors import ConstructionError, NoFacetError
from src.utils import rotate_cw

DIAGONAL = [(-0.5, -0.5), (0.5, 0.5)]


def test_cantor_function_values():
    assert cantor_function(0.0) == pytest.approx(0.0)
    assert cantor_function(1.0) == pytest.approx(1.0)
    assert cantor_function(0.5) == pytest.approx(0.5)
    assert cantor_function(0.25, depth=40) == pytest.approx(1.0 / 3.0, abs=1e-9)
    x = np.linspace(0.0, 1.0, 2001)
    assert np.all(np.diff(cantor_function(x)) >= 0)


@pytest.mark.parametrize("norm", [l1(), hexagon()], ids=lambda n: n.form)
def test_nonunique_pair_ties(norm):
    report = nonunique_pair(norm).report
    assert report["energy_difference"] <= 1e-8
    assert report["trace_difference"] <= 1e-9
    assert report["differing_points"] > 0
    assert report["normals_on_facet"]


def test_nonunique_pair_needs_a_facet():
    with pytest.raises(NoFacetError):
        nonunique_pair(l2())


def test_non_w11_jump_equals_band_width():
    report = non_w11_minimizer(l1()).report
    assert report["jump"] == pytest.approx(report["band_width"], abs=1e-6)
    assert report["energy_difference"] <= 1e-8
    assert report["normals_on_facet"]


def test_non_sbv_recovers_cantor_stairs():
    report = non_sbv_minimizer(l1(), depth=8).report
    assert report["cantor_error"] <= report["cantor_bound"] * (1 + 1e-6) + 1e-9
    assert report["energy_difference"] <= 1e-8
    with pytest.raises(ConstructionError):
        non_sbv_minimizer(l1(), depth=0)


def test_vanishing_family():
    family = vanishing_l1_family(l1(), n=4)
    report = family.report
    assert len(family.solutions) == 4
    assert report["l1_strictly_decreasing"]
    assert report["energy_spread"] <= 1e-6
    assert report["trace_deviation"] < 1e-3
    with pytest.raises(ConstructionError):
        vanishing_l1_family(l1(), n=0)


@pytest.mark.slow
def test_non_sbv_at_depth_twelve():
    report = non_sbv_minimizer(l1(), depth=12, samples=1000).report
    assert report["samples"] == 1000
    assert report["cantor_bound"] == 2.0 ** -12
    assert report["cantor_error"] <= report["cantor_bound"] * (1 + 1e-6) + 1e-9
    assert report["energy_difference"] <= 1e-6


@pytest.mark.parametrize("shape", [TRIANGLE, STAIRCASE])
def test_facet_perturbation_keeps_length(shape):
    chain = facet_perturbation(l1(), disk(1.0, 128), None, DIAGONAL, shape=shape)
    assert len(chain.vertices) > 2
    report = perturbation_report(l1(), DIAGONAL, chain)
    assert report["difference"] <= 1e-12
    # the euclidean length grows
    assert chain.euclidean_length > math.sqrt(2.0)


def _random_admissible_chain(norm, rng):
    facet = norm.facets()[rng.integers(len(norm.facets()))]
    lo, _ = facet.normal_arc
    angle = lo + rng.uniform(0.1, 0.9) * facet.width
    nu = np.array([math.cos(angle), math.sin(angle)])
    p1 = rng.uniform(-0.3, 0.3, 2)
    p2 = p1 + rng.uniform(0.2, 1.0) * rotate_cw(nu)
    if rng.uniform() < 0.5:
        flank = rng.uniform(0.05, 0.95) * facet.signed_margin(nu)
        chain = facet_perturbation(norm, None, facet, [p1, p2], shape=TRIANGLE, flank_angle=flank,
                                   base_fraction=rng.uniform(0.05, 0.45), side=rng.choice([-1.0, 1.0]))
    else:
        chain = facet_perturbation(norm, None, facet, [p1, p2], shape=STAIRCASE, steps=int(rng.integers(1, 7)))
    return [p1, p2], chain


@pytest.mark.parametrize("norm", [l1(), hexagon()], ids=lambda n: n.form)
def test_random_admissible_chains_keep_length(norm):
    rng = np.random.default_rng(7)
    for _ in range(100):
        chord, chain = _random_admissible_chain(norm, rng)
        assert perturbation_report(norm, chord, chain)["difference"] <= 1e-9


def test_facet_perturbation_errors():
    with pytest.raises(NoFacetError):
        facet_perturbation(l1(), None, None, [(-0.5, 0.0), (0.5, 0.0)])
    with pytest.raises(NoFacetError):
        facet_perturbation(l2(), None, None, DIAGONAL)
    with pytest.raises(ConstructionError):
        facet_perturbation(l1(), None, None, DIAGONAL, shape="zigzag")
    with pytest.raises(ConstructionError):
        facet_perturbation(l1(), None, None, [(0.2, 0.2), (0.2, 0.2)])


def test_barrier_strictly_convex_pair():
    assert barrier_check(l2(), disk()).status == SATISFIED


def test_barrier_flat_side():
    result = barrier_check(l1(), square())
    assert result.status == VIOLATED
    assert result.witness["kind"] == "segment"


def test_barrier_facet_on_smooth_boundary():
    result = barrier_check(l1(), disk(1.0, 128))
    assert result.status == VIOLATED
    assert result.witness["kind"] == "wedge"
    assert result.witness["eps"] > 0


def test_barrier_lens_corners():
    narrow = barrier_check(example_two_facet(), lens(math.pi / 16))
    assert narrow.status == SATISFIED
    assert len(narrow.corners) == 2
    wide = barrier_check(example_two_facet(), lens(3 * math.pi / 16))
    assert wide.status == INDETERMINATE
    assert wide.to_dict()["status"] == INDETERMINATE
