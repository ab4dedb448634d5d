import math

import numpy as np
import pytest

from src.anisotropy import example_two_facet, hexagon, l1, l2, lp
from src.chord_solver import ENTER, EXIT, enumerate_noncrossing, matching_cost, optimal_matching
from src.errors import MatchingError


def _convex_position(n, seed):
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
    radii = rng.uniform(0.8, 1.2)
    return radii * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def _alternating(n, first=ENTER):
    other = EXIT if first == ENTER else ENTER
    return [first if k % 2 == 0 else other for k in range(n)]


def test_catalan_counts():
    assert len(enumerate_noncrossing(2)) == 1
    assert len(enumerate_noncrossing(4)) == 2
    assert len(enumerate_noncrossing(6)) == 5
    assert len(enumerate_noncrossing(8)) == 14
    with pytest.raises(MatchingError):
        enumerate_noncrossing(5)


@pytest.mark.parametrize("norm", [l2(), l1(), hexagon(0.4), lp(3.0), example_two_facet()], ids=lambda n: n.form)
@pytest.mark.parametrize("n", [4, 6, 8])
def test_dp_matches_brute_force(norm, n):
    for seed in range(5):
        pts = _convex_position(n, seed)
        labels = _alternating(n)
        pairs = optimal_matching(norm, pts, labels)
        best = min(matching_cost(norm, pts, m) for m in enumerate_noncrossing(n))
        assert matching_cost(norm, pts, pairs) == pytest.approx(best, abs=1e-12)
        assert len(pairs) == n // 2
        assert sorted(k for p in pairs for k in p) == list(range(n))


def test_rectangle_prefers_short_sides():
    pts = np.array([[2.0, 1.0], [-2.0, 1.0], [-2.0, -1.0], [2.0, -1.0]])
    pairs = optimal_matching(l2(), pts, [ENTER, EXIT, ENTER, EXIT])
    assert pairs == [(0, 3), (1, 2)]


def test_arclength_reordering():
    pts = np.array([[2.0, 1.0], [-2.0, 1.0], [-2.0, -1.0], [2.0, -1.0]])
    perm = [2, 0, 3, 1]
    arcs = np.array([0.0, 1.0, 2.0, 3.0])[perm]
    labels = [[ENTER, EXIT, ENTER, EXIT][k] for k in perm]
    pairs = optimal_matching(l2(), pts[perm], labels, arclength=arcs)
    # indices refer to the permuted input
    mapped = sorted(tuple(sorted((perm[i], perm[j]))) for i, j in pairs)
    assert mapped == [(0, 3), (1, 2)]


def test_ties_prefer_fewer_crossings_with_previous_level():
    # a square: both matchings cost the same under l2
    pts = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
    labels = [ENTER, EXIT, ENTER, EXIT]
    vertical_prev = np.array([[[0.0, -2.0], [0.0, 2.0]]])
    horizontal_prev = np.array([[[-2.0, 0.0], [2.0, 0.0]]])
    # pairs (0,1),(2,3) are horizontal chords and cross the vertical previous chord twice
    assert optimal_matching(l2(), pts, labels, previous_chords=vertical_prev) == [(0, 3), (1, 2)]
    assert optimal_matching(l2(), pts, labels, previous_chords=horizontal_prev) == [(0, 1), (2, 3)]


def test_label_validation():
    pts = _convex_position(4, 0)
    with pytest.raises(MatchingError):
        optimal_matching(l2(), pts[:3], [ENTER, EXIT, ENTER])
    with pytest.raises(MatchingError):
        optimal_matching(l2(), pts, [ENTER, ENTER, EXIT, EXIT])
    assert optimal_matching(l2(), np.empty((0, 2)), []) == []
