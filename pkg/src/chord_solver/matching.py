"""Cheapest non-crossing chord system on 2k boundary points by interval dynamic programming."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.anisotropy import AnisotropyNorm
from src.chord_solver.levels import ENTER, EXIT, segments_cross
from src.errors import MatchingError
from src.utils import get_logger, rotate_ccw

logger = get_logger(__name__)


def _validate_labels(labels: Sequence[str]):
    if len(labels) % 2:
        raise MatchingError(f"Odd number of endpoints ({len(labels)})")
    for a, b in zip(labels, list(labels[1:]) + list(labels[:1])):
        if a not in (ENTER, EXIT) or a == b:
            raise MatchingError("Endpoint labels must alternate enter/exit in cyclic order")


def optimal_matching(norm: AnisotropyNorm, points, labels: Sequence[str],
                     arclength: Optional[Sequence[float]] = None,
                     previous_chords: Optional[np.ndarray] = None,
                     tie_tol: float = 1e-12) -> List[Tuple[int, int]]:
    """
    Non-crossing perfect matching of the endpoints minimising the total
    anisotropic chord length phi(R(p_m - p_i)).

    Endpoints are taken in cyclic boundary order (re-sorted by `arclength`
    when given). Among matchings within `tie_tol` of the optimum, those
    crossing fewer of `previous_chords` (an (n, 2, 2) array) win, then the
    lexicographically smallest pairing. Returned index pairs refer to the
    input order.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    order = np.arange(n) if arclength is None else np.argsort(np.asarray(arclength), kind="stable")
    pts = pts[order]
    labels = [labels[i] for i in order]
    _validate_labels(labels)
    if n == 0:
        return []

    diff = pts[None, :, :] - pts[:, None, :]
    cost = norm.evaluate(rotate_ccw(diff.reshape(-1, 2))).reshape(n, n)

    crossings = np.zeros((n, n))
    if previous_chords is not None and len(previous_chords):
        prev = np.asarray(previous_chords, float)
        ii, jj = np.triu_indices(n, 1)
        hit = segments_cross(pts[ii], pts[jj], prev[:, 0], prev[:, 1]).sum(axis=1)
        crossings[ii, jj] = hit
        crossings[jj, ii] = hit

    # best[i][j]: (cost, crossings) of the optimal matching of points i..j (inclusive)
    best_cost = np.zeros((n + 1, n + 1))
    best_cross = np.zeros((n + 1, n + 1))
    choice = -np.ones((n + 1, n + 1), dtype=int)
    for length in range(2, n + 1, 2):
        for i in range(0, n - length + 1):
            j = i + length - 1
            c_best, x_best, m_best = np.inf, np.inf, -1
            for m in range(i + 1, j + 1, 2):
                inner_c = best_cost[i + 1][m - 1] if m - 1 >= i + 1 else 0.0
                inner_x = best_cross[i + 1][m - 1] if m - 1 >= i + 1 else 0.0
                outer_c = best_cost[m + 1][j] if m + 1 <= j else 0.0
                outer_x = best_cross[m + 1][j] if m + 1 <= j else 0.0
                c = cost[i, m] + inner_c + outer_c
                x = crossings[i, m] + inner_x + outer_x
                if c < c_best - tie_tol or (abs(c - c_best) <= tie_tol and x < x_best):
                    c_best, x_best, m_best = c, x, m
            best_cost[i][j], best_cross[i][j], choice[i][j] = c_best, x_best, m_best

    pairs: List[Tuple[int, int]] = []
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if i >= j:
            continue
        m = int(choice[i][j])
        pairs.append((int(order[i]), int(order[m])))
        stack.append((i + 1, m - 1))
        stack.append((m + 1, j))
    logger.debug(f"[MATCHING] {n} endpoints, cost={best_cost[0][n - 1]:.6g}, crossings={best_cross[0][n - 1]:.0f}")
    return sorted(tuple(sorted(p)) for p in pairs)


def matching_cost(norm: AnisotropyNorm, points, pairs: Sequence[Tuple[int, int]]) -> float:
    pts = np.asarray(points, dtype=float)
    return float(sum(norm.evaluate(rotate_ccw(pts[j] - pts[i])) for i, j in pairs))


def enumerate_noncrossing(n: int) -> List[List[Tuple[int, int]]]:
    """All non-crossing perfect matchings of n points in convex position (brute-force oracle)."""
    def rec(lo, hi):
        if lo > hi:
            return [[]]
        out = []
        for m in range(lo + 1, hi + 1, 2):
            for inner in rec(lo + 1, m - 1):
                for outer in rec(m + 1, hi):
                    out.append([(lo, m)] + inner + outer)
        return out

    if n % 2:
        raise MatchingError(f"Odd number of endpoints ({n})")
    return rec(0, n - 1)
