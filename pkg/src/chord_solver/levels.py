"""Boundary superlevel arcs {f >= t} and segment geometry shared by the level families."""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from src.domain import BoundaryFunction, ConvexDomain
from src.utils import cross2, get_logger

logger = get_logger(__name__)

ENTER = "enter"
EXIT = "exit"


@dataclass
class LevelArcs:
    """
    Crossings of f = t along the boundary in counterclockwise order. Walking
    counterclockwise, an 'enter' endpoint starts an arc of {f >= t} and the
    following 'exit' endpoint ends it.
    """
    t: float
    requested_t: float
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    arclength: np.ndarray = field(default_factory=lambda: np.empty(0))
    labels: List[str] = field(default_factory=list)
    full: bool = False
    empty: bool = False

    @property
    def perturbed(self) -> bool:
        return self.t != self.requested_t

    @property
    def arcs(self) -> List[Tuple[float, float]]:
        """(s_enter, s_exit) pairs; s_exit may be smaller when the arc wraps past s = 0."""
        if self.full or self.empty or len(self.labels) == 0:
            return []
        first = self.labels.index(ENTER)
        n = len(self.labels)
        order = [(first + k) % n for k in range(n)]
        return [(float(self.arclength[order[k]]), float(self.arclength[order[k + 1]])) for k in range(0, n, 2)]

    def __len__(self):
        return len(self.labels)


def level_arcs(domain: ConvexDomain, f: BoundaryFunction, t: float, value_tol: float = 1e-9) -> LevelArcs:
    """
    Endpoints of f^{-1}(t) by inverse linear interpolation between boundary
    samples. A level hitting a sample value within value_tol is shifted by
    value_tol / 2 so that every crossing is transversal.
    """
    requested = float(t)
    if requested < f.min:
        return LevelArcs(requested, requested, full=True)
    if requested > f.max:
        return LevelArcs(requested, requested, empty=True)

    level = requested
    for _ in range(8):
        if np.min(np.abs(f.values - level)) >= value_tol:
            break
        level += 0.5 * value_tol
    if level != requested:
        logger.debug(f"[LEVELS] level {requested:.12g} shifted to {level:.12g} (hits a boundary sample)")

    g = f.values - level
    if np.all(g > 0):
        return LevelArcs(level, requested, full=True)
    if np.all(g < 0):
        return LevelArcs(level, requested, empty=True)

    g_next = np.roll(g, -1)
    idx = np.flatnonzero(np.sign(g) != np.sign(g_next))
    lam = g[idx] / (g[idx] - g_next[idx])
    points = domain.vertices[idx] + lam[:, None] * domain.edge_vectors[idx]
    arclength = domain.arclength[idx] + lam * domain.edge_lengths[idx]
    labels = [ENTER if g[i] < 0 else EXIT for i in idx]
    return LevelArcs(level, requested, points, arclength, labels)


# --- segment geometry ---------------------------------------------------

def segments_cross(p1, p2, q1, q2, tol: float = 1e-12) -> np.ndarray:
    """
    Proper crossing test between segment arrays p1p2 (shape (n, 2)) and
    q1q2 (shape (m, 2)); returns an (n, m) boolean matrix. Shared endpoints
    and touching do not count.
    """
    p1 = np.asarray(p1, float)[:, None, :]
    p2 = np.asarray(p2, float)[:, None, :]
    q1 = np.asarray(q1, float)[None, :, :]
    q2 = np.asarray(q2, float)[None, :, :]
    d = p2 - p1
    e = q2 - q1
    o1 = cross2(d, q1 - p1)
    o2 = cross2(d, q2 - p1)
    o3 = cross2(e, p1 - q1)
    o4 = cross2(e, p2 - q1)
    scale = tol * np.linalg.norm(d, axis=-1) * np.linalg.norm(e, axis=-1)
    clear = (np.abs(o1) > scale) & (np.abs(o2) > scale) & (np.abs(o3) > scale) & (np.abs(o4) > scale)
    return clear & (o1 * o2 < 0) & (o3 * o4 < 0)


def ray_crossings(origins, ends, seg_a, seg_b) -> np.ndarray:
    """
    (n, m) boolean matrix: segment origins[i] -> ends[i] crosses segment
    seg_a[j] -> seg_b[j], counted half-open on the second segment so that a
    polyline vertex is crossed once.
    """
    o = np.asarray(origins, float)[:, None, :]
    r = np.asarray(ends, float)[:, None, :] - o
    a = np.asarray(seg_a, float)[None, :, :]
    e = np.asarray(seg_b, float)[None, :, :] - a
    denom = cross2(r, e)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = cross2(a - o, e) / denom
        u = cross2(a - o, r) / denom
    ok = np.abs(denom) > 1e-300
    return ok & (s >= 0) & (s <= 1) & (u >= 0) & (u < 1)


def point_segment_distance(points, seg_a, seg_b) -> np.ndarray:
    """(n, m) Euclidean distances from points to segments."""
    p = np.asarray(points, float)[:, None, :]
    a = np.asarray(seg_a, float)[None, :, :]
    e = np.asarray(seg_b, float)[None, :, :] - a
    e2 = np.maximum(np.einsum("...i,...i->...", e, e), 1e-300)
    t = np.clip(np.einsum("...i,...i->...", p - a, e) / e2, 0.0, 1.0)
    return np.linalg.norm(p - (a + t[..., None] * e), axis=-1)
