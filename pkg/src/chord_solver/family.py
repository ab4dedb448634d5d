"""
Level-set families: the superlevel sets E_t = {u >= t} on a level grid,
each bounded inside the domain by a set of curves (straight chords for the
chord solver, polylines for the constructed competitors).
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.anisotropy import AnisotropyNorm
from src.chord_solver.levels import point_segment_distance, ray_crossings, segments_cross
from src.domain import BoundaryFunction, ConvexDomain
from src.errors import DomainError
from src.functional import Polyline, anisotropic_length, coarea_tv, level_cell_widths
from src.utils import as_points, get_logger

logger = get_logger(__name__)

# generic direction, avoids symmetry axes of the generated shapes and data
RAY_ANGLE = 0.6180339887
RAY_DIRECTION = np.array([np.cos(RAY_ANGLE), np.sin(RAY_ANGLE)])
TRACE_OFFSET = 1e-9
CHUNK = 1024


@dataclass(frozen=True, eq=False)
class LevelSet:
    t: float
    curves: Tuple[Polyline, ...] = ()
    full: bool = False
    requested_t: Optional[float] = None
    endpoint_arclength: Tuple[float, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.full and len(self.curves) == 0

    @property
    def segments(self) -> np.ndarray:
        """(n, 2, 2) array of all curve segments at this level."""
        segs = [np.stack([c.vertices[:-1], c.vertices[1:]], axis=1) for c in self.curves]
        return np.concatenate(segs) if segs else np.empty((0, 2, 2))

    def length(self, norm: AnisotropyNorm) -> float:
        return float(sum(anisotropic_length(norm, c) for c in self.curves))

    def to_dict(self) -> Dict:
        return {
            "t": self.t,
            "full": self.full,
            "curves": [c.vertices.tolist() for c in self.curves],
        }


class LevelSetFamily:
    """
    u(x) = sup{t_j : x in E_{t_j}} refined by linear interpolation between the
    bracketing levels, weighted by the distance to their boundary curves.
    Membership uses a ray to the boundary: x is in E_t iff the exit point
    lies on {f >= t} and the ray crosses the level curves an even number of
    times, or the exit point lies on {f < t} and the count is odd.
    """

    def __init__(self, domain: ConvexDomain, f: BoundaryFunction, levels: Sequence[LevelSet],
                 spacing: Optional[float] = None, label: str = "chords"):
        self.domain = domain
        self.f = f
        self.levels: List[LevelSet] = sorted(levels, key=lambda lv: lv.t)
        self.label = label
        ts = self.ts
        if spacing is None:
            spacing = float(np.mean(np.diff(ts))) if len(ts) > 1 else 0.0
        self.spacing = spacing
        self._index = {float(lv.t): j for j, lv in enumerate(self.levels)}

        seg_list, owner = [], []
        for j, lv in enumerate(self.levels):
            s = lv.segments
            seg_list.append(s)
            owner.extend([j] * len(s))
        self._segments = np.concatenate(seg_list) if seg_list else np.empty((0, 2, 2))
        self._owner = np.asarray(owner, dtype=int)

    @property
    def ts(self) -> np.ndarray:
        return np.array([lv.t for lv in self.levels])

    def __len__(self):
        return len(self.levels)

    # --- coarea interface ---------------------------------------------
    def level_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        ts = self.ts
        return ts, level_cell_widths(ts, self.spacing)

    def level_length(self, norm: AnisotropyNorm, t: float) -> float:
        j = self._index.get(float(t))
        if j is None:
            raise KeyError(f"No level at t={t}")
        return self.levels[j].length(norm)

    def interior_tv(self, norm: AnisotropyNorm) -> float:
        return coarea_tv(norm, self, check_nesting=False)

    # --- evaluation ----------------------------------------------------
    def _ray_exits(self, pts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Boundary exit points along RAY_DIRECTION and their arc lengths."""
        dom = self.domain
        a = dom.vertices
        e = dom.edge_vectors
        r = RAY_DIRECTION
        denom = e[:, 0] * r[1] - e[:, 1] * r[0]
        rel = a[None, :, :] - pts[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            # p + s r = a + u e
            s = (rel[..., 0] * e[None, :, 1] - rel[..., 1] * e[None, :, 0]) / -denom[None, :]
            u = (rel[..., 0] * r[1] - rel[..., 1] * r[0]) / -denom[None, :]
        valid = (u >= 0) & (u <= 1) & (s >= 0) & np.isfinite(s)
        s = np.where(valid, s, -np.inf)
        k = np.argmax(s, axis=1)
        rows = np.arange(len(pts))
        dist = s[rows, k]
        dist = np.where(np.isfinite(dist), dist, 0.0)
        exits = pts + dist[:, None] * r
        arc = dom.arclength[k] + np.clip(u[rows, k], 0, 1) * dom.edge_lengths[k]
        return exits, arc

    def membership(self, points) -> np.ndarray:
        """(n, L) boolean matrix: point i lies in E_{t_j}."""
        pts = as_points(points)
        n, L = len(pts), len(self.levels)
        out = np.zeros((n, L), dtype=bool)
        ts = self.ts
        full = np.array([lv.full for lv in self.levels])
        for start in range(0, n, CHUNK):
            block = pts[start:start + CHUNK]
            exits, arc = self._ray_exits(block)
            fb = self.f(arc)
            member = fb[:, None] >= ts[None, :]
            if len(self._segments):
                hit = ray_crossings(block, exits, self._segments[:, 0], self._segments[:, 1])
                counts = np.zeros((len(block), L), dtype=int)
                np.add.at(counts.T, self._owner, hit.T.astype(int))
                member ^= (counts % 2 == 1)
            member[:, full] = True
            out[start:start + CHUNK] = member
        return out

    def _level_distances(self, pts: np.ndarray) -> np.ndarray:
        """(n, L) distance to each level's curves; inf for levels without curves."""
        L = len(self.levels)
        d = np.full((len(pts), L), np.inf)
        if len(self._segments):
            ds = point_segment_distance(pts, self._segments[:, 0], self._segments[:, 1])
            np.minimum.at(d.T, self._owner, ds.T)
        return d

    def _brackets(self, top: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Value range [t_top, t_top+1] of each bracket; below the grid [t_0, t_0], above it [t_m, t_m]."""
        ts = self.ts
        L = len(ts)
        lo = np.where(top >= 0, ts[np.clip(top, 0, L - 1)], ts[0])
        hi = np.where(top < L - 1, ts[np.clip(top + 1, 0, L - 1)], ts[-1])
        return lo, hi

    def evaluate(self, points, check_inside: bool = True) -> np.ndarray:
        """
        Between the bracketing curves u is interpolated by distance. Where the
        boundary is closer than both curves (or a side of the bracket has no
        curve) u is blended toward f at the nearest boundary point, clipped to
        the bracket, so that u takes the boundary values at the boundary.
        """
        pts = as_points(points)
        if check_inside and not np.all(self.domain.contains(pts, tol=1e-9)):
            raise DomainError("Evaluation point outside the closed domain")
        ts = self.ts
        L = len(ts)
        if L == 0:
            return np.full(len(pts), np.nan)
        out = np.empty(len(pts))
        for start in range(0, len(pts), CHUNK):
            block = pts[start:start + CHUNK]
            member = self.membership(block)
            any_member = member.any(axis=1)
            top = np.where(any_member, L - 1 - np.argmax(member[:, ::-1], axis=1), -1)
            lo, hi = self._brackets(top)

            dist = self._level_distances(block)
            rows = np.arange(len(block))
            d_lo = np.where(top >= 0, dist[rows, np.clip(top, 0, L - 1)], np.inf)
            d_hi = np.where(top < L - 1, dist[rows, np.clip(top + 1, 0, L - 1)], np.inf)
            with np.errstate(invalid="ignore", divide="ignore"):
                w = d_lo / (d_lo + d_hi)
            w = np.where(np.isinf(d_lo) & ~np.isinf(d_hi), 1.0, w)
            w = np.where(~np.isinf(d_lo) & np.isinf(d_hi), 0.0, w)
            w = np.where(np.isnan(w), 0.5, w)
            val = lo + (hi - lo) * w

            wall = self.domain.nearest_boundary(block)
            target = np.clip(self.f(wall.arclength), lo, hi)
            near = np.minimum(d_lo, d_hi)
            with np.errstate(invalid="ignore", divide="ignore"):
                pull = np.clip(1.0 - wall.distance / near, 0.0, 1.0)
            pull = np.where(np.isinf(near), 1.0, np.where(near == 0, 0.0, pull))
            out[start:start + CHUNK] = val + (target - val) * pull
        return out

    def __call__(self, points):
        return self.evaluate(points)

    def trace(self, s) -> np.ndarray:
        """Values at boundary arc lengths, evaluated a hair inside the domain."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        p = self.domain.point_at(s) - TRACE_OFFSET * self.domain.diameter * self.domain.normal_at(s)
        return self.evaluate(p, check_inside=False)

    # --- diagnostics ---------------------------------------------------
    def check_nesting(self, points: Optional[np.ndarray] = None, n: int = 1000, seed: int = 0) -> Dict:
        if points is None:
            points = self.domain.sample_interior(n, np.random.default_rng(seed))
        member = self.membership(points)
        bad = member[:, 1:] & ~member[:, :-1]
        return {"nested": bool(not bad.any()), "violations": int(bad.sum()), "points": int(len(points))}

    def check_disjoint(self) -> Dict:
        """Curves of one level must not cross each other."""
        worst = 0
        for lv in self.levels:
            segs = lv.segments
            if len(lv.curves) < 2:
                continue
            owner = np.concatenate([[k] * (len(c.vertices) - 1) for k, c in enumerate(lv.curves)])
            hit = segments_cross(segs[:, 0], segs[:, 1], segs[:, 0], segs[:, 1])
            hit &= owner[:, None] != owner[None, :]
            worst += int(hit.sum() // 2)
        return {"disjoint": worst == 0, "crossings": worst}

    def check_adjacent_crossings(self) -> List[Tuple[float, float]]:
        """Pairs of consecutive levels whose curves cross."""
        bad = []
        for lo, hi in zip(self.levels[:-1], self.levels[1:]):
            a, b = lo.segments, hi.segments
            if len(a) and len(b) and segments_cross(a[:, 0], a[:, 1], b[:, 0], b[:, 1]).any():
                bad.append((lo.t, hi.t))
        return bad

    def endpoint_residual(self) -> float:
        """max |f(e) - t| over the boundary endpoints of every level curve."""
        worst = 0.0
        for lv in self.levels:
            if lv.endpoint_arclength:
                vals = self.f(np.asarray(lv.endpoint_arclength))
                worst = max(worst, float(np.max(np.abs(vals - lv.t))))
        return worst

    def level_geometry(self) -> List[Dict]:
        return [lv.to_dict() for lv in self.levels]

    def raster(self, resolution: int = 128) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(xs, ys, U) on a resolution x resolution grid over the bounding box; NaN outside."""
        lo, hi = self.domain.bbox
        xs = np.linspace(lo[0], hi[0], resolution)
        ys = np.linspace(lo[1], hi[1], resolution)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        inside = self.domain.contains(pts, tol=0.0)
        U = np.full(len(pts), np.nan)
        if inside.any():
            U[inside] = self.evaluate(pts[inside], check_inside=False)
        return xs, ys, U.reshape(resolution, resolution)
