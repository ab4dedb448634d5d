"""
Solutions whose level curves are graphs over the along-level axis.

In the frame (tau, nu0) with tau = rotate_cw(nu0), a point is sigma * tau + y * nu0.
The level-t curve is y = H_t(sigma) = base(t) + offset_t(sigma), where base(t)
is the straight level line of the unperturbed solution. Superlevel sets are
{y >= H_t(sigma)}; t -> H_t(sigma) must be nondecreasing.
"""
from abc import ABC
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid as integrate_trapezoid

from src.anisotropy import AnisotropyNorm
from src.chord_solver import LevelSet, LevelSetFamily
from src.domain import BoundaryFunction, ConvexDomain, Line
from src.errors import ConstructionError, DomainError
from src.functional import Polyline, anisotropic_length, coarea_tv, level_cell_widths
from src.utils import as_points, cross2, get_logger, rotate_cw

logger = get_logger(__name__)

BISECTION_ITERS = 60
TRACE_OFFSET = 1e-9
KNOT_TOL = 1e-12


def cantor_function(x, depth: int = 12) -> np.ndarray:
    """
    Cantor stairs by the ternary recursion g(x) = g(3x)/2 on [0, 1/3], 1/2 on
    [1/3, 2/3], 1/2 + g(3x - 2)/2 on [2/3, 1], truncated after `depth` steps
    (linear on the unresolved interval; error <= 2^-depth).
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    scale = np.full_like(x, 0.5)
    live = np.ones_like(x, dtype=bool)
    for _ in range(depth):
        lo = live & (x < 1.0 / 3.0)
        hi = live & (x > 2.0 / 3.0)
        mid = live & ~lo & ~hi
        out = np.where(mid | hi, out + scale, out)
        x = np.where(lo, 3.0 * x, np.where(hi, 3.0 * x - 2.0, x))
        live = live & ~mid
        scale = np.where(live, 0.5 * scale, scale)
    return np.where(live, out + 2.0 * scale * x, out)


def trapezoid(sigma, center: float, length: float, ramp: float) -> np.ndarray:
    """1 on [c - l/2, c + l/2], linear down to 0 over `ramp` on both sides."""
    sigma = np.asarray(sigma, dtype=float)
    if ramp <= 0:
        return (np.abs(sigma - center) <= 0.5 * length).astype(float)
    left = (sigma - (center - 0.5 * length - ramp)) / ramp
    right = ((center + 0.5 * length + ramp) - sigma) / ramp
    return np.clip(np.minimum(left, right), 0.0, 1.0)


def trapezoid_knots(center: float, length: float, ramp: float) -> np.ndarray:
    h = 0.5 * length
    return np.unique([center - h - ramp, center - h, center + h, center + h + ramp])


@dataclass
class LevelProfile(ABC):
    """Straight level lines y = base_offset + base_scale * t; subclasses add an offset."""
    base_offset: float = 0.0
    base_scale: float = 1.0

    def base(self, t):
        return self.base_offset + self.base_scale * np.asarray(t, dtype=float)

    def offset(self, t, sigma) -> np.ndarray:
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(sigma)).shape)

    def height(self, t, sigma) -> np.ndarray:
        return self.base(t) + self.offset(t, sigma)

    def knots(self, t: float) -> np.ndarray:
        return np.empty(0)

    def support(self) -> Optional[Tuple[float, float]]:
        """(lo, hi) levels outside which the offset vanishes; None for no perturbation."""
        return None


@dataclass
class FlatProfile(LevelProfile):
    pass


@dataclass
class TriangleBumpProfile(LevelProfile):
    """
    Levels in the band get an isosceles bump of height side * kappa * dist(t, band ends)
    over [center - half_width, center + half_width]; kappa < 1 keeps levels nested.
    """
    center: float = 0.0
    half_width: float = 0.3
    band: Tuple[float, float] = (-0.1, 0.1)
    kappa: float = 0.5
    side: float = 1.0

    def amplitude(self, t):
        lo, hi = self.band
        t = np.asarray(t, dtype=float)
        return self.kappa * self.base_scale * np.clip(np.minimum(t - lo, hi - t), 0.0, None)

    def offset(self, t, sigma):
        return self.side * self.amplitude(t) * trapezoid(sigma, self.center, 0.0, self.half_width)

    def knots(self, t):
        return trapezoid_knots(self.center, 0.0, self.half_width)

    def support(self):
        return self.band


@dataclass
class PlateauProfile(LevelProfile):
    """
    Every level of the band detours to the common segment y = base(target) over
    [center - length/2, center + length/2]: a jump of the band height across it.
    """
    center: float = 0.0
    length: float = 0.6
    ramp: float = 0.3
    band: Tuple[float, float] = (-0.1, 0.1)

    @property
    def target(self) -> float:
        return 0.5 * (self.band[0] + self.band[1])

    def offset(self, t, sigma):
        lo, hi = self.band
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        shift = np.where(inside, self.base(self.target) - self.base(t), 0.0)
        return shift * trapezoid(sigma, self.center, self.length, self.ramp)

    def knots(self, t):
        return trapezoid_knots(self.center, self.length, self.ramp)

    def support(self):
        return self.band if self.band[1] > self.band[0] else None


@dataclass
class CantorProfile(LevelProfile):
    """
    Levels t = lo + s (hi - lo), s in (0, 1), move to the line of level
    lo + (hi - lo) (s + g(s)) / 2 over the plateau, g the Cantor stairs.
    """
    center: float = 0.0
    length: float = 0.6
    ramp: float = 0.3
    band: Tuple[float, float] = (-0.1, 0.1)
    depth: int = 12

    def shift(self, t):
        lo, hi = self.band
        t = np.asarray(t, dtype=float)
        s = np.clip((t - lo) / (hi - lo), 0.0, 1.0)
        inside = (t > lo) & (t < hi)
        moved = 0.5 * (s + cantor_function(s, self.depth)) - s
        return np.where(inside, moved * (hi - lo) * self.base_scale, 0.0)

    def offset(self, t, sigma):
        return self.shift(t) * trapezoid(sigma, self.center, self.length, self.ramp)

    def knots(self, t):
        return trapezoid_knots(self.center, self.length, self.ramp)

    def support(self):
        return self.band


@dataclass
class ShiftedBoundaryProfile(LevelProfile):
    """
    H_t = max(base(t), B(sigma) - (1 - t) * delta), B the upper boundary arc near the
    peak in the (sigma, y) frame, t in [0, 1]: levels follow a copy of the boundary
    pushed inward by (1 - t) * delta.
    """
    arc_sigma: Sequence[float] = ()
    arc_y: Sequence[float] = ()
    delta: float = 0.0

    def _boundary(self, sigma):
        xs, ys = np.asarray(self.arc_sigma), np.asarray(self.arc_y)
        return np.interp(sigma, xs, ys, left=-np.inf, right=-np.inf)

    def height(self, t, sigma):
        t = np.asarray(t, dtype=float)
        shifted = self._boundary(sigma) - (1.0 - t) * self.delta
        return np.maximum(self.base(t), shifted)

    def offset(self, t, sigma):
        return self.height(t, sigma) - self.base(t)

    def knots(self, t):
        xs, ys = np.asarray(self.arc_sigma), np.asarray(self.arc_y)
        d = ys - (1.0 - t) * self.delta - float(self.base(t))
        above = d > 0
        out = list(xs[above])
        k = np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:]))
        for i in k:
            lam = d[i] / (d[i] - d[i + 1])
            out.append(xs[i] + lam * (xs[i + 1] - xs[i]))
        return np.unique(out)

    def support(self):
        return (0.0, 1.0) if self.delta > 0 else None


class ProfileSolution:
    """
    u(x) = sup{t : H_t(sigma(x)) <= y(x)}, evaluated by bisection in t; its
    level curves are exact polylines through the profile knots, so level
    lengths and superlevel areas are exact.
    """

    def __init__(self, domain: ConvexDomain, f: BoundaryFunction, nu0, profile: LevelProfile,
                 levels: int = 201, label: str = "profile"):
        nu0 = np.asarray(nu0, dtype=float)
        self.domain = domain
        self.f = f
        self.nu0 = nu0 / np.linalg.norm(nu0)
        self.tau = rotate_cw(self.nu0)
        self.profile = profile
        self.levels = levels
        self.label = label
        self.t_range = (f.min, f.max)

    # --- frame ---------------------------------------------------------
    def frame(self, points) -> Tuple[np.ndarray, np.ndarray]:
        pts = as_points(points)
        return pts @ self.tau, pts @ self.nu0

    def to_point(self, sigma, y) -> np.ndarray:
        sigma = np.asarray(sigma, dtype=float)
        y = np.asarray(y, dtype=float)
        return sigma[..., None] * self.tau + y[..., None] * self.nu0

    # --- evaluation ----------------------------------------------------
    def evaluate(self, points, check_inside: bool = True) -> np.ndarray:
        pts = as_points(points)
        if check_inside and not np.all(self.domain.contains(pts, tol=1e-9)):
            raise DomainError("Evaluation point outside the closed domain")
        sigma, y = self.frame(pts)
        lo_t, hi_t = self.t_range
        lo = np.full(len(pts), lo_t)
        hi = np.full(len(pts), hi_t)
        top = self.profile.height(hi, sigma) <= y
        for _ in range(BISECTION_ITERS):
            mid = 0.5 * (lo + hi)
            ok = self.profile.height(mid, sigma) <= y
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        return np.where(top, hi_t, lo)

    def __call__(self, points):
        return self.evaluate(points)

    def trace(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        p = self.domain.point_at(s) - TRACE_OFFSET * self.domain.diameter * self.domain.normal_at(s)
        return self.evaluate(p, check_inside=False)

    # --- level curves ----------------------------------------------------
    def level_curve(self, t: float) -> Optional[Polyline]:
        base = float(self.profile.base(t))
        ends = self.domain.chord_intersections(Line.with_normal(self.nu0, base))
        if len(ends) < 2:
            return None
        a, b = ends[0], ends[-1]
        if np.linalg.norm(b - a) <= 1e-12 * self.domain.diameter:
            return None
        sa, sb = float(a @ self.tau), float(b @ self.tau)
        if sa > sb:
            a, b, sa, sb = b, a, sb, sa
        edge_off = np.abs(self.profile.offset(t, np.array([sa, sb])))
        if np.max(edge_off) > KNOT_TOL * max(1.0, self.domain.diameter):
            raise ConstructionError(f"Level {t:.6g} is perturbed at the boundary; the trace would change")
        knots = np.asarray(self.profile.knots(t), dtype=float)
        span = KNOT_TOL * max(1.0, self.domain.diameter)
        knots = knots[(knots > sa + span) & (knots < sb - span)]
        inner = self.to_point(knots, self.profile.height(t, knots)) if len(knots) else np.empty((0, 2))
        verts = np.vstack([a, inner, b])
        keep = np.concatenate([[True], np.linalg.norm(np.diff(verts, axis=0), axis=1) > 1e-14])
        verts = verts[keep]
        if len(inner) and not np.all(self.domain.contains(inner, tol=1e-9)):
            raise ConstructionError(f"Level {t:.6g} leaves the domain")
        return Polyline(verts)

    def level_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = self.t_range
        if hi <= lo:
            return np.empty(0), np.empty(0)
        ts = np.linspace(lo, hi, self.levels)
        return ts, level_cell_widths(ts)

    def level_length(self, norm: AnisotropyNorm, t: float) -> float:
        lo, hi = self.t_range
        if t <= lo or t >= hi:
            return 0.0
        curve = self.level_curve(t)
        return 0.0 if curve is None else anisotropic_length(norm, curve)

    def interior_tv(self, norm: AnisotropyNorm) -> float:
        return coarea_tv(norm, self, check_nesting=False)

    def segment_normals(self, t: float) -> np.ndarray:
        curve = self.level_curve(t)
        return np.empty((0, 2)) if curve is None else curve.normals

    def superlevel_area(self, t: float) -> float:
        """Exact area of {u >= t}: the level polyline closed by the boundary arc above it."""
        lo, hi = self.t_range
        if t <= lo:
            return self.domain.area
        if t > hi:
            return 0.0
        curve = self.level_curve(t)
        if curve is None:
            return 0.0
        a, b = curve.endpoints
        proj = self.domain.nearest_boundary(np.stack([a, b]))
        s_a, s_b = proj.arclength
        arc = self.domain.arclength
        per = self.domain.perimeter
        # counterclockwise from b back to a runs over the part of the boundary above the curve
        rel = np.mod(arc - s_b, per)
        span = np.mod(s_a - s_b, per)
        idx = np.flatnonzero((rel > 1e-12) & (rel < span - 1e-12))
        idx = idx[np.argsort(rel[idx])]
        ring = np.vstack([curve.vertices, self.domain.vertices[idx]])
        return float(0.5 * np.sum(cross2(ring, np.roll(ring, -1, axis=0))))

    def l1_norm(self, levels: Optional[int] = None) -> float:
        """int |u| by the layer-cake formula over the level grid (trapezoid rule)."""
        lo, hi = self.t_range
        n = levels or self.levels
        total = 0.0
        if hi > 0:
            ts = np.linspace(max(lo, 0.0), hi, n)
            total += float(integrate_trapezoid([self.superlevel_area(t) for t in ts], ts))
        if lo < 0:
            ts = np.linspace(lo, min(hi, 0.0), n)
            total += float(integrate_trapezoid([self.domain.area - self.superlevel_area(t) for t in ts], ts))
        return total

    # --- conversion ------------------------------------------------------
    def to_family(self, levels: Optional[int] = None) -> LevelSetFamily:
        lo, hi = self.t_range
        n = levels or self.levels
        built: List[LevelSet] = []
        for t in np.linspace(lo, hi, n):
            curve = self.level_curve(float(t))
            if curve is None:
                built.append(LevelSet(float(t), (), full=bool(t <= lo)))
            else:
                built.append(LevelSet(float(t), (curve,)))
        return LevelSetFamily(self.domain, self.f, built, label=self.label)

    def level_geometry(self, levels: int = 41) -> List[dict]:
        lo, hi = self.t_range
        out = []
        for t in np.linspace(lo, hi, levels):
            curve = self.level_curve(float(t))
            out.append({"t": float(t), "curves": [] if curve is None else [curve.vertices.tolist()]})
        return out
