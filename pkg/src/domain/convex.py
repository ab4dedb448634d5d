"""
Planar convex domains given by a closed counterclockwise boundary polyline.

The boundary is the only representation: parametric shapes are sampled by
the generators in ``src.domain.shapes`` and every geometric query (supporting
lines, chords, projections, the supporting-parabola certificate) is exact
segment arithmetic on the samples.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from src.errors import DomainError, NotUniformlyConvexError
from src.utils import as_points, cross2, get_logger, rotate_ccw, rotate_cw, wrap_angle

logger = get_logger(__name__)

MIN_SAMPLES = 64
COLLINEAR_TOL = 1e-10
CORNER_ANGLE = 0.25
PARABOLA_FLOOR = 1e-8
PARABOLA_CEIL = 1e4
BISECTION_ITERS = 60
CONTAINMENT_TOL = 1e-9
CHUNK = 4096


@dataclass(frozen=True)
class Line:
    point: Tuple[float, float]
    direction: Tuple[float, float]

    @classmethod
    def through(cls, p, q) -> "Line":
        p, q = np.asarray(p, float), np.asarray(q, float)
        d = q - p
        return cls(tuple(p.tolist()), tuple((d / np.linalg.norm(d)).tolist()))

    @classmethod
    def vertical(cls, x: float) -> "Line":
        return cls((float(x), 0.0), (0.0, 1.0))

    @classmethod
    def with_normal(cls, normal, offset: float) -> "Line":
        """The line {p : <p, normal> = offset}."""
        n = np.asarray(normal, float)
        n = n / np.linalg.norm(n)
        return cls(tuple((offset * n).tolist()), tuple(rotate_ccw(n).tolist()))


@dataclass(frozen=True)
class SupportingLine:
    point: Tuple[float, float]
    normal_interval: Tuple[float, float]
    corner: bool

    @property
    def normal(self) -> np.ndarray:
        """Mid normal of the interval; the unique outward normal away from corners."""
        theta = 0.5 * (self.normal_interval[0] + self.normal_interval[1])
        return np.array([math.cos(theta), math.sin(theta)])

    @property
    def extreme_normals(self) -> np.ndarray:
        return np.array([[math.cos(t), math.sin(t)] for t in self.normal_interval])

    def supports(self, domain: "ConvexDomain", tol: float = 1e-9) -> bool:
        p = np.asarray(self.point)
        for n in self.extreme_normals:
            if np.max((domain.vertices - p) @ n) > tol * domain.diameter:
                return False
        return True


@dataclass(frozen=True)
class BoundaryProjection:
    points: np.ndarray
    arclength: np.ndarray
    distance: np.ndarray
    edge: np.ndarray


class ConvexDomain:
    def __init__(self, boundary, beta: Optional[float] = None, name: str = "polygon",
                 min_samples: int = MIN_SAMPLES):
        v = as_points(boundary)
        if len(v) > 1 and np.allclose(v[0], v[-1]):
            v = v[:-1]
        keep = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1) > 1e-14
        v = v[keep]
        if len(v) < 3:
            raise DomainError("A domain boundary needs at least 3 distinct points")
        if np.sum(cross2(v, np.roll(v, -1, axis=0))) < 0:
            v = v[::-1].copy()
        if len(v) < min_samples:
            v = densify(v, min_samples)
        if beta is not None and beta < 0:
            raise DomainError(f"beta must be nonnegative, got {beta}")

        self.name = name
        self.beta = beta
        self.vertices = v
        self.edge_vectors = np.roll(v, -1, axis=0) - v
        self.edge_lengths = np.linalg.norm(self.edge_vectors, axis=1)
        self.edge_normals = rotate_cw(self.edge_vectors / self.edge_lengths[:, None])
        self.arclength = np.concatenate([[0.0], np.cumsum(self.edge_lengths)[:-1]])
        self.perimeter = float(np.sum(self.edge_lengths))

        prev_dir = np.roll(self.edge_vectors, 1, axis=0) / np.roll(self.edge_lengths, 1)[:, None]
        next_dir = self.edge_vectors / self.edge_lengths[:, None]
        self._sin_turn = cross2(prev_dir, next_dir)
        self.turning = np.arctan2(self._sin_turn, np.einsum("ij,ij->i", prev_dir, next_dir))
        if np.min(self._sin_turn) < -COLLINEAR_TOL or np.min(self.turning) < -COLLINEAR_TOL:
            raise DomainError("Boundary is not convex")

        vn = np.roll(self.edge_normals, 1, axis=0) + self.edge_normals
        self.vertex_normals = vn / np.linalg.norm(vn, axis=1)[:, None]
        self.diameter = float(np.max(pdist(v)))
        self.area = 0.5 * float(np.sum(cross2(v, np.roll(v, -1, axis=0))))
        w = cross2(v, np.roll(v, -1, axis=0))
        self.centroid = (np.sum((v + np.roll(v, -1, axis=0)) * w[:, None], axis=0) / (6.0 * self.area))
        self.bbox = (v.min(axis=0), v.max(axis=0))
        self.parabola_coeff: Optional[float] = None
        self._coefficients: Dict[float, float] = {}

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"ConvexDomain(name={self.name!r}, samples={len(self)}, diameter={self.diameter:.4f})"

    # --- certificates -------------------------------------------------
    @property
    def is_strictly_convex(self) -> bool:
        return bool(np.min(self._sin_turn) > COLLINEAR_TOL)

    def corners(self) -> np.ndarray:
        return np.flatnonzero(self.turning > CORNER_ANGLE)

    def corner_normals(self, i: int) -> np.ndarray:
        """
        The two extreme outward normals at vertex i: the one-sided tangents of the
        sampled curve, estimated from the adjacent edges and the turning at their
        far ends (exact edge normals on straight sides).
        """
        n = len(self)
        incoming = _rotate(self.edge_normals[i - 1], 0.5 * self.turning[i - 1])
        outgoing = _rotate(self.edge_normals[i], -0.5 * self.turning[(i + 1) % n])
        return np.stack([incoming, outgoing])

    def _test_frames(self):
        """(points, normals) at which the supporting-body test runs."""
        corner = set(self.corners().tolist())
        pts, nrm = [], []
        for i, p in enumerate(self.vertices):
            if i in corner:
                for n in self.corner_normals(i):
                    pts.append(p)
                    nrm.append(n)
            else:
                pts.append(p)
                nrm.append(self.vertex_normals[i])
        return np.asarray(pts), np.asarray(nrm)

    def _supporting_body_passes(self, a: float, exponent: float, xs, ys) -> bool:
        slack = 1e-12 * self.diameter
        return bool(np.all(ys >= a * np.abs(xs) ** exponent * (1.0 - CONTAINMENT_TOL) - slack))

    def _frame_coordinates(self):
        pts, nrm = self._test_frames()
        tang = rotate_ccw(nrm)
        xs, ys = [], []
        for p, n, t in zip(pts, nrm, tang):
            d = self.vertices - p
            x = d @ t
            y = -(d @ n)
            mask = np.hypot(x, y) > 1e-12 * self.diameter
            xs.append(x[mask])
            ys.append(y[mask])
        return np.concatenate(xs), np.concatenate(ys)

    def beta_convexity_coefficient(self, beta: float = 0.0) -> float:
        """
        Largest a (bisection in log scale over [1e-8, 1e4]) such that at every
        boundary sample the body {y >= a |x|^(beta+2)}, placed on the supporting
        line with y pointing inward, contains all other samples.
        """
        exponent = beta + 2.0
        xs, ys = self._frame_coordinates()
        if not self._supporting_body_passes(PARABOLA_FLOOR, exponent, xs, ys):
            raise NotUniformlyConvexError(
                f"Domain '{self.name}' is not uniformly convex (beta={beta}): supporting-body test fails at a={PARABOLA_FLOOR}"
            )
        if self._supporting_body_passes(PARABOLA_CEIL, exponent, xs, ys):
            return PARABOLA_CEIL
        lo, hi = math.log(PARABOLA_FLOOR), math.log(PARABOLA_CEIL)
        for _ in range(BISECTION_ITERS):
            mid = 0.5 * (lo + hi)
            if self._supporting_body_passes(math.exp(mid), exponent, xs, ys):
                lo = mid
            else:
                hi = mid
        return math.exp(lo)

    def _beta(self, beta: Optional[float]) -> float:
        return float(self.beta or 0.0) if beta is None else float(beta)

    def uniform_convexity_coefficient(self, beta: Optional[float] = None) -> float:
        """Supporting coefficient for beta (default: the domain's own beta), cached per beta."""
        beta = self._beta(beta)
        a = self.beta_convexity_coefficient(beta)
        self._coefficients[beta] = a
        if beta == self._beta(None):
            self.parabola_coeff = a
        logger.debug(f"[DOMAIN] {self.name}: supporting coefficient a={a:.6g} (beta={beta})")
        return a

    def has_coefficient(self, beta: Optional[float] = None) -> bool:
        return self._beta(beta) in self._coefficients

    def regularity_constant(self, beta: Optional[float] = None) -> float:
        """
        c(Omega) = diam^(2 - 2/k) + (1/a)^(2/k) with k = beta + 2 and a the
        coefficient computed for that same beta; diam + 1/a for beta = 0.
        """
        beta = self._beta(beta)
        if beta not in self._coefficients:
            raise DomainError(f"Supporting coefficient for beta={beta} not set; call uniform_convexity_coefficient first")
        k = beta + 2.0
        return self.diameter ** (2.0 - 2.0 / k) + (1.0 / self._coefficients[beta]) ** (2.0 / k)

    # --- queries ------------------------------------------------------
    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = as_points(points)
        out = np.empty(len(pts), dtype=bool)
        offsets = np.einsum("ij,ij->i", self.edge_normals, self.vertices)
        for start in range(0, len(pts), CHUNK):
            block = pts[start:start + CHUNK]
            out[start:start + CHUNK] = np.all(block @ self.edge_normals.T - offsets <= tol * self.diameter, axis=1)
        return out

    def nearest_boundary(self, points) -> BoundaryProjection:
        pts = as_points(points)
        n = len(pts)
        proj = np.empty((n, 2))
        arc = np.empty(n)
        dist = np.empty(n)
        edge = np.empty(n, dtype=int)
        a = self.vertices
        e = self.edge_vectors
        e2 = self.edge_lengths ** 2
        for start in range(0, n, CHUNK):
            block = pts[start:start + CHUNK]
            rel = block[:, None, :] - a[None, :, :]
            t = np.clip(np.einsum("nmi,mi->nm", rel, e) / e2, 0.0, 1.0)
            q = a[None, :, :] + t[..., None] * e[None, :, :]
            d = np.linalg.norm(block[:, None, :] - q, axis=2)
            k = np.argmin(d, axis=1)
            rows = np.arange(len(block))
            proj[start:start + CHUNK] = q[rows, k]
            dist[start:start + CHUNK] = d[rows, k]
            edge[start:start + CHUNK] = k
            arc[start:start + CHUNK] = self.arclength[k] + t[rows, k] * self.edge_lengths[k]
        return BoundaryProjection(proj, arc, dist, edge)

    def point_at(self, s) -> np.ndarray:
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        knots = np.append(self.arclength, self.perimeter)
        closed = np.vstack([self.vertices, self.vertices[:1]])
        return np.stack([np.interp(s, knots, closed[:, 0]), np.interp(s, knots, closed[:, 1])], axis=-1)

    def normal_at(self, s) -> np.ndarray:
        """Outward normal of the boundary edge containing arc length s."""
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        k = np.clip(np.searchsorted(self.arclength, s, side="right") - 1, 0, len(self) - 1)
        return self.edge_normals[k]

    def supporting_line(self, p, tol: Optional[float] = None) -> SupportingLine:
        tol = 1e-6 * self.diameter if tol is None else tol
        proj = self.nearest_boundary(p)
        if proj.distance[0] > tol:
            raise DomainError(f"Point {tuple(np.ravel(p))} is not on the boundary (distance {proj.distance[0]:.3g})")
        k = int(proj.edge[0])
        s_local = proj.arclength[0] - self.arclength[k]
        vertex_tol = 1e-9 * self.diameter
        n = len(self)
        idx = None
        if s_local <= vertex_tol:
            idx = k
        elif self.edge_lengths[k] - s_local <= vertex_tol:
            idx = (k + 1) % n
        point = tuple(np.ravel(proj.points[0]).tolist())
        if idx is None:
            theta = _angle(self.edge_normals[k])
            return SupportingLine(point, (theta, theta), False)
        if self.turning[idx] > CORNER_ANGLE:
            n_in, n_out = self.corner_normals(idx)
            lo = _angle(n_in)
            hi = lo + float(wrap_angle(_angle(n_out) - lo))
            return SupportingLine(tuple(self.vertices[idx].tolist()), (lo, hi), True)
        theta = _angle(self.vertex_normals[idx])
        return SupportingLine(tuple(self.vertices[idx].tolist()), (theta, theta), False)

    def chord_intersections(self, line: Line, tol: float = 1e-12) -> List[np.ndarray]:
        """Intersections of a line with the boundary, ordered along the line direction."""
        p = np.asarray(line.point, float)
        d = np.asarray(line.direction, float)
        d = d / np.linalg.norm(d)
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        sa = cross2(d, a - p)
        sb = cross2(d, b - p)
        zero = tol * max(self.diameter, 1.0)
        sa = np.where(np.abs(sa) < zero, 0.0, sa)
        sb = np.where(np.abs(sb) < zero, 0.0, sb)
        hits = []
        for i in np.flatnonzero(sa * sb <= 0):
            if sa[i] == 0 and sb[i] == 0:
                hits.extend([a[i], b[i]])
            else:
                t = sa[i] / (sa[i] - sb[i])
                hits.append(a[i] + t * (b[i] - a[i]))
        if not hits:
            return []
        hits = np.asarray(hits)
        order = np.argsort((hits - p) @ d)
        unique: List[np.ndarray] = []
        for q in hits[order]:
            if not unique or np.linalg.norm(q - unique[-1]) > 1e-9 * self.diameter:
                unique.append(q)
        if len(unique) > 2:
            unique = [unique[0], unique[-1]]
        return unique

    def sample_interior(self, n: int, rng: np.random.Generator, margin: float = 0.0) -> np.ndarray:
        lo, hi = self.bbox
        out = []
        count = 0
        while count < n:
            cand = rng.uniform(lo, hi, size=(max(2 * (n - count), 64), 2))
            inside = self.contains(cand)
            if margin > 0:
                inside &= self.nearest_boundary(cand).distance > margin
            cand = cand[inside]
            out.append(cand)
            count += len(cand)
        return np.concatenate(out)[:n]

    def to_dict(self):
        return {"name": self.name, "boundary": self.vertices.tolist(), "beta": self.beta}


def densify(vertices: np.ndarray, n: int) -> np.ndarray:
    """Insert points along edges (keeping the given vertices) until there are at least n samples."""
    v = np.asarray(vertices, float)
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    total = lengths.sum()
    out = []
    for p, e, length in zip(v, edges, lengths):
        k = max(1, int(math.ceil(n * length / total)))
        for j in range(k):
            out.append(p + (j / k) * e)
    return np.asarray(out)


def _rotate(v, theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _angle(v) -> float:
    return float(math.atan2(v[1], v[0]))


# functional aliases

def is_strictly_convex(domain: ConvexDomain) -> bool:
    return domain.is_strictly_convex


def uniform_convexity_coefficient(domain: ConvexDomain) -> float:
    return domain.uniform_convexity_coefficient()


def regularity_constant(domain: ConvexDomain) -> float:
    return domain.regularity_constant()


def supporting_line(domain: ConvexDomain, p) -> SupportingLine:
    return domain.supporting_line(p)


def chord_intersections(domain: ConvexDomain, line: Line) -> List[np.ndarray]:
    return domain.chord_intersections(line)
