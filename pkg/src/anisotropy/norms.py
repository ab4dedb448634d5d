"""
Direction-only anisotropic norms (metric integrands) on the plane.

Every norm is a convex, 1-homogeneous, centrally symmetric gauge phi with
ellipticity bounds lambda_lower * |xi| <= phi(xi) <= gamma_upper * |xi|.
Polygonal gauges are the canonical form; the parametric forms (p-norms,
ellipses, faceted disks, weighted sums) convert to polygons on demand.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.errors import InvalidNormError
from src.utils import cross2, get_logger, unit_directions, wrap_angle

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi
COLLINEAR_TOL = 1e-10
SYMMETRY_TOL = 1e-9
POLAR_APPROX_VERTICES = 720
ELLIPTICITY_SAMPLES = 4096
REFINED_EXTREMES = 16


def _circle_extreme(gauge, theta: np.ndarray, vals: np.ndarray, h: float, lower: bool) -> float:
    """Min (or max) of the gauge on the unit circle: sampled extremes refined within one sample step."""
    sign = 1.0 if lower else -1.0
    s = sign * vals
    best = float(s.min())
    if float(s.max()) - best <= 1e-12 * abs(best):
        return sign * best
    local = np.flatnonzero((s <= np.roll(s, 1)) & (s <= np.roll(s, -1)) & (s <= best + 1e-4 * abs(best)))
    local = local[np.argsort(s[local])][:REFINED_EXTREMES]

    def objective(t):
        return sign * float(gauge(unit_directions(np.array([t])))[0])

    for k in local:
        res = minimize_scalar(objective, bounds=(theta[k] - h, theta[k] + h), method="bounded",
                              options={"xatol": 1e-12})
        if res.success:
            best = min(best, float(res.fun))
    return sign * best


@dataclass(frozen=True)
class Facet:
    """A maximal segment I of the unit sphere together with its arc of normal directions."""
    endpoints: Tuple[Tuple[float, float], Tuple[float, float]]
    normal_arc: Tuple[float, float]
    dual_vertex: Tuple[float, float]

    @property
    def width(self) -> float:
        return self.normal_arc[1] - self.normal_arc[0]

    @property
    def outward_normal(self) -> np.ndarray:
        a = np.asarray(self.dual_vertex)
        return a / np.linalg.norm(a)

    @property
    def mid_direction(self) -> np.ndarray:
        return unit_directions(0.5 * (self.normal_arc[0] + self.normal_arc[1]))

    def offset(self, nu) -> float:
        """Angular position of the direction nu inside the arc, measured from its lower end."""
        theta = math.atan2(nu[1], nu[0])
        return float(wrap_angle(theta - self.normal_arc[0]))

    def margin(self, nu) -> float:
        """
        Signed angular distance from nu to the nearest end of the normal arc;
        positive inside, negative outside. Only nu itself is tested, not -nu.
        """
        off = self.offset(nu)
        if off <= self.width:
            return min(off, self.width - off)
        return -min(off - self.width, TWO_PI - off)

    def contains_direction(self, nu, closed: bool = False, tol: float = 1e-12) -> bool:
        """True if nu or -nu lies in the normal arc (open by default)."""
        nu = np.asarray(nu, dtype=float)
        best = max(self.margin(nu), self.margin(-nu))
        return best >= -tol if closed else best > tol

    def signed_margin(self, nu) -> float:
        nu = np.asarray(nu, dtype=float)
        return max(self.margin(nu), self.margin(-nu))


class AnisotropyNorm(ABC):
    """Base class; subclasses implement the gauge and their exact linear pieces."""

    form: str = "abstract"

    def __init__(self):
        self.lambda_lower, self.gamma_upper = self._ellipticity()
        if not (self.lambda_lower > 0 and self.gamma_upper >= self.lambda_lower):
            raise InvalidNormError(
                f"Degenerate norm: lambda={self.lambda_lower}, Gamma={self.gamma_upper}"
            )

    # --- evaluation ---------------------------------------------------
    @abstractmethod
    def _gauge(self, xi: np.ndarray) -> np.ndarray:
        """Gauge values for an (n, 2) array."""

    def evaluate(self, xi):
        arr = np.asarray(xi, dtype=float)
        if arr.ndim == 1:
            return float(self._gauge(arr.reshape(1, 2))[0])
        flat = arr.reshape(-1, 2)
        return self._gauge(flat).reshape(arr.shape[:-1])

    def __call__(self, xi):
        return self.evaluate(xi)

    # --- structure ----------------------------------------------------
    @abstractmethod
    def _ellipticity(self) -> Tuple[float, float]:
        pass

    @abstractmethod
    def breakpoints(self) -> np.ndarray:
        """Angles in [0, 2pi) where the gauge is not smooth."""

    @abstractmethod
    def linear_pieces(self) -> List[Tuple[float, float, np.ndarray]]:
        """
        Angular intervals (lo, hi) on which phi(xi) = <xi, a> for a fixed dual
        vector a. Empty when the unit ball is strictly convex.
        """

    @abstractmethod
    def polar(self) -> "AnisotropyNorm":
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    @property
    def is_strictly_convex(self) -> bool:
        return len(self.linear_pieces()) == 0

    def facets(self) -> List[Facet]:
        out = []
        for lo, hi, a in _merge_pieces(self.linear_pieces()):
            e1 = unit_directions(lo)
            e2 = unit_directions(hi)
            e1 = e1 / float(np.dot(e1, a))
            e2 = e2 / float(np.dot(e2, a))
            out.append(Facet(
                endpoints=(tuple(map(float, e1)), tuple(map(float, e2))),
                normal_arc=(float(lo), float(hi)),
                dual_vertex=(float(a[0]), float(a[1])),
            ))
        return out

    def polygonal_approximation(self, n_vertices: int = 256) -> "PolygonalNorm":
        if n_vertices < 4:
            raise InvalidNormError("A polygonal approximation needs at least 4 vertices")
        n_vertices += n_vertices % 2
        grid = np.arange(n_vertices) * (TWO_PI / n_vertices)
        angles = np.unique(np.round(np.concatenate([grid, self.breakpoints()]), 14))
        dirs = unit_directions(angles)
        verts = dirs / self._gauge(dirs)[:, None]
        return PolygonalNorm(verts)

    def exact_polygon(self) -> Optional["PolygonalNorm"]:
        """The unit ball as an exact polygon when phi is piecewise linear, else None."""
        return None

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


def _merge_pieces(pieces):
    """Merge adjacent linear pieces that share a dual vector (collinear facets)."""
    if not pieces:
        return []
    pieces = sorted(((float(lo) % TWO_PI, float(lo) % TWO_PI + (hi - lo), np.asarray(a)) for lo, hi, a in pieces),
                    key=lambda p: p[0])
    merged = [list(pieces[0])]
    for lo, hi, a in pieces[1:]:
        prev = merged[-1]
        if abs(lo - prev[1]) < 1e-12 and np.allclose(a, prev[2], atol=1e-10):
            prev[1] = hi
        else:
            merged.append([lo, hi, a])
    # wrap-around join
    if len(merged) > 1:
        first, last = merged[0], merged[-1]
        if abs(last[1] - (first[0] + TWO_PI)) < 1e-12 and np.allclose(first[2], last[2], atol=1e-10):
            last[1] = first[1] + TWO_PI
            merged.pop(0)
    return [(lo, hi, a) for lo, hi, a in merged]


class PolygonalNorm(AnisotropyNorm):
    """Crystalline norm whose unit ball is a centrally symmetric convex polygon."""

    form = "polygonal"

    def __init__(self, vertices: Sequence[Sequence[float]]):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidNormError("Polygonal norm needs an (n, 2) vertex list")
        v = _validate_polygon(v)
        self.vertices = v
        edges = np.roll(v, -1, axis=0) - v
        outward = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        support = np.einsum("ij,ij->i", outward, v)
        # dual (polar) vertices: phi(xi) = max_k <xi, a_k>
        self.dual_vertices = outward / support[:, None]
        super().__init__()

    def _gauge(self, xi):
        return np.max(xi @ self.dual_vertices.T, axis=1)

    def _ellipticity(self):
        lam = 1.0 / float(np.max(np.linalg.norm(self.vertices, axis=1)))
        gam = float(np.max(np.linalg.norm(self.dual_vertices, axis=1)))
        return lam, gam

    def breakpoints(self):
        return wrap_angle(np.arctan2(self.vertices[:, 1], self.vertices[:, 0]))

    def linear_pieces(self):
        angles = np.arctan2(self.vertices[:, 1], self.vertices[:, 0])
        pieces = []
        n = len(self.vertices)
        for k in range(n):
            lo = float(wrap_angle(angles[k]))
            span = float(wrap_angle(angles[(k + 1) % n] - angles[k]))
            pieces.append((lo, lo + span, self.dual_vertices[k]))
        return pieces

    def polar(self):
        return PolygonalNorm(self.dual_vertices)

    def exact_polygon(self):
        return self

    def to_dict(self):
        return {"form": "polygonal", "vertices": self.vertices.tolist()}


def _validate_polygon(v: np.ndarray) -> np.ndarray:
    if len(v) < 4:
        raise InvalidNormError(f"Polygonal unit ball needs >= 4 vertices, got {len(v)}")
    area2 = float(np.sum(cross2(v, np.roll(v, -1, axis=0))))
    if area2 < 0:
        v = v[::-1].copy()
    elif area2 == 0:
        raise InvalidNormError("Degenerate polygon")

    # merge collinear vertices into one facet
    keep = []
    n = len(v)
    for k in range(n):
        d1 = v[k] - v[k - 1]
        d2 = v[(k + 1) % n] - v[k]
        scale = np.linalg.norm(d1) * np.linalg.norm(d2)
        if scale == 0:
            continue
        c = float(cross2(d1, d2)) / scale
        if c < -COLLINEAR_TOL:
            raise InvalidNormError(f"Vertex list is not convex at index {k}")
        if c > COLLINEAR_TOL:
            keep.append(k)
    v = v[keep]
    if len(v) < 4:
        raise InvalidNormError("Polygonal unit ball needs >= 4 non-collinear vertices")

    scale = float(np.max(np.linalg.norm(v, axis=1)))
    for p in v:
        if np.min(np.linalg.norm(v + p, axis=1)) > SYMMETRY_TOL * max(scale, 1.0):
            raise InvalidNormError("Vertex list is not centrally symmetric")
    return v


class PNorm(AnisotropyNorm):
    """The l^p norm, 1 <= p <= inf; p = 2 is the Euclidean norm."""

    form = "pnorm"

    def __init__(self, p: float = 2.0):
        p = float(p)
        if not p >= 1.0:
            raise InvalidNormError(f"p-norm needs p >= 1, got {p}")
        self.p = p
        super().__init__()

    def _gauge(self, xi):
        if self.p == 1.0:
            return np.abs(xi).sum(axis=1)
        if math.isinf(self.p):
            return np.abs(xi).max(axis=1)
        if self.p == 2.0:
            return np.hypot(xi[:, 0], xi[:, 1])
        return np.linalg.norm(xi, ord=self.p, axis=1)

    def _ellipticity(self):
        inv = 0.0 if math.isinf(self.p) else 1.0 / self.p
        c = 2.0 ** (inv - 0.5)
        return (min(1.0, c), max(1.0, c))

    def breakpoints(self):
        poly = self.exact_polygon()
        return poly.breakpoints() if poly is not None else np.empty(0)

    def linear_pieces(self):
        poly = self.exact_polygon()
        return poly.linear_pieces() if poly is not None else []

    def exact_polygon(self):
        if self.p == 1.0:
            return PolygonalNorm([[1, 0], [0, 1], [-1, 0], [0, -1]])
        if math.isinf(self.p):
            return PolygonalNorm([[1, 1], [-1, 1], [-1, -1], [1, -1]])
        return None

    def polar(self):
        if self.p == 1.0:
            return PNorm(math.inf)
        if math.isinf(self.p):
            return PNorm(1.0)
        return PNorm(self.p / (self.p - 1.0))

    def to_dict(self):
        if self.p == 2.0:
            return {"form": "euclidean"}
        return {"form": "pnorm", "p": "inf" if math.isinf(self.p) else self.p}


class EllipseNorm(AnisotropyNorm):
    """phi(xi) = sqrt(xi^T A xi) for a symmetric positive-definite A."""

    form = "ellipse"

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=float)
        if a.shape != (2, 2) or not np.allclose(a, a.T):
            raise InvalidNormError("Ellipse norm needs a symmetric 2x2 matrix")
        if np.min(np.linalg.eigvalsh(a)) <= 0:
            raise InvalidNormError("Ellipse norm matrix must be positive definite")
        self.matrix = a
        super().__init__()

    def _gauge(self, xi):
        return np.sqrt(np.einsum("ni,ij,nj->n", xi, self.matrix, xi))

    def _ellipticity(self):
        w = np.linalg.eigvalsh(self.matrix)
        return float(np.sqrt(w[0])), float(np.sqrt(w[-1]))

    def breakpoints(self):
        return np.empty(0)

    def linear_pieces(self):
        return []

    def polar(self):
        return EllipseNorm(np.linalg.inv(self.matrix))

    def to_dict(self):
        return {"form": "ellipse", "matrix": self.matrix.tolist()}


class FacetedDiskNorm(AnisotropyNorm):
    """
    Euclidean disk cut by symmetric pairs of chords. Each (centre, width) pair
    produces flat parts with normal arcs (centre -/+ width/2) and the opposite arc.
    """

    form = "faceted"

    def __init__(self, arcs: Sequence[Sequence[float]]):
        arcs = [(float(c), float(w)) for c, w in arcs]
        if not arcs:
            raise InvalidNormError("Faceted disk needs at least one arc")
        for c, w in arcs:
            if not 0.0 < w < math.pi:
                raise InvalidNormError(f"Facet arc width must lie in (0, pi), got {w}")
        spans = []
        for c, w in arcs:
            for shift in (0.0, math.pi):
                spans.append((float(wrap_angle(c + shift - w / 2)), w))
        spans.sort()
        for (lo1, w1), (lo2, _) in zip(spans, spans[1:] + [(spans[0][0] + TWO_PI, 0.0)]):
            if lo1 + w1 > lo2 + 1e-12:
                raise InvalidNormError("Facet arcs overlap")
        self.arcs = arcs
        self._normals = unit_directions([c for c, _ in arcs])
        self._scales = np.array([math.cos(w / 2) for _, w in arcs])
        super().__init__()

    def _gauge(self, xi):
        radial = np.hypot(xi[:, 0], xi[:, 1])
        flat = np.abs(xi @ self._normals.T) / self._scales
        return np.maximum(radial, flat.max(axis=1))

    def _ellipticity(self):
        return 1.0, float(np.max(1.0 / self._scales))

    def linear_pieces(self):
        pieces = []
        for (c, w), n, s in zip(self.arcs, self._normals, self._scales):
            for sign in (1.0, -1.0):
                centre = c if sign > 0 else c + math.pi
                lo = float(wrap_angle(centre - w / 2))
                pieces.append((lo, lo + w, sign * n / s))
        return pieces

    def breakpoints(self):
        ends = []
        for lo, hi, _ in self.linear_pieces():
            ends.extend([lo, hi])
        return wrap_angle(np.array(ends))

    def polar(self):
        return self.polygonal_approximation(POLAR_APPROX_VERTICES).polar()

    def to_dict(self):
        return {"form": "faceted", "arcs": [list(a) for a in self.arcs]}


class SumNorm(AnisotropyNorm):
    """Weighted sum sum_i w_i phi_i of norms (w_i > 0)."""

    form = "sum"

    def __init__(self, terms: Sequence[Tuple[float, AnisotropyNorm]]):
        flat = []
        for w, norm in terms:
            if w <= 0:
                raise InvalidNormError(f"Sum weights must be positive, got {w}")
            if isinstance(norm, SumNorm):
                flat.extend((w * w2, n2) for w2, n2 in norm.terms)
            else:
                flat.append((float(w), norm))
        if not flat:
            raise InvalidNormError("Empty sum of norms")
        self.terms = flat
        super().__init__()

    def _gauge(self, xi):
        return sum(w * n._gauge(xi) for w, n in self.terms)

    def _ellipticity(self):
        h = TWO_PI / ELLIPTICITY_SAMPLES
        theta = np.unique(np.concatenate([np.arange(ELLIPTICITY_SAMPLES) * h, self.breakpoints()]))
        vals = self._gauge(unit_directions(theta))
        return (_circle_extreme(self._gauge, theta, vals, h, lower=True),
                _circle_extreme(self._gauge, theta, vals, h, lower=False))

    def breakpoints(self):
        parts = [n.breakpoints() for _, n in self.terms]
        return np.unique(np.concatenate(parts)) if parts else np.empty(0)

    def linear_pieces(self):
        term_pieces = []
        for w, n in self.terms:
            pieces = n.linear_pieces()
            if not pieces:
                return []
            term_pieces.append((w, pieces))
        cuts = np.unique(np.concatenate([self.breakpoints(), [0.0, TWO_PI]]))
        out = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo < 1e-14:
                continue
            mid = 0.5 * (lo + hi)
            dual = np.zeros(2)
            for w, pieces in term_pieces:
                a = _piece_at(pieces, mid)
                if a is None:
                    break
                dual = dual + w * a
            else:
                out.append((float(lo), float(hi), dual))
        return out

    def exact_polygon(self):
        polys = [n.exact_polygon() for _, n in self.terms]
        if any(p is None for p in polys):
            return None
        angles = self.breakpoints()
        dirs = unit_directions(angles)
        return PolygonalNorm(dirs / self._gauge(dirs)[:, None])

    def polar(self):
        poly = self.exact_polygon()
        if poly is not None:
            return poly.polar()
        return self.polygonal_approximation(POLAR_APPROX_VERTICES).polar()

    def to_dict(self):
        return {"form": "sum", "terms": [{"weight": w, "norm": n.to_dict()} for w, n in self.terms]}


def _piece_at(pieces, theta):
    for lo, hi, a in pieces:
        if wrap_angle(theta - lo) <= hi - lo:
            return np.asarray(a)
    return None


# --- named generators -------------------------------------------------

def l1() -> PNorm:
    return PNorm(1.0)


def l2() -> PNorm:
    return PNorm(2.0)


def linf() -> PNorm:
    return PNorm(math.inf)


def lp(p: float) -> PNorm:
    return PNorm(p)


def hexagon(rotation: float = 0.0) -> PolygonalNorm:
    """Regular hexagon gauge with unit circumradius."""
    angles = rotation + np.arange(6) * (math.pi / 3)
    return PolygonalNorm(unit_directions(angles))


def ellipse(matrix) -> EllipseNorm:
    return EllipseNorm(matrix)


def faceted_disk(arcs) -> FacetedDiskNorm:
    return FacetedDiskNorm(arcs)


def example_two_facet() -> FacetedDiskNorm:
    """Two flat parts with normal arcs (pi/8, 3pi/8) and (9pi/8, 11pi/8)."""
    return FacetedDiskNorm([(math.pi / 4, math.pi / 4)])


# --- serialization ----------------------------------------------------

def norm_from_dict(data: Dict[str, Any]) -> AnisotropyNorm:
    form = str(data.get("form", "")).lower()
    try:
        if form == "polygonal":
            return PolygonalNorm(data["vertices"])
        if form == "pnorm":
            return PNorm(float(data.get("p", 2.0)))
        if form in ("euclidean", "l2"):
            return l2()
        if form == "l1":
            return l1()
        if form == "linf":
            return linf()
        if form == "ellipse":
            return EllipseNorm(data["matrix"])
        if form == "faceted":
            return FacetedDiskNorm(data["arcs"])
        if form == "hexagon":
            return hexagon(float(data.get("rotation", 0.0)))
        if form == "example":
            return example_two_facet()
        if form == "sum":
            return SumNorm([(float(t["weight"]), norm_from_dict(t["norm"])) for t in data["terms"]])
    except KeyError as e:
        raise InvalidNormError(f"Norm form '{form}' is missing field {e}") from e
    raise InvalidNormError(f"Unknown norm form '{form}'")


# --- operations on norms ----------------------------------------------

def evaluate(norm: AnisotropyNorm, xi):
    return norm.evaluate(xi)


def polar(norm: AnisotropyNorm) -> AnisotropyNorm:
    return norm.polar()


def facets(norm: AnisotropyNorm) -> List[Facet]:
    return norm.facets()


def is_strictly_convex(norm: AnisotropyNorm) -> bool:
    return norm.is_strictly_convex


def regularize(norm: AnisotropyNorm, eps: float) -> SumNorm:
    """xi -> phi(xi) + eps * |xi|; the unit ball of the result is strictly convex."""
    if not eps > 0:
        raise InvalidNormError(f"Regularization parameter must be positive, got {eps}")
    return SumNorm([(1.0, norm), (float(eps), l2())])


def facet_for_direction(norm: AnisotropyNorm, nu, tol: float = 1e-12) -> Optional[Facet]:
    """The facet whose open normal arc contains nu or -nu."""
    for facet in norm.facets():
        if facet.contains_direction(nu, closed=False, tol=tol):
            return facet
    return None
