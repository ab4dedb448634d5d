"""
Anisotropic lengths, the coarea bridge and the relaxed functional

    F_phi(u) = int_Omega |Du|_phi + int_{dOmega} phi(nu_Omega) |Tu - f| dH^1.
"""
from dataclasses import asdict, dataclass
from typing import Protocol, Tuple, runtime_checkable

import numpy as np

from src.anisotropy import AnisotropyNorm
from src.domain import BoundaryFunction, ConvexDomain
from src.errors import DomainError, NestingError
from src.utils import as_points, get_logger, rotate_ccw

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Polyline:
    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = as_points(self.vertices)
        if len(v) < 2:
            raise DomainError("A polyline needs at least two vertices")
        object.__setattr__(self, "vertices", v)
        if np.any(np.linalg.norm(self.segments, axis=1) <= 1e-15):
            raise DomainError("Consecutive polyline vertices must be distinct")

    @property
    def segments(self) -> np.ndarray:
        v = self.vertices
        if self.closed:
            return np.roll(v, -1, axis=0) - v
        return v[1:] - v[:-1]

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.segments, axis=1)

    @property
    def normals(self) -> np.ndarray:
        """Left normals of the travel direction."""
        seg = self.segments
        return rotate_ccw(seg / np.linalg.norm(seg, axis=1)[:, None])

    @property
    def euclidean_length(self) -> float:
        return float(self.lengths.sum())

    @property
    def endpoints(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.vertices[0], self.vertices[-1]


def anisotropic_length(norm: AnisotropyNorm, curve: Polyline) -> float:
    """sum_i phi(nu_i) len_i, computed as sum_i phi(R seg_i) by homogeneity."""
    return float(np.sum(norm.evaluate(rotate_ccw(curve.segments))))


def jensen_lower_bound(norm: AnisotropyNorm, p1, p2) -> float:
    d = np.asarray(p2, float) - np.asarray(p1, float)
    if np.linalg.norm(d) == 0:
        raise DomainError("Segment endpoints coincide")
    return float(norm.evaluate(rotate_ccw(d)))


@runtime_checkable
class PiecewiseSolution(Protocol):
    """Anything evaluable on the closed domain with a trace and an interior phi-TV."""

    domain: ConvexDomain

    def evaluate(self, points) -> np.ndarray:
        ...

    def trace(self, s) -> np.ndarray:
        ...

    def interior_tv(self, norm: AnisotropyNorm) -> float:
        ...


@runtime_checkable
class LevelFamily(Protocol):
    def level_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        ...

    def level_length(self, norm: AnisotropyNorm, t: float) -> float:
        ...


@dataclass(frozen=True)
class EnergyReport:
    interior: float
    boundary: float

    @property
    def total(self) -> float:
        return self.interior + self.boundary

    def to_dict(self):
        out = asdict(self)
        out["total"] = self.total
        return out


def coarea_tv(norm: AnisotropyNorm, family: LevelFamily, check_nesting: bool = True) -> float:
    """
    sum_j w_j * (anisotropic length of the level-t_j boundary), with w_j the
    width of the t-cell around t_j (half cells at both ends of the grid).
    """
    if check_nesting and hasattr(family, "check_nesting"):
        report = family.check_nesting()
        if not report["nested"]:
            raise NestingError(f"Level family is not nested: {report['violations']} violations")
    levels, weights = family.level_grid()
    if len(levels) == 0:
        return 0.0
    total = 0.0
    for t, w in zip(levels, weights):
        if w > 0:
            total += w * family.level_length(norm, float(t))
    return float(total)


def level_cell_widths(levels: np.ndarray, spacing: float = 1.0) -> np.ndarray:
    levels = np.asarray(levels, dtype=float)
    if len(levels) == 0:
        return np.empty(0)
    if len(levels) == 1:
        return np.array([spacing])
    mids = 0.5 * (levels[1:] + levels[:-1])
    lo = np.concatenate([[levels[0]], mids])
    hi = np.concatenate([mids, [levels[-1]]])
    return hi - lo


def boundary_penalty(norm: AnisotropyNorm, domain: ConvexDomain, u: PiecewiseSolution,
                     f: BoundaryFunction) -> float:
    """sum over boundary edges of phi(outward normal) * length * |Tu - f| at the edge midpoint."""
    s_mid = domain.arclength + 0.5 * domain.edge_lengths
    gap = np.abs(np.asarray(u.trace(s_mid)) - f(s_mid))
    weights = norm.evaluate(domain.edge_normals) * domain.edge_lengths
    return float(np.sum(weights * gap))


def relaxed_energy(norm: AnisotropyNorm, domain: ConvexDomain, u: PiecewiseSolution,
                   f: BoundaryFunction) -> EnergyReport:
    interior = float(u.interior_tv(norm))
    boundary = boundary_penalty(norm, domain, u, f)
    logger.debug(f"[ENERGY] interior={interior:.6g} boundary={boundary:.6g}")
    return EnergyReport(interior, boundary)


def energy_report(norm: AnisotropyNorm, domain: ConvexDomain, u: PiecewiseSolution, f: BoundaryFunction) -> dict:
    return relaxed_energy(norm, domain, u, f).to_dict()
