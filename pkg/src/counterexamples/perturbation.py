"""Polygonal chains with the same anisotropic length as a chord whose normal lies on a facet."""
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.anisotropy import AnisotropyNorm, Facet
from src.domain import ConvexDomain
from src.errors import ConstructionError, NoFacetError
from src.functional import Polyline, anisotropic_length
from src.utils import get_logger, rotate_ccw, rotate_cw

logger = get_logger(__name__)

TRIANGLE = "triangle"
STAIRCASE = "staircase"


@dataclass
class PerturbationSpec:
    facet: Facet
    chord: Tuple[Tuple[float, float], Tuple[float, float]]
    waypoints: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    @property
    def chain(self) -> Polyline:
        p1, p2 = (np.asarray(p, float) for p in self.chord)
        return Polyline(np.vstack([p1, self.waypoints, p2]))

    @property
    def normals(self) -> np.ndarray:
        return self.chain.normals

    def check(self, tol: float = 1e-12) -> bool:
        return all(self.facet.contains_direction(n, closed=True, tol=tol) for n in self.normals)


def resolve_facet(norm: AnisotropyNorm, facet: Optional[Facet] = None, direction=None) -> Facet:
    facets = norm.facets()
    if not facets:
        raise NoFacetError("The unit ball of the norm is strictly convex: no facet to perturb along")
    if facet is not None:
        return facet
    if direction is not None:
        for fc in facets:
            if fc.contains_direction(direction):
                return fc
        raise NoFacetError(f"No facet normal arc contains the direction {tuple(np.ravel(direction))}")
    return facets[0]


def _rotate(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def triangle_waypoints(p1, p2, flank_angle: float, base_fraction: float = 0.25, side: float = 1.0) -> np.ndarray:
    """q1, q0, q2: an isosceles bump on the middle part of the chord, flanks tilted by flank_angle."""
    p1, p2 = np.asarray(p1, float), np.asarray(p2, float)
    d = p2 - p1
    L = float(np.linalg.norm(d))
    d = d / L
    nu = rotate_ccw(d)
    q1 = p1 + base_fraction * L * d
    q2 = p2 - base_fraction * L * d
    half = 0.5 * float(np.linalg.norm(q2 - q1))
    q0 = 0.5 * (q1 + q2) + side * half * math.tan(flank_angle) * nu
    return np.stack([q1, q0, q2])


def staircase_waypoints(facet: Facet, p1, p2, steps: int) -> np.ndarray:
    """Alternating moves along the two extreme tangent directions of the facet's normal arc."""
    p1, p2 = np.asarray(p1, float), np.asarray(p2, float)
    lo, hi = facet.normal_arc
    d_lo = rotate_cw(np.array([math.cos(lo), math.sin(lo)]))
    d_hi = rotate_cw(np.array([math.cos(hi), math.sin(hi)]))
    v = p2 - p1
    coef = np.linalg.solve(np.stack([d_lo, d_hi], axis=1), v)
    # moving against a tangent flips its normal to -n, still on the same facet pair
    d_lo, d_hi = np.sign(coef[0]) * d_lo, np.sign(coef[1]) * d_hi
    a, b = abs(coef[0]) / steps, abs(coef[1]) / steps
    pts = []
    cur = p1.copy()
    for k in range(steps):
        cur = cur + a * d_lo
        pts.append(cur.copy())
        if k < steps - 1:
            cur = cur + b * d_hi
            pts.append(cur.copy())
    return np.asarray(pts)


def facet_perturbation(norm: AnisotropyNorm, domain: Optional[ConvexDomain], facet: Optional[Facet],
                       chord: Sequence[Sequence[float]], shape: str = TRIANGLE, flank_angle: Optional[float] = None,
                       base_fraction: float = 0.25, side: float = 1.0, steps: int = 4,
                       tol: float = 1e-12) -> Polyline:
    """
    A polygonal chain from p1 to p2 with the anisotropic length of the chord
    p1 p2: all segment normals lie on the normal arc of one facet, where phi
    is linear.
    """
    p1, p2 = (np.asarray(p, dtype=float) for p in chord)
    d = p2 - p1
    if np.linalg.norm(d) == 0:
        raise ConstructionError("Chord endpoints coincide")
    nu = rotate_ccw(d / np.linalg.norm(d))
    facet = resolve_facet(norm, facet, nu)
    if not facet.contains_direction(nu, closed=False, tol=tol):
        raise ConstructionError(f"Chord normal {tuple(nu)} is not inside the facet normal arc {facet.normal_arc}")

    if shape == TRIANGLE:
        if flank_angle is None:
            flank_angle = 0.5 * facet.signed_margin(nu)
        waypoints = triangle_waypoints(p1, p2, flank_angle, base_fraction, side)
    elif shape == STAIRCASE:
        if steps < 1:
            raise ConstructionError("A staircase needs at least one step")
        waypoints = staircase_waypoints(facet, p1, p2, steps)
    else:
        raise ConstructionError(f"Unknown perturbation shape '{shape}'")

    spec = PerturbationSpec(facet, (tuple(p1), tuple(p2)), waypoints)
    if not spec.check(tol):
        raise ConstructionError("A perturbed segment normal escapes the facet normal arc")
    chain = spec.chain
    if domain is not None and not np.all(domain.contains(chain.vertices, tol=1e-9)):
        raise ConstructionError("The perturbed chain leaves the domain")
    logger.debug(f"[PERTURB] {shape}: {len(chain.vertices)} vertices, length "
                 f"{anisotropic_length(norm, chain):.12g} vs chord {float(norm.evaluate(rotate_ccw(d))):.12g}")
    return chain


def perturbation_report(norm: AnisotropyNorm, chord, chain: Polyline) -> Dict:
    p1, p2 = (np.asarray(p, dtype=float) for p in chord)
    straight = float(norm.evaluate(rotate_ccw(p2 - p1)))
    bent = anisotropic_length(norm, chain)
    return {
        "chord_length": straight,
        "chain_length": bent,
        "difference": abs(bent - straight),
        "vertices": chain.vertices.tolist(),
    }
