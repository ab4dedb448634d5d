"""
Competitor minimizers for faceted norms: equal-energy perturbations of the
straight-line solution u0 = <nu0, x> and a family of minimizers whose L1
norms tend to zero.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.anisotropy import AnisotropyNorm, Facet
from src.counterexamples.perturbation import resolve_facet
from src.counterexamples.profiles import (
    CantorProfile,
    FlatProfile,
    PlateauProfile,
    ProfileSolution,
    ShiftedBoundaryProfile,
    TriangleBumpProfile,
    cantor_function,
)
from src.domain import BoundaryFunction, ConvexDomain, disk, linear_data
from src.errors import ConstructionError
from src.functional import relaxed_energy
from src.utils import get_logger, rotate_cw

logger = get_logger(__name__)

SLOPE_FRACTION = 0.8
DEFAULT_LEVELS = 201
REFERENCE_DEPTH = 52


@dataclass
class Construction:
    """A generated competitor next to the baseline it must tie with."""
    kind: str
    baseline: ProfileSolution
    solution: ProfileSolution
    report: Dict = field(default_factory=dict)


@dataclass
class VanishingFamily:
    solutions: List[ProfileSolution]
    report: Dict = field(default_factory=dict)


def _slope_cap(facet: Facet, nu0: np.ndarray) -> float:
    margin = facet.signed_margin(nu0)
    if margin <= 0:
        raise ConstructionError("The level direction is not inside the facet normal arc")
    return SLOPE_FRACTION * math.tan(min(margin, 0.49 * math.pi))


def _linear_setup(norm: AnisotropyNorm, domain: Optional[ConvexDomain], facet: Optional[Facet]):
    domain = domain or disk()
    facet = resolve_facet(norm, facet)
    nu0 = facet.mid_direction
    f = linear_data(domain, nu0)
    return domain, facet, nu0, f


def _band(f: BoundaryFunction, width: float):
    mid = 0.5 * (f.min + f.max)
    return (mid - 0.5 * width, mid + 0.5 * width)


def _normals_ok(solution: ProfileSolution, facet: Facet, ts) -> bool:
    for t in ts:
        for n in solution.segment_normals(float(t)):
            if not facet.contains_direction(n, closed=True, tol=1e-9):
                return False
    return True


def compare_energies(norm: AnisotropyNorm, baseline, competitor, f: BoundaryFunction, samples: int = 512) -> Dict:
    e0 = relaxed_energy(norm, baseline.domain, baseline, f)
    e1 = relaxed_energy(norm, competitor.domain, competitor, f)
    s = np.linspace(0.0, baseline.domain.perimeter, samples, endpoint=False)
    trace_gap = float(np.max(np.abs(baseline.trace(s) - competitor.trace(s))))
    return {
        "baseline_energy": e0.to_dict(),
        "competitor_energy": e1.to_dict(),
        "energy_difference": abs(e1.total - e0.total),
        "trace_difference": trace_gap,
    }


def nonunique_pair(norm: AnisotropyNorm, domain: Optional[ConvexDomain] = None, facet: Optional[Facet] = None,
                   band_fraction: float = 0.2, kappa: float = 0.5, levels: int = DEFAULT_LEVELS,
                   points: int = 400, seed: int = 0) -> Construction:
    """
    Linear data <nu0, x> for nu0 in the middle of a facet arc: the straight
    level lines and a competitor whose middle band of levels carries triangle
    bumps. Both have the same trace and energy.
    """
    domain, facet, nu0, f = _linear_setup(norm, domain, facet)
    band = _band(f, band_fraction * f.oscillation)
    tau = rotate_cw(nu0)
    center = float(domain.centroid @ tau)
    peak = kappa * 0.5 * (band[1] - band[0])
    half_width = max(0.15 * domain.diameter, peak / _slope_cap(facet, nu0))
    profile = TriangleBumpProfile(center=center, half_width=half_width, band=band, kappa=kappa)

    baseline = ProfileSolution(domain, f, nu0, FlatProfile(), levels, label="baseline")
    competitor = ProfileSolution(domain, f, nu0, profile, levels, label="triangle_bumps")
    report = compare_energies(norm, baseline, competitor, f)

    rng = np.random.default_rng(seed)
    sig = center + half_width * rng.uniform(-0.5, 0.5, points)
    ys = rng.uniform(band[0], band[1], points)
    pts = competitor.to_point(sig, ys)
    pts = pts[domain.contains(pts)]
    diff = np.abs(baseline.evaluate(pts) - competitor.evaluate(pts))
    report.update({
        "nu0": nu0.tolist(),
        "band": list(band),
        "points": int(len(pts)),
        "differing_points": int(np.sum(diff > 1e-9)),
        "max_pointwise_difference": float(diff.max()) if len(diff) else 0.0,
        "normals_on_facet": _normals_ok(competitor, facet, np.linspace(band[0], band[1], 11)),
    })
    logger.info(f"[COUNTEREXAMPLE] non-unique pair: energy difference {report['energy_difference']:.3e}, "
                f"{report['differing_points']}/{report['points']} points differ")
    return Construction("nonunique", baseline, competitor, report)


def non_w11_minimizer(norm: AnisotropyNorm, domain: Optional[ConvexDomain] = None, facet: Optional[Facet] = None,
                      band_width: Optional[float] = None, segment_length: Optional[float] = None,
                      levels: int = DEFAULT_LEVELS) -> Construction:
    """All levels of a band detour through one segment q1 q2: u jumps by the band width across it."""
    domain, facet, nu0, f = _linear_setup(norm, domain, facet)
    width = 0.2 * f.oscillation if band_width is None else float(band_width)
    length = 0.3 * domain.diameter if segment_length is None else float(segment_length)
    band = _band(f, width)
    tau = rotate_cw(nu0)
    center = float(domain.centroid @ tau)
    ramp = max(0.5 * width / _slope_cap(facet, nu0), 0.05 * domain.diameter)
    profile = PlateauProfile(center=center, length=length, ramp=ramp, band=band)

    baseline = ProfileSolution(domain, f, nu0, FlatProfile(), levels, label="baseline")
    solution = ProfileSolution(domain, f, nu0, profile, levels, label="non_w11")
    report = compare_energies(norm, baseline, solution, f)

    target = profile.target
    delta = 1e-6 * domain.diameter
    across = solution.to_point(np.array([center, center]), np.array([target - delta, target + delta]))
    below, above = solution.evaluate(across)
    q1 = solution.to_point(np.array(center - 0.5 * length), np.array(target))
    q2 = solution.to_point(np.array(center + 0.5 * length), np.array(target))
    report.update({
        "band": list(band),
        "band_width": width,
        "jump": float(above - below),
        "segment": [q1.tolist(), q2.tolist()],
        "normals_on_facet": _normals_ok(solution, facet, np.linspace(band[0], band[1], 11)),
    })
    logger.info(f"[COUNTEREXAMPLE] non-W11: jump {report['jump']:.6g} across q1q2, "
                f"energy difference {report['energy_difference']:.3e}")
    return Construction("non_w11", baseline, solution, report)


def non_sbv_minimizer(norm: AnisotropyNorm, domain: Optional[ConvexDomain] = None, facet: Optional[Facet] = None,
                      depth: int = 12, band_width: Optional[float] = None, plateau_length: Optional[float] = None,
                      levels: int = DEFAULT_LEVELS, samples: int = 1000) -> Construction:
    """
    Levels of a band are moved, over a plateau, to the line of level
    (s + g(s)) / 2 with g the Cantor stairs: the derivative of u there has a
    Cantor part.
    """
    if depth < 1:
        raise ConstructionError(f"Cantor depth must be >= 1, got {depth}")
    domain, facet, nu0, f = _linear_setup(norm, domain, facet)
    width = 0.2 * f.oscillation if band_width is None else float(band_width)
    if width <= 0:
        raise ConstructionError("The Cantor band needs a positive width")
    length = 0.3 * domain.diameter if plateau_length is None else float(plateau_length)
    band = _band(f, width)
    tau = rotate_cw(nu0)
    center = float(domain.centroid @ tau)
    ramp = max(0.5 * width / _slope_cap(facet, nu0), 0.05 * domain.diameter)
    profile = CantorProfile(center=center, length=length, ramp=ramp, band=band, depth=depth)

    baseline = ProfileSolution(domain, f, nu0, FlatProfile(), levels, label="baseline")
    solution = ProfileSolution(domain, f, nu0, profile, levels, label="non_sbv")
    report = compare_energies(norm, baseline, solution, f)

    # along the transversal through the plateau, u = lo + w * k^{-1}(eta) with k(s) = (s + g(s)) / 2
    eta = (np.arange(samples) + 0.5) / samples
    pts = solution.to_point(np.full(samples, center), band[0] + width * eta)
    s = (solution.evaluate(pts) - band[0]) / width
    recovered = 2.0 * eta - s
    error = float(np.max(np.abs(recovered - cantor_function(s, REFERENCE_DEPTH))))
    report.update({
        "band": list(band),
        "depth": depth,
        "cantor_error": error,
        "cantor_bound": 2.0 ** -depth,
        "samples": samples,
        "normals_on_facet": _normals_ok(solution, facet, np.linspace(band[0], band[1], 11)),
    })
    logger.info(f"[COUNTEREXAMPLE] non-SBV depth {depth}: Cantor error {error:.3e} (bound {2.0 ** -depth:.3e})")
    return Construction("non_sbv", baseline, solution, report)


def _cap_arc(domain: ConvexDomain, facet: Facet, nu0: np.ndarray, support_fraction: float):
    """Boundary arc around the point with outward normal nu0 whose normals stay well inside the facet arc."""
    tau = rotate_cw(nu0)
    sig = domain.vertices @ tau
    y = domain.vertices @ nu0
    n = len(domain)
    k0 = int(np.argmax(y))
    limit = support_fraction * facet.signed_margin(nu0)
    corners = set(domain.corners().tolist())

    def ok_edge(k):
        nrm = domain.edge_normals[k % n]
        return abs(math.atan2(nrm[0] * nu0[1] - nrm[1] * nu0[0], float(nrm @ nu0))) <= limit

    if k0 in corners:
        raise ConstructionError("The boundary has a corner at the point with normal nu0")
    right = k0
    while ok_edge(right) and (right + 1) % n != k0:
        right += 1
        if right % n in corners:
            raise ConstructionError("Corner interference near the witness point")
    left = k0
    while ok_edge(left - 1) and (left - 1) % n != k0:
        left -= 1
        if left % n in corners:
            raise ConstructionError("Corner interference near the witness point")
    if right - left < 2:
        raise ConstructionError("Boundary sampling too coarse around the witness point")
    idx = np.arange(left, right + 1) % n
    y_cut = max(y[left % n], y[right % n])
    order = np.argsort(sig[idx])
    return sig[idx][order], y[idx][order], y_cut, float(y[k0]), k0


def vanishing_l1_family(norm: AnisotropyNorm, domain: Optional[ConvexDomain] = None, n: int = 5,
                        facet: Optional[Facet] = None, support_fraction: float = 0.5,
                        levels: int = DEFAULT_LEVELS) -> VanishingFamily:
    """
    Data f = ramp(<nu0, x>) supported on a small cap around x0 (outward
    normal nu0) and the minimizers u_k whose levels follow the boundary
    pushed inward by (1 - t) * delta_k, delta_k = D 2^-k; u_0 is the
    one-dimensional solution, the L1 norms decrease to zero.
    """
    if n < 1:
        raise ConstructionError("The family needs at least one member")
    domain = domain or disk()
    facet = resolve_facet(norm, facet)
    nu0 = facet.mid_direction
    arc_sigma, arc_y, y_cut, y_top, k0 = _cap_arc(domain, facet, nu0, support_fraction)
    height = y_top - y_cut
    if height <= 0:
        raise ConstructionError("Degenerate cap around the witness point")
    values = np.clip((domain.vertices @ nu0 - y_cut) / height, 0.0, 1.0)
    f = BoundaryFunction(domain, values, name="vanishing_cap")

    solutions = []
    for k in range(n):
        profile = ShiftedBoundaryProfile(base_offset=y_cut, base_scale=height, arc_sigma=arc_sigma,
                                         arc_y=arc_y, delta=height * 2.0 ** -k)
        solutions.append(ProfileSolution(domain, f, nu0, profile, levels, label=f"vanishing_{k}"))

    energies = [relaxed_energy(norm, domain, u, f).total for u in solutions]
    l1 = [u.l1_norm() for u in solutions]
    s = np.linspace(0.0, domain.perimeter, 512, endpoint=False)
    traces = [float(np.max(np.abs(u.trace(s) - f(s)))) for u in solutions]
    report = {
        "x0": domain.vertices[k0].tolist(),
        "nu0": nu0.tolist(),
        "deltas": [height * 2.0 ** -k for k in range(n)],
        "energies": energies,
        "energy_spread": float(max(energies) - min(energies)),
        "l1_norms": l1,
        "l1_strictly_decreasing": bool(np.all(np.diff(l1) < 0)),
        "trace_deviation": max(traces),
        "normals_on_facet": all(_normals_ok(u, facet, np.linspace(0.05, 0.95, 7)) for u in solutions),
    }
    logger.info(f"[COUNTEREXAMPLE] vanishing L1: norms {', '.join(f'{v:.4g}' for v in l1)}; "
                f"energy spread {report['energy_spread']:.3e}")
    return VanishingFamily(solutions, report)
