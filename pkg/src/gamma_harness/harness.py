"""
Numerical checks around the convergence of phi_n-functionals:

    |F_a(u) - F_b(u)| <= sup_{|xi| = 1} |a(xi) - b(xi)| * F_l2(u),

liminf and recovery along phi + eps * l2 schedules, and pointwise-to-uniform
convergence of norms sampled on finitely many directions.
"""
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from src.anisotropy import (
    AnisotropyNorm,
    PolygonalNorm,
    SumNorm,
    ellipse,
    hexagon,
    l1,
    l2,
    linf,
    lp,
    regularize,
    sup_distance,
)
from src.chord_solver import solve_strict
from src.domain import BoundaryFunction, ConvexDomain
from src.functional import relaxed_energy
from src.grid_oracle import GridFunction
from src.utils import get_logger, unit_directions

logger = get_logger(__name__)

RELATIVE_SLACK = 1e-6
LIMINF_TAIL = 3


def _energy(norm: AnisotropyNorm, domain: ConvexDomain, u, f: BoundaryFunction) -> float:
    return relaxed_energy(norm, domain, u, f).total


def gamma_bound_check(a: AnisotropyNorm, b: AnisotropyNorm, u, f: BoundaryFunction,
                      domain: Optional[ConvexDomain] = None) -> Dict:
    domain = domain or u.domain
    fa = _energy(a, domain, u, f)
    fb = _energy(b, domain, u, f)
    fl2 = _energy(l2(), domain, u, f)
    dist = sup_distance(a, b)
    lhs = abs(fa - fb)
    rhs = dist.value * fl2
    return {
        "F_a": fa,
        "F_b": fb,
        "F_l2": fl2,
        "sup_distance": dist.value,
        "lhs": lhs,
        "rhs": rhs,
        "ratio": lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf),
        "holds": lhs <= rhs * (1.0 + RELATIVE_SLACK) + 1e-12,
    }


def liminf_experiment(norm: AnisotropyNorm, domain: ConvexDomain, f: BoundaryFunction,
                      eps_schedule: Sequence[float], levels: int = 101, perturb: float = 0.0,
                      grid: int = 64, seed: int = 0) -> Dict:
    """
    F_norm(u_last) <= min over the last schedule entries of F_eps(u_eps). With
    perturb > 0 the u_eps are rastered and disturbed by noise of amplitude
    perturb * eps, and all energies are taken on that raster.
    """
    schedule = [float(e) for e in eps_schedule]
    if any(e2 > e1 for e1, e2 in zip(schedule, schedule[1:])):
        raise ValueError("eps schedule must be decreasing")
    if not schedule:
        raise ValueError("eps schedule is empty")

    rng = np.random.default_rng(seed)
    rows: List[Dict] = []
    families = []
    for eps in schedule:
        reg = norm if eps == 0 else regularize(norm, eps)
        family = solve_strict(reg, domain, f, levels)
        families.append(family)
        if perturb > 0:
            g = GridFunction.from_callable(domain, f, lambda p, fam=family: fam.evaluate(p, check_inside=False), grid)
            noise = perturb * eps * rng.standard_normal(g.values.shape)
            g = g.with_values(g.values + noise)
            rep = relaxed_energy(reg, domain, g, f)
        else:
            rep = relaxed_energy(reg, domain, family, f)
        energy, boundary = rep.total, rep.boundary
        rows.append({"eps": eps, "energy": energy, "boundary": boundary})
        logger.info(f"[GAMMA] liminf eps={eps:.4g}: F_eps={energy:.6g}")

    if perturb > 0:
        last = GridFunction.from_callable(domain, f, lambda p: families[-1].evaluate(p, check_inside=False), grid)
        limit = relaxed_energy(norm, domain, last, f)
    else:
        limit = relaxed_energy(norm, domain, families[-1], f)
    tail = rows[-LIMINF_TAIL:]
    liminf = min(r["energy"] for r in tail)
    slack = RELATIVE_SLACK * max(abs(liminf), 1.0)
    margin = liminf - limit.total
    return {
        "schedule": rows,
        "limit_energy": limit.total,
        "liminf_surrogate": liminf,
        "margin": margin,
        "slack": slack,
        "holds": margin >= -slack,
        "collapsed": norm.is_strictly_convex,
    }


def recovery_experiment(norm: AnisotropyNorm, domain: ConvexDomain, f: BoundaryFunction, u,
                        eps_schedule: Sequence[float]) -> Dict:
    """Constant recovery sequence: F_{phi + eps l2}(u) -> F_phi(u) with error <= eps F_l2(u)."""
    base = _energy(norm, domain, u, f)
    fl2 = _energy(l2(), domain, u, f)
    rows = []
    for eps in sorted((float(e) for e in eps_schedule), reverse=True):
        reg = norm if eps == 0 else regularize(norm, eps)
        fe = _energy(reg, domain, u, f)
        rows.append({"eps": eps, "energy": fe, "difference": fe - base, "bound": eps * fl2})
    eps_arr = np.array([r["eps"] for r in rows])
    diff = np.array([r["difference"] for r in rows])
    energies = np.array([r["energy"] for r in rows])
    tol = 1e-12 * max(1.0, abs(base))
    within = bool(np.all(np.abs(diff) <= eps_arr * fl2 * (1.0 + 1e-9) + tol))
    monotone = bool(np.all(np.diff(energies) <= tol))
    positive = eps_arr > 0
    slope = float(np.polyfit(eps_arr, diff, 1)[0]) if positive.sum() >= 2 else None
    return {
        "F": base,
        "F_l2": fl2,
        "table": rows,
        "within_bound": within,
        "monotone": monotone,
        "slope": slope,
    }


def pointwise_uniform_check(norm_sequence: Sequence[AnisotropyNorm], limit_norm: AnisotropyNorm,
                            directions: int = 64) -> Dict:
    """
    From the gaps at K sampled directions and the Lipschitz bound |phi(xi) - phi(eta)| <= Gamma |xi - eta|,
    sup-distance <= max sampled gap + (Gamma_n + Gamma) * pi / K.
    """
    if directions < 8:
        raise ValueError(f"Need at least 8 sampled directions, got {directions}")
    theta = 2.0 * math.pi * np.arange(directions) / directions
    dirs = unit_directions(theta)
    ref = limit_norm.evaluate(dirs)
    half_gap = math.pi / directions
    rows = []
    for k, norm in enumerate(norm_sequence):
        sampled = float(np.max(np.abs(norm.evaluate(dirs) - ref)))
        bound = sampled + (norm.gamma_upper + limit_norm.gamma_upper) * half_gap
        actual = sup_distance(norm, limit_norm).value
        rows.append({
            "index": k,
            "sampled_gap": sampled,
            "uniform_bound": bound,
            "sup_distance": actual,
            "inter_sample_slack": bound - actual,
        })
    dists = [r["sup_distance"] for r in rows]
    return {
        "directions": directions,
        "rows": rows,
        "bound_holds": all(r["sup_distance"] <= r["uniform_bound"] + 1e-12 for r in rows),
        "max_inter_sample_slack": max((r["inter_sample_slack"] for r in rows), default=0.0),
        "final_distance": dists[-1] if dists else 0.0,
        "converging": bool(len(dists) < 2 or dists[-1] <= dists[0]),
    }


# --- generators ---------------------------------------------------------

def random_polygonal_norm(rng: np.random.Generator, vertices: int = 4) -> PolygonalNorm:
    angles = np.sort(rng.uniform(0.0, math.pi, vertices))
    radii = rng.uniform(0.5, 1.5, vertices)
    half = radii[:, None] * unit_directions(angles)
    pts = np.vstack([half, -half])
    hull = ConvexHull(pts)
    return PolygonalNorm(pts[hull.vertices])


def random_norm(rng: np.random.Generator) -> AnisotropyNorm:
    kind = int(rng.integers(0, 8))
    if kind == 0:
        return l1()
    if kind == 1:
        return l2()
    if kind == 2:
        return linf()
    if kind == 3:
        return lp(float(rng.uniform(1.2, 6.0)))
    if kind == 4:
        return hexagon(float(rng.uniform(0.0, math.pi / 3)))
    if kind == 5:
        a = rng.normal(size=(2, 2))
        return ellipse(a @ a.T + 0.2 * np.eye(2))
    if kind == 6:
        return random_polygonal_norm(rng, int(rng.integers(2, 6)))
    return SumNorm([(float(rng.uniform(0.5, 2.0)), random_norm(rng)),
                    (float(rng.uniform(0.01, 0.5)), random_norm(rng))])


def random_grid_function(rng: np.random.Generator, domain: ConvexDomain, f: BoundaryFunction,
                         resolution: int = 32) -> GridFunction:
    """Linear part, a random jump line and small noise."""
    grid = GridFunction(domain, f, resolution)
    X = grid.centers
    slope = rng.normal(size=2)
    normal = unit_directions(rng.uniform(0.0, 2.0 * math.pi))
    jump = rng.uniform(-1.0, 1.0) * ((X - domain.centroid) @ normal > 0)
    vals = X @ slope + jump + 0.05 * rng.standard_normal(len(X))
    return grid.with_values(vals.reshape(grid.shape))
