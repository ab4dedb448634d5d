"""
Least-gradient solutions from boundary data: superlevel sets bounded by the
cheapest non-crossing chord systems (strictly convex norm and domain), and
the limit of regularized solutions phi + eps * l2 for faceted norms.
"""
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.anisotropy import AnisotropyNorm, regularize
from src.chord_solver.family import LevelSet, LevelSetFamily
from src.chord_solver.levels import level_arcs
from src.chord_solver.matching import optimal_matching
from src.domain import BoundaryFunction, ConvexDomain, Modulus
from src.errors import HypothesisError, NestingError
from src.functional import Polyline
from src.utils import get_logger

logger = get_logger(__name__)

DEFAULT_LEVELS = 101
DEFAULT_SCHEDULE = tuple(2.0 ** -k for k in range(11))


def level_grid(f: BoundaryFunction, levels: Union[int, Sequence[float]] = DEFAULT_LEVELS) -> np.ndarray:
    if isinstance(levels, (int, np.integer)):
        if levels < 1:
            raise ValueError("Need at least one level")
        if levels == 1:
            return np.array([0.5 * (f.min + f.max)])
        return np.linspace(f.min, f.max, int(levels))
    return np.asarray(levels, dtype=float)


def _require_strict(norm: AnisotropyNorm, domain: ConvexDomain):
    if not norm.is_strictly_convex:
        raise HypothesisError(
            "The unit ball of the norm has flat parts; solve_strict needs a strictly convex norm (use solve_regularized)"
        )
    if not domain.is_strictly_convex:
        raise HypothesisError(f"Domain '{domain.name}' is not strictly convex; the chord construction does not apply")


def solve_level(norm: AnisotropyNorm, domain: ConvexDomain, f: BoundaryFunction, t: float,
                previous: Optional[LevelSet] = None, value_tol: float = 1e-9,
                tie_tol: float = 1e-12) -> LevelSet:
    arcs = level_arcs(domain, f, t, value_tol)
    if arcs.full or arcs.empty:
        return LevelSet(arcs.t, (), full=arcs.full, requested_t=arcs.requested_t)
    prev = previous.segments if previous is not None else None
    pairs = optimal_matching(norm, arcs.points, arcs.labels, previous_chords=prev, tie_tol=tie_tol)
    chords = tuple(Polyline(np.stack([arcs.points[i], arcs.points[j]])) for i, j in pairs)
    ends = tuple(float(arcs.arclength[k]) for pair in pairs for k in pair)
    if len(arcs) > 2:
        logger.debug(f"[CHORD_SOLVER] t={arcs.t:.6g}: {len(arcs)} endpoints -> {len(chords)} chords")
    return LevelSet(arcs.t, chords, requested_t=arcs.requested_t, endpoint_arclength=ends)


def solve_strict(norm: AnisotropyNorm, domain: ConvexDomain, f: BoundaryFunction,
                 levels: Union[int, Sequence[float]] = DEFAULT_LEVELS, value_tol: float = 1e-9,
                 tie_tol: float = 1e-12) -> LevelSetFamily:
    """
    Level sets are built in the order given (the previous level steers ties
    toward non-crossing chords) and then sorted by t.
    """
    _require_strict(norm, domain)
    if f.oscillation <= value_tol:
        logger.info(f"[CHORD_SOLVER] constant data ({f.min:.6g}); empty chord family")
        return LevelSetFamily(domain, f, [LevelSet(f.min, (), full=True, requested_t=f.min)], spacing=0.0)

    ts = level_grid(f, levels)
    built: List[LevelSet] = []
    previous = None
    perturbed = 0
    for t in ts:
        lv = solve_level(norm, domain, f, float(t), previous, value_tol, tie_tol)
        perturbed += int(lv.requested_t is not None and lv.t != lv.requested_t)
        built.append(lv)
        previous = lv
    if perturbed:
        logger.info(f"[CHORD_SOLVER] {perturbed} levels shifted off boundary samples")

    family = LevelSetFamily(domain, f, built)
    crossing = family.check_adjacent_crossings()
    if crossing:
        raise NestingError(f"Chords of adjacent levels cross at {len(crossing)} level pairs, first at t={crossing[0]}")
    logger.info(f"[CHORD_SOLVER] {len(family)} levels, {sum(len(lv.curves) for lv in family.levels)} chords")
    return family


@dataclass
class RegularizationReport:
    eps: List[float] = field(default_factory=list)
    sup_distances: List[float] = field(default_factory=list)
    collapsed: bool = False
    cauchy: bool = True
    monotone_tail: bool = True
    warning: bool = False
    trace_deviation: float = 0.0

    def to_dict(self):
        return asdict(self)


def _sample_points(domain: ConvexDomain, sample_grid: int) -> np.ndarray:
    lo, hi = domain.bbox
    xs = np.linspace(lo[0], hi[0], sample_grid + 2)[1:-1]
    ys = np.linspace(lo[1], hi[1], sample_grid + 2)[1:-1]
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    return pts[domain.contains(pts)]


def solve_regularized(norm: AnisotropyNorm, domain: ConvexDomain, f: BoundaryFunction,
                      eps_schedule: Sequence[float] = DEFAULT_SCHEDULE,
                      levels: Union[int, Sequence[float]] = DEFAULT_LEVELS,
                      cauchy_tol: float = 1e-3, sample_grid: int = 64, value_tol: float = 1e-9,
                      tie_tol: float = 1e-12):
    """
    Solve for phi + eps * l2 along a decreasing schedule and track successive
    sup distances on a point grid. Returns (last family, RegularizationReport).
    """
    if not domain.is_strictly_convex:
        raise HypothesisError(f"Domain '{domain.name}' is not strictly convex; existence by regularization needs it")
    report = RegularizationReport()
    if norm.is_strictly_convex:
        report.collapsed = True
        family = solve_strict(norm, domain, f, levels, value_tol, tie_tol)
        report.trace_deviation = trace_check(family, f)["max_deviation"]
        return family, report

    schedule = sorted((float(e) for e in eps_schedule), reverse=True)
    if not schedule or schedule[-1] <= 0:
        raise ValueError("eps schedule must be a nonempty list of positive numbers")
    points = _sample_points(domain, sample_grid)
    prev_vals = None
    family = None
    for eps in schedule:
        family = solve_strict(regularize(norm, eps), domain, f, levels, value_tol, tie_tol)
        vals = family.evaluate(points)
        report.eps.append(eps)
        if prev_vals is not None:
            report.sup_distances.append(float(np.max(np.abs(vals - prev_vals))))
        prev_vals = vals
        logger.info(f"[REGULARIZE] eps={eps:.4g} done" +
                    (f", sup distance {report.sup_distances[-1]:.3e}" if report.sup_distances else ""))

    d = np.asarray(report.sup_distances)
    report.cauchy = bool(len(d) == 0 or d[-1] < cauchy_tol)
    tail = d[3:] if len(d) > 3 else d
    report.monotone_tail = bool(np.all(np.diff(tail) <= 1e-12))
    report.warning = not report.cauchy
    report.trace_deviation = trace_check(family, f)["max_deviation"]
    if report.warning:
        logger.warning(f"[REGULARIZE] schedule ended without Cauchy behaviour (last distance {d[-1]:.3e} >= {cauchy_tol})")
    return family, report


def evaluate(family: LevelSetFamily, p) -> Union[float, np.ndarray]:
    arr = np.asarray(p, dtype=float)
    vals = family.evaluate(arr)
    return float(vals[0]) if arr.ndim == 1 else vals


def modulus_check(family: LevelSetFamily, domain: ConvexDomain, omega: Modulus, beta_mode: bool = False,
                  pairs: int = 100_000, pool: int = 2000, seed: int = 0) -> Dict:
    """
    Check |u(p) - u(q)| <= omega(c(Omega) |p - q|^e) with e = 1/2, or
    e = 1/(beta + 2) in beta mode, on random interior pairs.
    """
    beta = float(domain.beta or 0.0) if beta_mode else 0.0
    if not domain.has_coefficient(beta):
        domain.uniform_convexity_coefficient(beta)
    c = domain.regularity_constant(beta)
    exponent = 1.0 / (beta + 2.0)
    rng = np.random.default_rng(seed)
    pts = domain.sample_interior(pool, rng)
    vals = family.evaluate(pts)
    i = rng.integers(0, len(pts), size=pairs)
    j = rng.integers(0, len(pts), size=pairs)
    keep = i != j
    i, j = i[keep], j[keep]
    lhs = np.abs(vals[i] - vals[j])
    rhs = np.asarray(omega(c * np.linalg.norm(pts[i] - pts[j], axis=1) ** exponent))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    max_ratio = float(np.max(ratio, initial=0.0))
    holder = omega.holder_exponent()
    report = {
        "c_omega": c,
        "beta": beta,
        "exponent": exponent,
        "pairs": int(len(lhs)),
        "max_ratio": max_ratio,
        "passed": max_ratio <= 1.0 + 1e-3,
        "modulus": omega.to_dict(),
        "solution_holder_exponent": None if holder is None else holder * exponent,
    }
    logger.info(f"[REGULARITY] c(Omega)={c:.4g}, exponent={exponent:.3g}, max ratio={max_ratio:.4f}")
    return report


def trace_check(family: LevelSetFamily, f: BoundaryFunction, samples: int = 512) -> Dict:
    s = np.linspace(0.0, family.domain.perimeter, samples, endpoint=False)
    dev = np.abs(family.trace(s) - f(s))
    return {"max_deviation": float(dev.max()), "mean_deviation": float(dev.mean()), "samples": samples}


def interior_ball_check(family: LevelSetFamily, points: Optional[np.ndarray] = None, n: int = 500,
                        seed: int = 0) -> Dict:
    """
    For points strictly between two consecutive levels, the radius of the
    largest disk around the point avoiding both levels' curves and the boundary.
    """
    if points is None:
        points = family.domain.sample_interior(n, np.random.default_rng(seed))
    member = family.membership(points)
    L = len(family)
    top = np.where(member.any(axis=1), L - 1 - np.argmax(member[:, ::-1], axis=1), -1)
    inner = (top >= 0) & (top < L - 1)
    if not np.any(inner):
        return {"plateau_points": 0, "min_radius": None}
    dist = family._level_distances(points[inner])
    j = top[inner]
    rows = np.arange(len(j))
    wall = family.domain.nearest_boundary(points[inner]).distance
    radius = np.minimum(np.minimum(dist[rows, j], dist[rows, j + 1]), wall)
    return {"plateau_points": int(inner.sum()), "min_radius": float(radius.min())}
