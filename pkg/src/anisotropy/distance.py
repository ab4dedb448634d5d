"""Uniform distance sup_{|nu|=1} |a(nu) - b(nu)| between two norms."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from src.anisotropy.norms import TWO_PI, AnisotropyNorm
from src.utils import get_logger, unit_directions

logger = get_logger(__name__)

DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class SupDistance:
    value: float
    direction: tuple
    error_bound: float
    exact: bool

    def __float__(self):
        return self.value


def sup_distance(a: AnisotropyNorm, b: AnisotropyNorm, samples: int = DEFAULT_SAMPLES) -> SupDistance:
    pa, pb = a.exact_polygon(), b.exact_polygon()
    if pa is not None and pb is not None:
        return _polygon_distance(pa, pb)
    return _sampled_distance(a, b, samples)


def _polygon_distance(pa, pb) -> SupDistance:
    # the difference is <nu, a_k - b_l> on every cone between merged vertex directions
    cuts = np.unique(np.concatenate([pa.breakpoints(), pb.breakpoints(), [0.0, TWO_PI]]))
    best, best_theta = 0.0, 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 1e-15:
            continue
        mid = unit_directions(0.5 * (lo + hi))
        da = pa.dual_vertices[np.argmax(pa.dual_vertices @ mid)]
        db = pb.dual_vertices[np.argmax(pb.dual_vertices @ mid)]
        c = da - db
        candidates = [lo, hi]
        peak = math.atan2(c[1], c[0]) % TWO_PI
        for theta in (peak, (peak + math.pi) % TWO_PI):
            if lo < theta < hi:
                candidates.append(theta)
        vals = np.abs(unit_directions(np.array(candidates)) @ c)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_theta = float(vals[k]), float(candidates[k])
    return SupDistance(best, tuple(unit_directions(best_theta).tolist()), 1e-12, True)


def _sampled_distance(a, b, samples) -> SupDistance:
    # both norms are even, so half the circle suffices
    h = math.pi / samples
    thetas = np.concatenate([np.arange(samples) * h, np.mod(a.breakpoints(), math.pi), np.mod(b.breakpoints(), math.pi)])
    dirs = unit_directions(thetas)
    diff = np.abs(a.evaluate(dirs) - b.evaluate(dirs))
    k = int(np.argmax(diff))
    sampled = float(diff[k])

    def neg_gap(theta):
        u = unit_directions(theta)
        return -abs(a.evaluate(u) - b.evaluate(u))

    res = minimize_scalar(neg_gap, bounds=(thetas[k] - h, thetas[k] + h), method="bounded",
                          options={"xatol": 1e-12})
    value, theta = sampled, float(thetas[k])
    if res.success and -res.fun > sampled:
        value, theta = float(-res.fun), float(res.x)
    lipschitz = a.gamma_upper + b.gamma_upper
    bound = max(0.0, sampled + lipschitz * h / 2.0 - value)
    logger.debug(f"sup_distance sampled={sampled:.3e} refined={value:.3e} bound={bound:.3e}")
    return SupDistance(value, tuple(unit_directions(theta).tolist()), bound, False)
