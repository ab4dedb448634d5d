"""Continuous Dirichlet data on the boundary of a convex domain, with moduli of continuity."""
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from src.config import BoundaryDataConfig
from src.domain.convex import ConvexDomain
from src.errors import DomainError
from src.utils import as_points, get_logger

logger = get_logger(__name__)


class Modulus(ABC):
    @abstractmethod
    def __call__(self, d):
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def holder_exponent(self) -> Optional[float]:
        return None


class LipschitzModulus(Modulus):
    def __init__(self, constant: float):
        self.constant = float(constant)

    def __call__(self, d):
        return self.constant * np.asarray(d, dtype=float)

    def holder_exponent(self):
        return 1.0

    def to_dict(self):
        return {"kind": "lipschitz", "L": self.constant}


class HoelderModulus(Modulus):
    def __init__(self, constant: float, alpha: float):
        if not 0.0 < alpha <= 1.0:
            raise DomainError(f"Hoelder exponent must lie in (0, 1], got {alpha}")
        self.constant = float(constant)
        self.alpha = float(alpha)

    def __call__(self, d):
        return self.constant * np.abs(np.asarray(d, dtype=float)) ** self.alpha

    def holder_exponent(self):
        return self.alpha

    def to_dict(self):
        return {"kind": "hoelder", "C": self.constant, "alpha": self.alpha}


class TabulatedModulus(Modulus):
    """Piecewise-linear nondecreasing modulus through (0, 0) and the given knots."""

    def __init__(self, distances: Sequence[float], values: Sequence[float]):
        d = np.concatenate([[0.0], np.asarray(distances, float)])
        v = np.concatenate([[0.0], np.maximum.accumulate(np.asarray(values, float))])
        order = np.argsort(d, kind="stable")
        self.distances, self.values = d[order], v[order]

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        slope = self.values[-1] / self.distances[-1] if self.distances[-1] > 0 else 0.0
        inside = np.interp(d, self.distances, self.values)
        beyond = self.values[-1] + slope * (d - self.distances[-1])
        return np.where(d > self.distances[-1], beyond, inside)

    def to_dict(self):
        return {"kind": "tabulated", "distances": self.distances.tolist(), "values": self.values.tolist()}


class BoundaryFunction:
    """
    Samples f_i at the domain's boundary vertices (arc lengths s_i), extended
    linearly in arc length and periodically.
    """

    def __init__(self, domain: ConvexDomain, values, modulus: Optional[Modulus] = None, name: str = "custom"):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(domain),):
            raise DomainError(f"Expected {len(domain)} boundary values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("Boundary values must be finite")
        self.domain = domain
        self.values = values
        self.name = name
        self.modulus = modulus if modulus is not None else LipschitzModulus(estimate_lipschitz(domain, values))
        self._knots = np.append(domain.arclength, domain.perimeter)
        self._closed = np.append(values, values[0])

    @property
    def arclength(self) -> np.ndarray:
        return self.domain.arclength

    @property
    def samples(self):
        return list(zip(self.domain.arclength.tolist(), self.values.tolist()))

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def oscillation(self) -> float:
        return self.max - self.min

    def __call__(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.domain.perimeter)
        return np.interp(s, self._knots, self._closed)

    def at_points(self, points) -> np.ndarray:
        """Values at the boundary points nearest to the given points."""
        proj = self.domain.nearest_boundary(as_points(points))
        return self(proj.arclength)

    def modulus_violation(self) -> float:
        """Max over sample pairs of |f_i - f_j| / omega(|x_i - x_j|); <= 1 when the modulus is valid."""
        v = self.domain.vertices
        dist = pdist(v)
        diff = pdist(self.values[:, None])
        bound = np.asarray(self.modulus(dist))
        mask = bound > 0
        if not np.any(mask):
            return 0.0 if np.max(diff, initial=0.0) == 0 else math.inf
        ratio = diff[mask] / bound[mask]
        if np.any(diff[~mask] > 0):
            return math.inf
        return float(np.max(ratio, initial=0.0))

    def to_dict(self):
        return {"name": self.name, "samples": [[s, f] for s, f in self.samples], "modulus": self.modulus.to_dict()}


def estimate_lipschitz(domain: ConvexDomain, values: np.ndarray, max_pairs: int = 1_000_000,
                       rng: Optional[np.random.Generator] = None) -> float:
    """Largest difference quotient over sample pairs (all pairs when affordable)."""
    v = domain.vertices
    n = len(v)
    if n * (n - 1) // 2 <= max_pairs:
        d = pdist(v)
        diff = pdist(np.asarray(values, float)[:, None])
    else:
        rng = rng or np.random.default_rng(0)
        i = rng.integers(0, n, size=max_pairs)
        j = rng.integers(0, n, size=max_pairs)
        keep = i != j
        i, j = i[keep], j[keep]
        d = np.linalg.norm(v[i] - v[j], axis=1)
        diff = np.abs(values[i] - values[j])
    return float(np.max(diff / np.maximum(d, 1e-300), initial=0.0))


def tabulated_modulus(domain: ConvexDomain, values, bins: int = 64) -> TabulatedModulus:
    """Empirical modulus: running max of |f_i - f_j| over chord-distance bins."""
    d = pdist(domain.vertices)
    diff = pdist(np.asarray(values, float)[:, None])
    edges = np.linspace(0.0, d.max(), bins + 1)
    idx = np.clip(np.searchsorted(edges, d, side="right") - 1, 0, bins - 1)
    peak = np.zeros(bins)
    np.maximum.at(peak, idx, diff)
    return TabulatedModulus(edges[1:], np.maximum.accumulate(peak))


# --- data generators ----------------------------------------------------

def cos_data(domain: ConvexDomain) -> BoundaryFunction:
    """cos of the polar angle about the centroid; equals x on the unit disk."""
    rel = domain.vertices - domain.centroid
    values = rel[:, 0] / np.linalg.norm(rel, axis=1)
    return BoundaryFunction(domain, values, name="cos")


def linear_data(domain: ConvexDomain, direction: Sequence[float] = (1.0, 0.0)) -> BoundaryFunction:
    nu = np.asarray(direction, dtype=float)
    values = domain.vertices @ nu
    return BoundaryFunction(domain, values, LipschitzModulus(float(np.linalg.norm(nu))), name="linear")


def two_bump_data(domain: ConvexDomain, heights: Sequence[float] = (1.0, 0.6)) -> BoundaryFunction:
    """cos^2 bumps of the given heights centred at polar angles 0 and pi; zero at +-pi/2."""
    rel = domain.vertices - domain.centroid
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    c = np.cos(theta)
    values = np.where(c >= 0, heights[0], heights[1]) * c ** 2
    return BoundaryFunction(domain, values, name="two_bump")


def cap_data(domain: ConvexDomain, center_angle: float = 0.0, width: float = 0.5,
             height: float = 1.0) -> BoundaryFunction:
    """A cos^2 cap of the given angular half-width around one boundary point; zero elsewhere."""
    rel = domain.vertices - domain.centroid
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    dist = np.abs(np.angle(np.exp(1j * (theta - center_angle))))
    values = np.where(dist < width, height * np.cos(0.5 * math.pi * dist / width) ** 2, 0.0)
    return BoundaryFunction(domain, values, name="cap")


def constant_data(domain: ConvexDomain, value: float = 0.0) -> BoundaryFunction:
    return BoundaryFunction(domain, np.full(len(domain), float(value)), LipschitzModulus(0.0), name="constant")


def boundary_data_from_config(domain: ConvexDomain, cfg: BoundaryDataConfig) -> BoundaryFunction:
    kind = cfg.kind.lower()
    if kind == "cos":
        return cos_data(domain)
    if kind == "linear":
        return linear_data(domain, cfg.direction)
    if kind == "two_bump":
        return two_bump_data(domain, cfg.heights)
    if kind == "cap":
        return cap_data(domain, width=cfg.cap_width, height=cfg.cap_height)
    if kind == "constant":
        return constant_data(domain, cfg.value)
    raise DomainError(f"Unknown boundary data kind '{cfg.kind}'")
