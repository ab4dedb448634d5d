"""Sampled convex shapes."""
import math
from typing import Optional, Sequence

import numpy as np

from src.config import DomainConfig
from src.domain.convex import ConvexDomain
from src.errors import DomainError
from src.utils import unit_directions


def disk(radius: float = 1.0, samples: int = 256, center: Sequence[float] = (0.0, 0.0)) -> ConvexDomain:
    theta = np.arange(samples) * (2.0 * math.pi / samples)
    pts = np.asarray(center, float) + radius * unit_directions(theta)
    return ConvexDomain(pts, name="disk")


def ellipse(semi_axes: Sequence[float] = (2.0, 1.0), samples: int = 256) -> ConvexDomain:
    a, b = semi_axes
    theta = np.arange(samples) * (2.0 * math.pi / samples)
    pts = np.stack([a * np.cos(theta), b * np.sin(theta)], axis=1)
    return ConvexDomain(pts, name="ellipse")


def superellipse(exponent: float = 4.0, samples: int = 256, beta: Optional[float] = None) -> ConvexDomain:
    """
    |x|^p + |y|^p = 1. For p > 2 the curvature vanishes at the axis points and
    the domain is beta-uniformly convex with beta = p - 2.
    """
    if exponent < 2:
        raise DomainError("superellipse exponent must be >= 2")
    theta = np.arange(samples) * (2.0 * math.pi / samples)
    dirs = unit_directions(theta)
    pts = dirs / np.linalg.norm(dirs, ord=exponent, axis=1)[:, None]
    if beta is None:
        beta = exponent - 2.0
    return ConvexDomain(pts, beta=beta, name="superellipse")


def square(half_length: float = 1.0, samples: int = 256) -> ConvexDomain:
    h = half_length
    return ConvexDomain([[h, -h], [h, h], [-h, h], [-h, -h]], name="square", min_samples=samples)


def stadium(radius: float = 1.0, half_length: float = 1.0, samples: int = 256) -> ConvexDomain:
    """Rectangle [-L, L] x [-r, r] capped by two half-disks."""
    cap = samples // 4
    right = np.pi * (np.arange(cap + 1) / cap - 0.5)
    left = right + np.pi
    pts = np.vstack([
        np.stack([half_length + radius * np.cos(right), radius * np.sin(right)], axis=1),
        np.stack([-half_length + radius * np.cos(left), radius * np.sin(left)], axis=1),
    ])
    return ConvexDomain(pts, name="stadium", min_samples=samples)


def polygon(vertices, samples: int = 256) -> ConvexDomain:
    return ConvexDomain(vertices, name="polygon", min_samples=samples)


def lens(incidence: float = math.pi / 16, samples: int = 256) -> ConvexDomain:
    """
    Two circular arcs meeting at the corners +-(1, 1), symmetric about y = x,
    each arc making the angle `incidence` with the diagonal at both corners.
    """
    if not 0.0 < incidence < math.pi / 2:
        raise DomainError("lens incidence must lie in (0, pi/2)")
    half = math.sqrt(2.0)
    offset = half / math.tan(incidence)
    radius = math.hypot(offset, half)
    per_arc = max(samples // 2, 32)
    steps = np.arange(per_arc) / per_arc
    out = []
    for axis in (3 * math.pi / 4, -math.pi / 4):
        center = -offset * unit_directions(axis)
        theta = axis - incidence + 2.0 * incidence * steps
        out.append(center + radius * unit_directions(theta))
    return ConvexDomain(np.vstack(out), name="lens")


def domain_from_config(cfg: DomainConfig) -> ConvexDomain:
    shape = cfg.shape.lower()
    if shape == "disk":
        dom = disk(cfg.radius, cfg.samples)
    elif shape == "ellipse":
        dom = ellipse(cfg.semi_axes, cfg.samples)
    elif shape == "superellipse":
        return superellipse(cfg.exponent, cfg.samples, cfg.beta)
    elif shape == "square":
        dom = square(cfg.half_length, cfg.samples)
    elif shape == "stadium":
        dom = stadium(cfg.radius, cfg.half_length, cfg.samples)
    elif shape == "lens":
        dom = lens(cfg.incidence, cfg.samples)
    elif shape == "polygon":
        if not cfg.boundary:
            raise DomainError("polygon domain needs a 'boundary' vertex list")
        dom = polygon(cfg.boundary, cfg.samples)
    else:
        raise DomainError(f"Unknown domain shape '{cfg.shape}'")
    if cfg.beta is not None:
        dom.beta = cfg.beta
    return dom
