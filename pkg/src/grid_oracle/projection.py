"""Euclidean projection onto the polar unit ball {w : phi°(w) <= 1}."""
import math
from typing import Optional

import numpy as np

from src.anisotropy import AnisotropyNorm, PNorm, SumNorm
from src.utils import cross2, get_logger

logger = get_logger(__name__)


def project_polygon(z: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Nearest points of a convex ccw polygon to the rows of z."""
    z = np.asarray(z, dtype=float).reshape(-1, 2)
    a = polygon
    e = np.roll(polygon, -1, axis=0) - a
    rel = z[:, None, :] - a[None, :, :]
    inside = np.all(cross2(e[None, :, :], rel) >= 0, axis=1)
    out = z.copy()
    if np.all(inside):
        return out
    zo = rel[~inside]
    e2 = np.einsum("ij,ij->i", e, e)
    t = np.clip(np.einsum("nki,ki->nk", zo, e) / e2[None, :], 0.0, 1.0)
    cand = a[None, :, :] + t[..., None] * e[None, :, :]
    d = np.linalg.norm(z[~inside][:, None, :] - cand, axis=2)
    k = np.argmin(d, axis=1)
    out[~inside] = cand[np.arange(len(k)), k]
    return out


class PolarBallProjector:
    """
    The polar ball of phi is written as C + r * disk: C a polygon (or the
    origin, or the l^inf box for the l^1 norm) and r the total weight of
    Euclidean terms. Projection onto C + r * disk is projection onto C
    followed by moving at most r toward the point.
    """

    def __init__(self, norm: AnisotropyNorm, polygon_vertices: int = 64):
        self.norm = norm
        self.box = False
        self.polygon: Optional[np.ndarray] = None
        self.radius = 0.0
        self.exact = True

        if isinstance(norm, SumNorm):
            rest = [(w, n) for w, n in norm.terms if not (isinstance(n, PNorm) and n.p == 2.0)]
            self.radius = sum(w for w, n in norm.terms if isinstance(n, PNorm) and n.p == 2.0)
            if rest:
                body = rest[0][1] if len(rest) == 1 and rest[0][0] == 1.0 else SumNorm(rest)
                self._set_body(body, polygon_vertices)
        elif isinstance(norm, PNorm) and norm.p == 2.0:
            self.radius = 1.0
        else:
            self._set_body(norm, polygon_vertices)
        logger.debug(f"[ORACLE] polar projection: box={self.box}, "
                     f"polygon={None if self.polygon is None else len(self.polygon)}, radius={self.radius}, exact={self.exact}")

    def _set_body(self, body: AnisotropyNorm, polygon_vertices: int):
        if isinstance(body, PNorm) and body.p == 1.0:
            self.box = True
            return
        poly = body.exact_polygon()
        if poly is None:
            self.exact = False
            poly = body.polygonal_approximation(polygon_vertices)
        self.polygon = poly.polar().vertices

    def __call__(self, z: np.ndarray) -> np.ndarray:
        shape = np.shape(z)
        z = np.asarray(z, dtype=float).reshape(-1, 2)
        if self.box:
            base = np.clip(z, -1.0, 1.0)
        elif self.polygon is not None:
            base = project_polygon(z, self.polygon)
        else:
            base = np.zeros_like(z)
        if self.radius > 0:
            d = z - base
            dn = np.linalg.norm(d, axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                step = np.where(dn > 0, np.minimum(self.radius, dn) / dn, 0.0)
            base = base + step[:, None] * d
        return base.reshape(shape)


def project_polar_ball(norm: AnisotropyNorm, z, polygon_vertices: int = 64) -> np.ndarray:
    return PolarBallProjector(norm, polygon_vertices)(np.asarray(z, dtype=float))


def polar_value(norm: AnisotropyNorm, w) -> np.ndarray:
    """phi°(w) = max over unit directions of <w, xi> / phi(xi), by dense sampling."""
    w = np.asarray(w, dtype=float).reshape(-1, 2)
    angles = np.linspace(0.0, 2.0 * math.pi, 2048, endpoint=False)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    dirs = dirs / norm.evaluate(dirs)[:, None]
    return np.max(w @ dirs.T, axis=1)
