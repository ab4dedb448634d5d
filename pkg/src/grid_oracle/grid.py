"""
Raster functions on a convex domain with Dirichlet cells.

Cells whose centres lie in the domain are interior; every other cell is
pinned to the boundary data at its nearest boundary point.
"""
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial import cKDTree

from src.anisotropy import AnisotropyNorm
from src.domain import BoundaryFunction, ConvexDomain
from src.errors import DomainError
from src.functional import coarea_tv, level_cell_widths
from src.utils import as_points, get_logger, rotate_ccw

logger = get_logger(__name__)

PAD_CELLS = 2
TRACE_NEIGHBOURS = 6


class GridFunction:
    def __init__(self, domain: ConvexDomain, f: Optional[BoundaryFunction], resolution: int = 128,
                 values: Optional[np.ndarray] = None, coarea_levels: int = 101):
        if resolution < 8:
            raise ValueError(f"Grid resolution too small: {resolution}")
        self.domain = domain
        self.f = f
        self.resolution = resolution
        self.coarea_levels = coarea_levels
        lo, hi = domain.bbox
        extent = float(np.max(hi - lo))
        self.h = extent / (resolution - 2 * PAD_CELLS)
        centre = 0.5 * (lo + hi)
        start = centre - 0.5 * resolution * self.h + 0.5 * self.h
        self.xs = start[0] + self.h * np.arange(resolution)
        self.ys = start[1] + self.h * np.arange(resolution)
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        self.centers = np.stack([X.ravel(), Y.ravel()], axis=1)
        self.interior = domain.contains(self.centers, tol=0.0).reshape(resolution, resolution)

        # forward triple (i, j), (i+1, j), (i, j+1) touches the interior
        touch = self.interior.copy()
        touch[:-1, :] |= self.interior[1:, :]
        touch[:, :-1] |= self.interior[:, 1:]
        self.gradient_mask = touch
        near = np.zeros_like(self.interior)
        near[1:, :] |= self.interior[:-1, :]
        near[:-1, :] |= self.interior[1:, :]
        near[:, 1:] |= self.interior[:, :-1]
        near[:, :-1] |= self.interior[:, 1:]
        self.boundary = near & ~self.interior
        self.exterior = ~(self.interior | self.boundary)

        if f is not None:
            pinned = f.at_points(self.centers).reshape(resolution, resolution)
        else:
            pinned = np.zeros((resolution, resolution))
        self.pinned_values = np.where(self.interior, 0.0, pinned)
        if values is None:
            values = pinned.copy()
        values = np.asarray(values, dtype=float)
        if values.shape != (resolution, resolution):
            raise ValueError(f"Raster shape {values.shape} does not match resolution {resolution}")
        self.values = np.where(self.interior, values, pinned) if f is not None else values.copy()
        self._tree = None

    @classmethod
    def from_callable(cls, domain: ConvexDomain, f: Optional[BoundaryFunction], fn: Callable,
                      resolution: int = 128) -> "GridFunction":
        grid = cls(domain, f, resolution)
        vals = np.asarray(fn(grid.centers), dtype=float).reshape(resolution, resolution)
        grid.values = np.where(grid.interior, vals, grid.values if f is not None else vals)
        return grid

    def with_values(self, values: np.ndarray) -> "GridFunction":
        out = GridFunction.__new__(GridFunction)
        out.__dict__.update(self.__dict__)
        out.values = np.where(self.interior, values, self.values)
        return out

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    # --- discrete calculus ---------------------------------------------
    def gradient(self, u: Optional[np.ndarray] = None) -> np.ndarray:
        """Forward differences (2, n, n), zero across the last row/column, masked to the gradient cells."""
        u = self.values if u is None else u
        g = np.zeros((2,) + u.shape)
        g[0, :-1, :] = (u[1:, :] - u[:-1, :]) / self.h
        g[1, :, :-1] = (u[:, 1:] - u[:, :-1]) / self.h
        g *= self.gradient_mask
        return g

    def divergence(self, p: np.ndarray) -> np.ndarray:
        """Negative adjoint of gradient (backward differences)."""
        p = p * self.gradient_mask
        d = np.zeros(p.shape[1:])
        d[:-1, :] += p[0, :-1, :]
        d[1:, :] -= p[0, :-1, :]
        d[:, :-1] += p[1, :, :-1]
        d[:, 1:] -= p[1, :, :-1]
        return d / self.h

    def dirichlet_energy(self, norm: AnisotropyNorm, u: Optional[np.ndarray] = None) -> float:
        """h^2 sum phi(grad u) over the gradient mask, jumps into pinned cells included."""
        g = self.gradient(u)
        vals = norm.evaluate(np.moveaxis(g, 0, -1).reshape(-1, 2))
        return float(self.cell_area * np.sum(vals))

    def interior_tv(self, norm: AnisotropyNorm) -> float:
        """
        h^2 sum over interior cells of phi(one-sided gradient), taking the forward
        difference when the forward cell is interior and the backward one otherwise.
        """
        u, m, h = self.values, self.interior, self.h
        g = np.zeros((2,) + u.shape)
        for axis in (0, 1):
            fwd = np.zeros_like(u)
            bwd = np.zeros_like(u)
            fwd_ok = np.zeros_like(m)
            bwd_ok = np.zeros_like(m)
            sl_lo = [slice(None)] * 2
            sl_hi = [slice(None)] * 2
            sl_lo[axis] = slice(None, -1)
            sl_hi[axis] = slice(1, None)
            lo, hi = tuple(sl_lo), tuple(sl_hi)
            fwd[lo] = (u[hi] - u[lo]) / h
            fwd_ok[lo] = m[hi]
            bwd[hi] = (u[hi] - u[lo]) / h
            bwd_ok[hi] = m[lo]
            g[axis] = np.where(fwd_ok, fwd, np.where(bwd_ok, bwd, 0.0))
        vals = norm.evaluate(np.moveaxis(g, 0, -1).reshape(-1, 2)).reshape(u.shape)
        return float(self.cell_area * np.sum(vals[m]))

    # --- evaluation ----------------------------------------------------
    def evaluate(self, points, check_inside: bool = True) -> np.ndarray:
        pts = as_points(points)
        if check_inside and not np.all(self.domain.contains(pts, tol=1e-9)):
            raise DomainError("Evaluation point outside the closed domain")
        interp = RegularGridInterpolator((self.xs, self.ys), self.values, bounds_error=False, fill_value=None)
        return interp(pts)

    def __call__(self, points):
        return self.evaluate(points)

    def trace(self, s) -> np.ndarray:
        """Boundary values of the interior cells: a least-squares plane through the nearest interior centres."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        b = self.domain.point_at(s)
        if self._tree is None:
            self._tree = cKDTree(self.centers[self.interior.ravel()])
        inner_vals = self.values[self.interior]
        k = min(TRACE_NEIGHBOURS, len(inner_vals))
        _, idx = self._tree.query(b, k=k)
        idx = np.atleast_2d(idx).reshape(len(b), k)
        nb = self._tree.data[idx] - b[:, None, :]
        A = np.concatenate([np.ones(idx.shape + (1,)), nb], axis=2)
        y = inner_vals[idx]
        AtA = np.einsum("nki,nkj->nij", A, A) + 1e-12 * np.eye(3)
        Aty = np.einsum("nki,nk->ni", A, y)
        coef = np.linalg.solve(AtA, Aty[..., None])[..., 0]
        return coef[:, 0]

    # --- coarea interface ---------------------------------------------
    def level_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        vals = self.values[self.interior]
        if len(vals) == 0 or np.ptp(vals) == 0:
            return np.empty(0), np.empty(0)
        ts = np.linspace(vals.min(), vals.max(), self.coarea_levels)
        return ts, level_cell_widths(ts)

    def level_segments(self, t: float) -> np.ndarray:
        """Marching squares on squares with four interior corners; (n, 2, 2) segment array."""
        u, m = self.values, self.interior
        a, b = u[:-1, :-1], u[1:, :-1]
        c, d = u[1:, 1:], u[:-1, 1:]
        full = m[:-1, :-1] & m[1:, :-1] & m[1:, 1:] & m[:-1, 1:]
        x0 = self.xs[:-1][:, None] + np.zeros_like(a)
        y0 = self.ys[:-1][None, :] + np.zeros_like(a)
        h = self.h

        def cross(v1, v2):
            ok = ((v1 - t) * (v2 - t) < 0) & full
            with np.errstate(divide="ignore", invalid="ignore"):
                lam = np.where(ok, (t - v1) / (v2 - v1), 0.0)
            return ok, lam

        ok_b, lb = cross(a, b)   # bottom a -> b
        ok_r, lr = cross(b, c)   # right  b -> c
        ok_t, lt = cross(d, c)   # top    d -> c
        ok_l, ll = cross(a, d)   # left   a -> d
        pts = {
            "B": np.stack([x0 + lb * h, y0], axis=-1),
            "R": np.stack([x0 + h, y0 + lr * h], axis=-1),
            "T": np.stack([x0 + lt * h, y0 + h], axis=-1),
            "L": np.stack([x0, y0 + ll * h], axis=-1),
        }
        oks = {"B": ok_b, "R": ok_r, "T": ok_t, "L": ok_l}
        count = ok_b.astype(int) + ok_r + ok_t + ok_l
        segs = []
        two = count == 2
        for e1, e2 in (("B", "R"), ("B", "T"), ("B", "L"), ("R", "T"), ("R", "L"), ("T", "L")):
            sel = two & oks[e1] & oks[e2]
            if np.any(sel):
                segs.append(np.stack([pts[e1][sel], pts[e2][sel]], axis=1))
        four = count == 4
        if np.any(four):
            centre = 0.25 * (a + b + c + d)
            same = np.sign(centre - t) == np.sign(a - t)
            for (e1, e2), sel in ((("B", "R"), four & same), (("T", "L"), four & same),
                                  (("B", "L"), four & ~same), (("R", "T"), four & ~same)):
                if np.any(sel):
                    segs.append(np.stack([pts[e1][sel], pts[e2][sel]], axis=1))
        return np.concatenate(segs) if segs else np.empty((0, 2, 2))

    def level_length(self, norm: AnisotropyNorm, t: float) -> float:
        segs = self.level_segments(t)
        if len(segs) == 0:
            return 0.0
        return float(np.sum(norm.evaluate(rotate_ccw(segs[:, 1] - segs[:, 0]))))

    def coarea_tv(self, norm: AnisotropyNorm) -> float:
        return coarea_tv(norm, self, check_nesting=False)

    # --- export --------------------------------------------------------
    def interior_points(self) -> np.ndarray:
        return self.centers[self.interior.ravel()]

    def interior_values(self) -> np.ndarray:
        return self.values[self.interior]

    def l1_distance(self, other_values: np.ndarray) -> float:
        diff = np.abs(self.values - other_values)[self.interior]
        return float(self.cell_area * diff.sum())
