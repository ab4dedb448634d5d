import csv
import json
import math
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.domain import ConvexDomain
from src.utils import get_logger

logger = get_logger(__name__)

SVG_SIZE = 1000
SVG_MARGIN = 50
LOW_COLOR = (33, 102, 172)
HIGH_COLOR = (178, 24, 43)


def _plain(obj: Any) -> Any:
    """numpy scalars and arrays to builtins; NaN and inf to null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return val if math.isfinite(val) else None
    return obj


def _fmt(v: float) -> str:
    return "" if v is None or not math.isfinite(v) else f"{float(v):.12g}"


def _level_color(t: float, lo: float, hi: float) -> str:
    w = 0.5 if hi <= lo else min(max((t - lo) / (hi - lo), 0.0), 1.0)
    rgb = [round(a + w * (b - a)) for a, b in zip(LOW_COLOR, HIGH_COLOR)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


class Exporter:
    @staticmethod
    def save_json(data: Any, path: str) -> str:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_plain(data), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        logger.info(f"[EXPORT] {path}")
        return path

    @staticmethod
    def save_raster_csv(xs: np.ndarray, ys: np.ndarray, values: np.ndarray, path: str,
                        mask: Optional[np.ndarray] = None) -> str:
        """Rows (x, y, u) for every cell that has a finite value (and lies in mask, if given)."""
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        values = np.asarray(values, dtype=float)
        keep = np.isfinite(values) if mask is None else (np.asarray(mask) & np.isfinite(values))
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["x", "y", "u"])
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    if keep[i, j]:
                        writer.writerow([_fmt(x), _fmt(y), _fmt(values[i, j])])
        logger.info(f"[EXPORT] {path}")
        return path

    @staticmethod
    def save_energy_trace(energies: Sequence[float], gaps: Sequence[float], path: str) -> str:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["iteration", "primal_energy", "gap_estimate"])
            for k, e in enumerate(energies):
                g = gaps[k] if k < len(gaps) else float("nan")
                writer.writerow([k + 1, _fmt(e), _fmt(g)])
        logger.info(f"[EXPORT] {path}")
        return path

    @staticmethod
    def save_convergence_table(rows: Sequence[Dict], path: str, columns: Sequence[str] = ("eps", "energy", "bound")) -> str:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(list(columns))
            for row in rows:
                writer.writerow([_fmt(row.get(c, float("nan"))) for c in columns])
        logger.info(f"[EXPORT] {path}")
        return path

    @staticmethod
    def save_level_geometry(levels: List[Dict], path: str) -> str:
        return Exporter.save_json({"levels": levels}, path)

    @staticmethod
    def render_svg(domain: ConvexDomain, layers: Sequence[Dict], path: str,
                   points: Optional[Sequence[Sequence[float]]] = None, title: str = "") -> str:
        """
        The domain boundary plus one polyline per level curve. Each layer is
        {"levels": [{"t": .., "curves": [[[x, y], ...], ...]}, ...], "dashed": bool};
        curves are coloured by t over the range of all layers.
        """
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        lo, hi = domain.bbox
        scale = (SVG_SIZE - 2 * SVG_MARGIN) / float(np.max(hi - lo))
        offset = 0.5 * (SVG_SIZE - scale * (hi - lo))

        def xy(p) -> str:
            x = offset[0] + scale * (p[0] - lo[0])
            y = SVG_SIZE - (offset[1] + scale * (p[1] - lo[1]))
            return f"{x:.2f},{y:.2f}"

        ts = [lv["t"] for layer in layers for lv in layer.get("levels", []) if lv.get("curves")]
        t_lo, t_hi = (min(ts), max(ts)) if ts else (0.0, 1.0)

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
            f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
            f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
        ]
        if title:
            out.append(f'<title>{title}</title>')
        out.append(f'<polygon points="{" ".join(xy(p) for p in domain.vertices)}" '
                   'fill="none" stroke="black" stroke-width="2"/>')
        for layer in layers:
            dash = ' stroke-dasharray="8,5"' if layer.get("dashed") else ""
            width = layer.get("width", 1.2)
            for lv in layer.get("levels", []):
                color = _level_color(lv["t"], t_lo, t_hi)
                for curve in lv.get("curves", []):
                    pts = " ".join(xy(p) for p in curve)
                    out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                               f'stroke-width="{width}"{dash}/>')
        for p in points or []:
            x, y = xy(p).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="5" fill="black"/>')
        out.append("</svg>")
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(out) + "\n")
        logger.info(f"[EXPORT] {path}")
        return path
