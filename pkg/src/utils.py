import logging
import sys
from typing import Union

import numpy as np


def setup_logging(level: Union[int, str] = logging.INFO):
    """
    Configure logging for the application.
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s",
        datefmt="%H:%M:%S",
        handlers=[
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )


def get_logger(name: str):
    return logging.getLogger(name)


def as_points(points) -> np.ndarray:
    """Coerce a point or a list of points to a float array of shape (n, 2)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"Expected planar points, got array of shape {arr.shape}")
    return arr


def rotate_ccw(vectors: np.ndarray) -> np.ndarray:
    """Rotate vectors by +pi/2: (x, y) -> (-y, x)."""
    v = np.asarray(vectors, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def rotate_cw(vectors: np.ndarray) -> np.ndarray:
    """Rotate vectors by -pi/2: (x, y) -> (y, -x)."""
    v = np.asarray(vectors, dtype=float)
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def unit_directions(angles) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def wrap_angle(theta):
    """Map angles to [0, 2*pi)."""
    return np.mod(theta, 2.0 * np.pi)


def cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
