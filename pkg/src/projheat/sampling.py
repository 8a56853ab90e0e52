"""Random polygons and moduli points for tests and the acceptance suite."""

from __future__ import annotations

import itertools

import numpy as np

from .polygon import Polygon


def random_convex_polygon(rng: np.random.Generator, n: int = 5) -> Polygon:
    """Points at sorted random angles on a circle, moved by a random affine map."""
    while True:
        t = np.sort(rng.uniform(0, 2 * np.pi, n))
        gaps = np.diff(np.concatenate([t, [t[0] + 2 * np.pi]]))
        if gaps.min() > 0.05:
            break
    pts = np.column_stack([np.cos(t), np.sin(t)])
    A = rng.normal(size=(2, 2))
    while abs(np.linalg.det(A)) < 0.3:
        A = rng.normal(size=(2, 2))
    pts = pts @ A.T + rng.uniform(-1, 1, 2)
    return Polygon.from_array(np.column_stack([pts, np.ones(n)]))


def _well_spread(pts: np.ndarray, margin: float) -> bool:
    h = np.column_stack([pts, np.ones(len(pts))])
    h /= np.linalg.norm(h, axis=1, keepdims=True)
    for i, j, k in itertools.combinations(range(len(h)), 3):
        if abs(np.linalg.det(h[[i, j, k]])) < margin:
            return False
    return True


def random_generic_pentagon(rng: np.random.Generator, margin: float = 1e-2) -> Polygon:
    """Five random points of the square [-1, 1]^2, no three of them nearly collinear.

    The vertices are not required to be in convex position.
    """
    while True:
        pts = rng.uniform(-1, 1, (5, 2))
        if _well_spread(pts, margin):
            return Polygon.from_array(np.column_stack([pts, np.ones(5)]))


def random_convex_moduli(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.uniform(0, 1, (size, 2))
