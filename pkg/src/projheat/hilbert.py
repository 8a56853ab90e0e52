"""Hilbert metric of a convex domain bounded by a conic or a convex polygon.

Float-only numerics; the domains live in the affine chart z = 1.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .errors import NotNested, PointOutsideDomain
from .projective import Conic, HomPoint

Domain = Union[Conic, Sequence[HomPoint]]


def _affine(p) -> np.ndarray:
    if isinstance(p, HomPoint):
        x, y = p.to_affine()
        return np.array([float(x), float(y)])
    return np.asarray(p, dtype=float)


def _polygon_array(K) -> np.ndarray:
    pts = getattr(K, "vertices", K)
    arr = np.array([_affine(p) for p in pts])
    if len(arr) < 3:
        raise ValueError("a polygonal domain needs at least three vertices")
    # orient counterclockwise
    area = np.sum(arr[:, 0] * np.roll(arr[:, 1], -1) - np.roll(arr[:, 0], -1) * arr[:, 1])
    if area < 0:
        arr = arr[::-1]
    return arr


def _inside_polygon(arr: np.ndarray, p: np.ndarray) -> bool:
    e = np.roll(arr, -1, axis=0) - arr
    w = p - arr
    cr = e[:, 0] * w[:, 1] - e[:, 1] * w[:, 0]
    return bool(np.all(cr > 0))


def _chord_params(K: Domain, b: np.ndarray, c: np.ndarray) -> tuple[float, float]:
    """Parameters t1 < 0 < t2 where the line b + t u meets the boundary, u the unit vector towards c."""
    _check_inside(K, b)
    _check_inside(K, c)
    d = c - b
    v = d / math.hypot(d[0], d[1])
    if isinstance(K, Conic):
        M = K.array()
        B = np.array([b[0], b[1], 1.0])
        V = np.array([v[0], v[1], 0.0])
        qa = V @ M @ V
        qb = 2 * (B @ M @ V)
        qc = B @ M @ B
        disc = qb * qb - 4 * qa * qc
        if disc <= 0 or qa == 0:
            raise PointOutsideDomain("line misses the conic")
        r = math.sqrt(disc)
        # numerically stable roots
        q = -0.5 * (qb + math.copysign(r, qb))
        roots = sorted([q / qa, qc / q])
        return roots[0], roots[1]
    arr = _polygon_array(K)
    ts = []
    n = len(arr)
    for i in range(n):
        p, e = arr[i], arr[(i + 1) % n] - arr[i]
        den = v[0] * e[1] - v[1] * e[0]
        if abs(den) <= 1e-14 * np.linalg.norm(v) * np.linalg.norm(e):
            continue
        w = p - b
        t = (w[0] * e[1] - w[1] * e[0]) / den
        s = (w[0] * v[1] - w[1] * v[0]) / den
        if -1e-12 <= s <= 1 + 1e-12:
            ts.append(t)
    return min(ts), max(ts)


def hilbert_distance(K: Domain, b, c) -> float:
    """``-log [a, b, c, d]`` where a, d are the boundary points on line bc."""
    b = _affine(b)
    c = _affine(c)
    if np.array_equal(b, c):
        _check_inside(K, b)
        return 0.0
    t1, t2 = _chord_params(K, b, c)
    # parameters a = t1, b = 0, c = L, d = t2 along the unit direction
    L = math.hypot(*(c - b))
    return math.log1p(L / -t1) - math.log1p(-L / t2)


def _check_inside(K: Domain, p: np.ndarray) -> None:
    if isinstance(K, Conic):
        M = K.array()
        P = np.array([p[0], p[1], 1.0])
        if np.sign(P @ M @ P) != K.interior_value_sign():
            raise PointOutsideDomain("point is not interior to the conic")
    elif not _inside_polygon(_polygon_array(K), p):
        raise PointOutsideDomain("point is not interior to the polygon")


def _is_inside(K: Domain, p: np.ndarray) -> bool:
    try:
        _check_inside(K, p)
    except PointOutsideDomain:
        return False
    return True


def _ellipse_param(K: Conic):
    """Return a map from angle to boundary point of a real ellipse."""
    M = K.array()
    A = M[:2, :2]
    center = np.linalg.solve(A, -M[:2, 2])
    k = -(center @ M[:2, 2] + M[2, 2])
    w, U = np.linalg.eigh(A / k)
    if np.any(w <= 0):
        raise ValueError("conic is not a real ellipse in the chart z = 1")
    axes = 1.0 / np.sqrt(w)

    def point(theta: float) -> np.ndarray:
        return center + U @ (axes * np.array([math.cos(theta), math.sin(theta)]))

    return point, 2 * math.pi


def _polygon_param(K):
    arr = _polygon_array(K)
    n = len(arr)

    def point(s: float) -> np.ndarray:
        s = s % n
        i = int(math.floor(s))
        f = s - i
        return arr[i] + f * (arr[(i + 1) % n] - arr[i])

    return point, float(n)


def hilbert_diameter_estimate(inner: Domain, outer: Domain, samples: int = 64,
                              refine: bool = True) -> float:
    """Estimated Hilbert diameter of ``inner`` measured in ``outer``.

    Boundary points of ``inner`` are sampled at ``samples`` equally spaced
    parameters; the best pair is then improved by a local pattern search.
    Sample sets for powers of two are nested, so the estimate is monotone in
    ``samples`` along powers of two.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    point, period = _ellipse_param(inner) if isinstance(inner, Conic) else _polygon_param(inner)
    params = [period * k / samples for k in range(samples)]
    pts = [point(t) for t in params]
    for p in pts:
        if not _is_inside(outer, p):
            raise NotNested("inner domain is not strictly inside the outer domain")
    best, arg = 0.0, (0, 0)
    for i in range(samples):
        for j in range(i + 1, samples):
            if np.allclose(pts[i], pts[j]):
                continue
            d = hilbert_distance(outer, pts[i], pts[j])
            if d > best:
                best, arg = d, (i, j)
    if not refine or best == 0.0:
        return best
    s, t = params[arg[0]], params[arg[1]]
    step = period / samples
    while step > 1e-10 * period:
        improved = False
        for ds, dt in ((step, 0), (-step, 0), (0, step), (0, -step)):
            p, q = point(s + ds), point(t + dt)
            if not (_is_inside(outer, p) and _is_inside(outer, q)):
                continue
            d = hilbert_distance(outer, p, q)
            if d > best:
                best, s, t, improved = d, s + ds, t + dt, True
                break
        if not improved:
            step /= 2
    return best
