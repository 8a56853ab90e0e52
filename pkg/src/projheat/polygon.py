"""Polygons in RP^2 and the heat-map construction H_lambda.

Vertex ``k`` of a :class:`Polygon` is the point written ``A_{2k}`` in the
even-label convention; the new vertices produced by :func:`heat_map` carry the
odd labels in between.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import scalar as sc
from .errors import DegenerateFrame, NotGeneric, ValidationError, WrongArity
from .projective import (
    HomPoint,
    ProjTransform,
    collinear,
    det3,
    det_is_zero,
    join,
    meet,
    cross_ratio,
)


class Infinity:
    """The parameter value lambda = infinity (inverse pentagram map)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

ExtendedParameter = Union[sc.Scalar, Infinity]


def is_infinite(lam) -> bool:
    return isinstance(lam, Infinity)


def parse_lambda(text: str, exact: bool = True) -> ExtendedParameter:
    """Parse a decimal, ``p/q``, ``phi``, ``-1/phi`` or ``inf``.

    Decimals containing a point or exponent become floats unless ``exact``;
    ``p/q`` and integers always stay exact.
    """
    s = text.strip().lower()
    if s in ("inf", "+inf", "infinity", "∞"):
        return INF
    if any(ch in s for ch in ".e") and "sqrt5" not in s and not exact:
        try:
            return float(s)
        except ValueError as exc:
            raise ValidationError(f"cannot parse lambda {text!r}") from exc
    try:
        return sc.parse_scalar(s, exact=True)
    except ValueError as exc:
        raise ValidationError(f"cannot parse lambda {text!r}") from exc


@dataclass(frozen=True)
class Polygon:
    """Cyclically ordered vertices (n >= 5) of a polygon in RP^2."""

    vertices: tuple

    def __init__(self, vertices: Iterable):
        verts = tuple(v if isinstance(v, HomPoint) else HomPoint(*v) for v in vertices)
        if len(verts) < 5:
            raise WrongArity(f"polygons need at least 5 vertices, got {len(verts)}")
        if not all(v.is_exact() for v in verts) and any(v.is_exact() for v in verts):
            verts = tuple(v.to_float() for v in verts)
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_array(cls, arr) -> "Polygon":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise ValidationError("expected an (n, 2) or (n, 3) array of vertices")
        return cls(tuple(HomPoint(*row) for row in arr))

    @classmethod
    def regular(cls, n: int = 5, radius: float = 1.0, phase: float = 0.0) -> "Polygon":
        t = phase + 2 * np.pi * np.arange(n) / n
        return cls.from_array(np.column_stack([radius * np.cos(t), radius * np.sin(t)]))

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, k):
        return self.vertices[k % len(self.vertices)]

    def __iter__(self):
        return iter(self.vertices)

    def is_exact(self) -> bool:
        return all(v.is_exact() for v in self.vertices)

    def array(self) -> np.ndarray:
        """Float ``(n, 3)`` array of the normalized homogeneous coordinates."""
        return np.array([v.array() for v in self.vertices])

    def affine_array(self) -> np.ndarray:
        arr = self.array()
        return arr[:, :2] / arr[:, 2:3]

    def to_float(self) -> "Polygon":
        return Polygon(v.to_float() for v in self.vertices)

    def transform(self, T: ProjTransform) -> "Polygon":
        return Polygon(T.apply(v) for v in self.vertices)

    def rotate(self, k: int) -> "Polygon":
        """Relabel so that the new vertex 0 is the old vertex ``k``."""
        n = len(self)
        return Polygon(self.vertices[(i + k) % n] for i in range(n))

    def reversed(self) -> "Polygon":
        return Polygon(self.vertices[::-1])

    def dual(self) -> "Polygon":
        """Polygon whose vertices are the edge lines ``A_{2k} A_{2k+2}`` read as points."""
        n = len(self)
        return Polygon(join(self[k], self[k + 1]).dual() for k in range(n))

    def equals(self, other: "Polygon", tol: float | None = None) -> bool:
        return len(self) == len(other) and all(
            a.equals(b, tol) for a, b in zip(self.vertices, other.vertices)
        )


# -- the heat construction ---------------------------------------------------

def _lam_pair(lam):
    """Homogeneous pair (p, q) with lambda = p / q."""
    if is_infinite(lam):
        return 1, 0
    return lam, 1


def heat_vertex(a0: HomPoint, a2: HomPoint, a4: HomPoint, a6: HomPoint, lam) -> HomPoint:
    """``T^{-1}(lam, 0)`` for the map T taking the window to the square.

    The square is (-1,1), (1,1), (1,-1), (-1,-1); ``lam = INF`` gives
    ``T^{-1}[1:0:0]``. Writing the frame vectors with Cramer weights ``D_i``,
    the answer is ``(q - p) D_1 s_1 - p D_2 s_2 + q D_3 s_3`` for
    ``lam = p/q``.
    """
    s1, s2, s3, s4 = a0.coords, a2.coords, a4.coords, a6.coords
    for i, j, k in itertools.combinations(range(4), 3):
        if det_is_zero((s1, s2, s3, s4)[i], (s1, s2, s3, s4)[j], (s1, s2, s3, s4)[k]):
            raise DegenerateFrame(f"window points {i}, {j}, {k} are collinear")
    d1 = det3(s4, s2, s3)
    d2 = det3(s1, s4, s3)
    d3 = det3(s1, s2, s4)
    p, q = _lam_pair(lam)
    c1, c2, c3 = (q - p) * d1, -p * d2, q * d3
    return HomPoint(tuple(c1 * s1[i] + c2 * s2[i] + c3 * s3[i] for i in range(3)))


def heat_map(P: Polygon, lam) -> Polygon:
    """Apply H_lambda to a polygon.

    Output vertex ``k`` is built from the window of input vertices
    ``k-1, k, k+1, k+2``. For pentagons the output is relabeled so that output
    vertex ``m`` is the one opposite input vertex ``m``, which is the labeling
    under which the moduli formulas hold.
    """
    n = len(P)
    out = []
    for k in range(n):
        try:
            out.append(heat_vertex(P[k - 1], P[k], P[k + 1], P[k + 2], lam))
        except DegenerateFrame as exc:
            raise NotGeneric(f"window {k} is not in general position: {exc}", window=k) from exc
    if n == 5:
        out = out[2:] + out[:2]
    return Polygon(out)


def heat_map_array(V: np.ndarray, lam) -> np.ndarray:
    """Vectorized float version of :func:`heat_map` on an ``(n, 3)`` array.

    Rows are rescaled to unit length. No genericity checks are made; callers
    inspect the result for degeneracy.
    """
    s1 = np.roll(V, 1, axis=0)
    s2 = V
    s3 = np.roll(V, -1, axis=0)
    s4 = np.roll(V, -2, axis=0)

    def det(a, b, c):
        return np.einsum("ij,ij->i", a, np.cross(b, c))

    d1 = det(s4, s2, s3)
    d2 = det(s1, s4, s3)
    d3 = det(s1, s2, s4)
    if is_infinite(lam):
        p, q = 1.0, 0.0
    else:
        p, q = float(lam), 1.0
    B = ((q - p) * d1)[:, None] * s1 - (p * d2)[:, None] * s2 + (q * d3)[:, None] * s3
    if len(V) == 5:
        B = np.roll(B, -2, axis=0)
    norms = np.linalg.norm(B, axis=1, keepdims=True)
    return B / norms


# -- predicates and invariants ------------------------------------------------

def is_convex(P: Polygon) -> bool:
    """Whether the vertices are in convex position, in cyclic order, in some affine chart.

    Lifts ``eps_i v_i`` are sign-adjusted so every ordered triple has the same
    orientation. That happens exactly when the polygon is convex in an affine
    chart that contains it, so no chart has to be chosen.
    """
    n = len(P)
    v = [p.coords for p in P.vertices]
    for k in range(n):
        if collinear(P[k - 1], P[k], P[k + 1]):
            raise NotGeneric(f"vertices {k - 1}, {k}, {k + 1} are collinear", window=k)
    for k in range(2, n):
        if det_is_zero(v[0], v[1], v[k]):
            return False
    # the lift of v0 is fixed; try both lifts of v1 and both orientations
    for e1 in (1, -1):
        for c in (1, -1):
            eps = [1, e1] + [c * e1 * sc.sign(det3(v[0], v[1], v[k])) for k in range(2, n)]
            if all(eps[i] * eps[j] * eps[k] * sc.sign(det3(v[i], v[j], v[k])) == c
                   for i, j, k in itertools.combinations(range(n), 3)):
                return True
    return False


def _flag_window(P: Polygon, j: int) -> tuple:
    n = len(P)
    i = (j // 2) % n
    if j % 2:
        idx = (i - 1, i, i + 1, i + 2, i + 3)
    else:
        idx = (i + 2, i + 1, i, i - 1, i - 2)
    return tuple(P[t] for t in idx)


def flag_invariant(P: Polygon, j: int):
    """The flag invariant ``x_j`` (indices mod 2n)."""
    v1, v2, v3, v4, v5 = _flag_window(P, j)
    try:
        e1 = join(v1, v2)
        p = meet(e1, join(v3, v4))
        q = meet(e1, join(v4, v5))
        return cross_ratio(v1, v2, p, q)
    except Exception as exc:  # any degeneracy of the five-point window
        raise NotGeneric(f"flag {j} is degenerate: {exc}", window=j) from exc


def flag_invariants(P: Polygon) -> tuple:
    """All ``2n`` flag invariants ``x_0 .. x_{2n-1}``."""
    return tuple(flag_invariant(P, j) for j in range(2 * len(P)))


STAR_ORDER = (0, 2, 4, 1, 3)


def star_relabel(P: Polygon) -> Polygon:
    """Reorder a pentagon's vertices as 0, 2, 4, 1, 3."""
    if len(P) != 5:
        raise WrongArity("star relabeling is defined for pentagons only")
    return Polygon(P[k] for k in STAR_ORDER)


# -- the collinearity determinant --------------------------------------------

def b5_coords(x1, x2, lam) -> tuple:
    return (
        lam * x1 * x2 - x1 * x2 - lam * x2 + 1,
        lam * x1 * x2 - x1 * x2 + lam * x2 + 1,
        lam * x1 * x2 - x1 * x2 - lam * x2 - 1,
    )


def b7_coords(x1, x2, x3, x4, lam) -> tuple:
    t = x2 * x3 * x4
    return (
        x1 * x2 - lam * t + t - x2 - lam * x4 - 1,
        x1 * x2 + lam * t - t + x2 - lam * x4 - 1,
        x1 * x2 - lam * t + t - x2 + lam * x4 + 1,
    )


def collinearity_det(x1, x2, x3, x4, lam):
    """``det[B3; B5; B7]`` for three consecutive heat vertices of a hexagon window.

    Here ``B3 = [lam : 0 : 1]`` and B5, B7 are given in closed form in terms of
    four flag invariants of the window. The value equals
    ``lam (bf - ce) + (ae - bd)`` with ``B5 = [a:b:c]``, ``B7 = [d:e:f]``.
    """
    a, b, c = b5_coords(x1, x2, lam)
    d, e, f = b7_coords(x1, x2, x3, x4, lam)
    return lam * (b * f - c * e) + (a * e - b * d)


def fifth_vertex(x, y) -> HomPoint:
    """Fifth vertex of the pentagon with moduli (x, y) whose first four vertices are the square."""
    return HomPoint(x * y - y - 1, x * y + y - 1, x * y - y + 1)


def hexagon_window(x1, x2, x3, x4) -> tuple:
    """Six consecutive vertices A0..A10 with A0..A6 the square.

    (A0..A8) has moduli (x1, x2) and (A2..A10) has moduli (x3, x4).
    """
    from .projective import SQUARE, frame_transform

    a8 = fifth_vertex(x1, x2)
    S = frame_transform((SQUARE[1], SQUARE[2], SQUARE[3], a8), SQUARE)
    a10 = S.inverse().apply(fifth_vertex(x3, x4))
    return (*SQUARE, a8, a10)
