"""Homogeneous points and lines, cross-ratios, frames and conics in RP^2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import scalar as sc
from .errors import (
    CoincidentLines,
    CoincidentPoints,
    DegenerateConic,
    DegenerateFrame,
    DegenerateTuple,
    NotCollinear,
)
from .scalar import QSqrt5


# -- small linear algebra helpers, generic over the scalar backend ----------

def cross(u: Sequence, v: Sequence) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def det3(a: Sequence, b: Sequence, c: Sequence):
    """Determinant of the matrix with rows a, b, c."""
    return dot(a, cross(b, c))


def _norm(u: Sequence) -> float:
    return math.sqrt(sum(float(x) ** 2 for x in u))


def near_zero_vector(u: Sequence, scale: float, eps: float | None = None) -> bool:
    if sc.all_exact(u):
        return all(x == 0 for x in u)
    if eps is None:
        eps = sc.EPS
    return _norm(u) <= eps * scale


def det_is_zero(a: Sequence, b: Sequence, c: Sequence, eps: float | None = None) -> bool:
    """Collinearity test; relative threshold in float mode."""
    d = det3(a, b, c)
    if sc.all_exact((*a, *b, *c)):
        return d == 0
    return sc.is_zero(d, _norm(a) * _norm(b) * _norm(c), eps)


def _coerce_coords(coords: Iterable) -> tuple:
    coords = tuple(coords)
    if len(coords) != 3:
        raise ValueError("homogeneous coordinates need exactly three entries")
    if sc.all_exact(coords):
        return coords
    return tuple(float(c) for c in coords)


def normalize_coords(coords: Sequence) -> tuple:
    """Canonical representative of a homogeneous triple.

    Floats: divide by the largest-magnitude entry. Rational entries: primitive
    integer triple with positive leading nonzero entry. Entries in Q(sqrt 5):
    divide by the first nonzero entry.
    """
    coords = _coerce_coords(coords)
    if sc.all_exact(coords):
        if all(c == 0 for c in coords):
            raise ValueError("all homogeneous coordinates are zero")
        if any(isinstance(c, QSqrt5) and not c.is_rational() for c in coords):
            lead = next(c for c in coords if c != 0)
            return tuple(QSqrt5.coerce(c) / lead for c in coords)
        fr = [Fraction(c.a) if isinstance(c, QSqrt5) else Fraction(c) for c in coords]
        den = math.lcm(*(f.denominator for f in fr))
        ints = [int(f * den) for f in fr]
        g = math.gcd(*ints)
        lead = next(i for i in ints if i != 0)
        if lead < 0:
            g = -g
        return tuple(Fraction(i // g) for i in ints)
    if not all(math.isfinite(c) for c in coords):
        raise ValueError("non-finite homogeneous coordinates")
    k = max(range(3), key=lambda i: abs(coords[i]))
    m = coords[k]
    if m == 0:
        raise ValueError("all homogeneous coordinates are zero")
    return tuple(c / m for c in coords)


@dataclass(frozen=True)
class HomPoint:
    """Point ``[x : y : z]`` of the projective plane, stored normalized."""

    coords: tuple

    def __init__(self, *coords):
        if len(coords) == 1:
            coords = tuple(coords[0])
        if len(coords) == 2:
            coords = (coords[0], coords[1], 1)
        object.__setattr__(self, "coords", normalize_coords(coords))

    @classmethod
    def affine(cls, x, y) -> "HomPoint":
        return cls(x, y, 1)

    def is_exact(self) -> bool:
        return sc.all_exact(self.coords)

    def is_at_infinity(self, eps: float | None = None) -> bool:
        z = self.coords[2]
        return sc.is_zero(z, _norm(self.coords), eps)

    def to_affine(self) -> tuple:
        x, y, z = self.coords
        if self.is_at_infinity():
            raise ValueError("point at infinity has no affine lift")
        return (x / z, y / z)

    def to_float(self) -> "HomPoint":
        return HomPoint(tuple(float(c) for c in self.coords))

    def array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])

    def dual(self) -> "HomLine":
        return HomLine(self.coords)

    def equals(self, other: "HomPoint", tol: float | None = None) -> bool:
        """Equality up to scale (exact, or relative ``tol`` in float mode)."""
        return _proportional(self.coords, other.coords, tol)

    def incident(self, line: "HomLine", tol: float | None = None) -> bool:
        v = dot(self.coords, line.coeffs)
        if sc.all_exact((*self.coords, *line.coeffs)):
            return v == 0
        return sc.is_zero(v, _norm(self.coords) * _norm(line.coeffs), tol)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __repr__(self):
        return "HomPoint[" + " : ".join(sc.format_scalar(c) for c in self.coords) + "]"


@dataclass(frozen=True)
class HomLine:
    """Line ``a x + b y + c z = 0``, stored normalized."""

    coeffs: tuple

    def __init__(self, *coeffs):
        if len(coeffs) == 1:
            coeffs = tuple(coeffs[0])
        object.__setattr__(self, "coeffs", normalize_coords(coeffs))

    def dual(self) -> HomPoint:
        return HomPoint(self.coeffs)

    def equals(self, other: "HomLine", tol: float | None = None) -> bool:
        return _proportional(self.coeffs, other.coeffs, tol)

    def contains(self, p: HomPoint, tol: float | None = None) -> bool:
        return p.incident(self, tol)

    def array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __repr__(self):
        return "HomLine[" + " : ".join(sc.format_scalar(c) for c in self.coeffs) + "]"


def _proportional(u: Sequence, v: Sequence, tol: float | None) -> bool:
    c = cross(u, v)
    if sc.all_exact((*u, *v)):
        return all(x == 0 for x in c)
    if tol is None:
        tol = sc.EPS
    return _norm(c) <= tol * _norm(u) * _norm(v)


def join(p: HomPoint, q: HomPoint) -> HomLine:
    """The line through two distinct points."""
    c = cross(p.coords, q.coords)
    if near_zero_vector(c, _norm(p.coords) * _norm(q.coords)):
        raise CoincidentPoints(f"{p} and {q} coincide")
    return HomLine(c)


def meet(l: HomLine, m: HomLine) -> HomPoint:
    """The intersection point of two distinct lines."""
    c = cross(l.coeffs, m.coeffs)
    if near_zero_vector(c, _norm(l.coeffs) * _norm(m.coeffs)):
        raise CoincidentLines(f"{l} and {m} coincide")
    return HomPoint(c)


def collinear(a: HomPoint, b: HomPoint, c: HomPoint, eps: float | None = None) -> bool:
    return det_is_zero(a.coords, b.coords, c.coords, eps)


def cross_ratio(a: HomPoint, b: HomPoint, c: HomPoint, d: HomPoint):
    """``(a-b)(c-d) / ((a-c)(b-d))`` for four collinear points.

    Differences of affine parameters are replaced by determinants against an
    auxiliary point off the line, which gives the same value in any chart.
    """
    pts = [a.coords, b.coords, c.coords, d.coords]
    # pick the most separated pair to span the line
    best, pair = -1.0, (0, 1)
    for i in range(4):
        for j in range(i + 1, 4):
            n = _norm(cross(pts[i], pts[j])) / (_norm(pts[i]) * _norm(pts[j]))
            if n > best:
                best, pair = n, (i, j)
    if best == 0 or (not sc.all_exact(sum(pts, ())) and best <= sc.EPS):
        raise DegenerateTuple("all four points coincide")
    p, q = pts[pair[0]], pts[pair[1]]
    for k in range(4):
        if k not in pair and not det_is_zero(p, q, pts[k]):
            raise NotCollinear("points do not lie on a common line")
    line = cross(p, q)
    k = max(range(3), key=lambda i: sc.magnitude(line[i]))
    o = tuple(1 if i == k else 0 for i in range(3))

    def br(u, v):
        return det3(o, u, v)

    num = br(pts[0], pts[1]) * br(pts[2], pts[3])
    den = br(pts[0], pts[2]) * br(pts[1], pts[3])
    if sc.is_zero(den, _scale_of(o, pts)):
        raise DegenerateTuple("cross-ratio denominator vanishes")
    return num / den


def _scale_of(o, pts) -> float:
    n = [_norm(p) for p in pts]
    return n[0] * n[1] * n[2] * n[3]


# -- projective transformations --------------------------------------------

def _mat(rows) -> tuple:
    rows = tuple(tuple(r) for r in rows)
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ValueError("expected a 3x3 matrix")
    flat = sum(rows, ())
    if not sc.all_exact(flat):
        rows = tuple(tuple(float(x) for x in r) for r in rows)
    return rows


def mat_mul(A, B) -> tuple:
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(1, 3)), A[i][0] * B[0][j]) for j in range(3))
        for i in range(3)
    )


def mat_vec(A, v) -> tuple:
    return tuple(A[i][0] * v[0] + A[i][1] * v[1] + A[i][2] * v[2] for i in range(3))


def transpose(A) -> tuple:
    return tuple(tuple(A[j][i] for j in range(3)) for i in range(3))


def mat_det(A):
    return det3(A[0], A[1], A[2])


def adjugate(A) -> tuple:
    """Adjugate matrix; ``A @ adj(A) = det(A) I``."""
    cols = transpose(A)
    # rows of the adjugate are cross products of pairs of columns
    return (
        cross(cols[1], cols[2]),
        cross(cols[2], cols[0]),
        cross(cols[0], cols[1]),
    )


def _normalize_matrix(A) -> tuple:
    flat = sum(A, ())
    if sc.all_exact(flat):
        lead = next((x for x in flat if x != 0), None)
        if lead is None:
            return A
        if any(isinstance(x, QSqrt5) and not x.is_rational() for x in flat):
            return tuple(tuple(QSqrt5.coerce(x) / lead for x in r) for r in A)
        lead = Fraction(lead.a) if isinstance(lead, QSqrt5) else Fraction(lead)
        return tuple(tuple(Fraction(x.a if isinstance(x, QSqrt5) else x) / lead for x in r) for r in A)
    m = max(abs(x) for x in flat)
    return tuple(tuple(x / m for x in r) for r in A)


@dataclass(frozen=True)
class ProjTransform:
    """Invertible 3x3 matrix acting on homogeneous coordinates, modulo scale."""

    matrix: tuple

    def __init__(self, matrix):
        if isinstance(matrix, np.ndarray):
            matrix = matrix.tolist()
        A = _mat(matrix)
        d = mat_det(A)
        flat = sum(A, ())
        if sc.all_exact(flat):
            if d == 0:
                raise DegenerateFrame("singular transformation")
        else:
            scale = max(abs(x) for x in flat) ** 3
            if not abs(d) > sc.EPS * scale:
                raise DegenerateFrame("singular transformation")
        object.__setattr__(self, "matrix", _normalize_matrix(A))

    @classmethod
    def identity(cls) -> "ProjTransform":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def __call__(self, obj):
        return self.apply(obj)

    def apply(self, obj):
        if isinstance(obj, HomPoint):
            return HomPoint(mat_vec(self.matrix, obj.coords))
        if isinstance(obj, HomLine):
            # lines transform by the inverse transpose
            return HomLine(mat_vec(transpose(adjugate(self.matrix)), obj.coeffs))
        if isinstance(obj, Conic):
            adj = adjugate(self.matrix)
            M = mat_mul(transpose(adj), mat_mul(obj.matrix, adj))
            return Conic(M)
        if hasattr(obj, "transform"):
            return obj.transform(self)
        raise TypeError(f"cannot transform {type(obj).__name__}")

    def __matmul__(self, other: "ProjTransform") -> "ProjTransform":
        return ProjTransform(mat_mul(self.matrix, other.matrix))

    def inverse(self) -> "ProjTransform":
        return ProjTransform(adjugate(self.matrix))

    def array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.matrix])

    def to_float(self) -> "ProjTransform":
        return ProjTransform(self.array())

    def equals(self, other: "ProjTransform", tol: float | None = None) -> bool:
        """Equality modulo a nonzero scale."""
        a = sum(self.matrix, ())
        b = sum(other.matrix, ())
        if sc.all_exact(a + b):
            k = next(i for i in range(9) if a[i] != 0)
            if b[k] == 0:
                return False
            r = a[k] / b[k]
            return all(a[i] == r * b[i] for i in range(9))
        if tol is None:
            tol = 1e-9
        A = np.array([float(x) for x in a])
        B = np.array([float(x) for x in b])
        A /= np.linalg.norm(A)
        B /= np.linalg.norm(B)
        return min(np.linalg.norm(A - B), np.linalg.norm(A + B)) <= tol


def _frame_matrix(pts: Sequence[HomPoint]) -> tuple:
    """Matrix sending the standard frame e1, e2, e3, (1,1,1) to ``pts``."""
    if len(pts) != 4:
        raise ValueError("a projective frame has four points")
    s = [p.coords for p in pts]
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                if det_is_zero(s[i], s[j], s[k]):
                    raise DegenerateFrame(f"points {i}, {j}, {k} of the frame are collinear")
    # Cramer's rule for s4 = sum mu_i s_i, scaled by det(s1, s2, s3)
    mu = (det3(s[3], s[1], s[2]), det3(s[0], s[3], s[2]), det3(s[0], s[1], s[3]))
    return transpose(tuple(tuple(mu[i] * x for x in s[i]) for i in range(3)))


def frame_transform(src: Sequence[HomPoint], dst: Sequence[HomPoint]) -> ProjTransform:
    """The unique projective map with ``T(src[i]) = dst[i]`` for i = 0..3."""
    Fs = _frame_matrix(src)
    Fd = _frame_matrix(dst)
    return ProjTransform(mat_mul(Fd, adjugate(Fs)))


#: The square frame (-1,1), (1,1), (1,-1), (-1,-1).
SQUARE = (
    HomPoint(-1, 1, 1),
    HomPoint(1, 1, 1),
    HomPoint(1, -1, 1),
    HomPoint(-1, -1, 1),
)

#: The basis frame [1:0:0], [0:1:0], [0:0:1], [1:1:1].
BASIS = (
    HomPoint(1, 0, 0),
    HomPoint(0, 1, 0),
    HomPoint(0, 0, 1),
    HomPoint(1, 1, 1),
)


# -- conics --------------------------------------------------------------------

@dataclass(frozen=True)
class Conic:
    """Conic ``v^T M v = 0`` with symmetric M, modulo scale."""

    matrix: tuple

    def __init__(self, matrix):
        if isinstance(matrix, np.ndarray):
            matrix = matrix.tolist()
        A = _mat(matrix)
        for i in range(3):
            for j in range(i):
                if A[i][j] != A[j][i]:
                    if sc.all_exact(sum(A, ())):
                        raise ValueError("conic matrix must be symmetric")
                    avg = (A[i][j] + A[j][i]) / 2
                    A = tuple(
                        tuple(avg if (r, c) in ((i, j), (j, i)) else A[r][c] for c in range(3))
                        for r in range(3)
                    )
        object.__setattr__(self, "matrix", _normalize_matrix(A))

    @classmethod
    def unit_circle(cls) -> "Conic":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, -1)))

    @classmethod
    def circle(cls, cx, cy, r) -> "Conic":
        return cls(((1, 0, -cx), (0, 1, -cy), (-cx, -cy, cx * cx + cy * cy - r * r)))

    def value(self, p: HomPoint):
        return dot(p.coords, mat_vec(self.matrix, p.coords))

    def contains(self, p: HomPoint, tol: float | None = None) -> bool:
        v = self.value(p)
        if sc.all_exact((*p.coords, *sum(self.matrix, ()))):
            return v == 0
        scale = max(abs(float(x)) for x in sum(self.matrix, ())) * _norm(p.coords) ** 2
        return sc.is_zero(v, scale, tol)

    def det(self):
        return mat_det(self.matrix)

    def classify(self) -> str:
        """``ellipse``, ``parabola``, ``hyperbola`` (in the chart z = 1) or ``empty``/``degenerate``."""
        M = self.matrix
        d = self.det()
        scale = max(abs(float(x)) for x in sum(M, ())) ** 3
        if sc.is_zero(d, scale):
            return "degenerate"
        a, b, c = M[0][0], M[0][1], M[1][1]
        disc = a * c - b * b
        if sc.is_zero(disc, max(abs(float(a)), abs(float(b)), abs(float(c))) ** 2):
            return "parabola"
        if sc.sign(disc) < 0:
            return "hyperbola"
        # real ellipse iff the determinant has sign opposite to a
        if sc.sign(d) * sc.sign(a) < 0:
            return "ellipse"
        return "empty"

    def array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.matrix])

    def equals(self, other: "Conic", tol: float | None = None) -> bool:
        return ProjTransform.equals(self, other, tol)  # same modulo-scale comparison

    def interior_value_sign(self) -> int:
        """Sign of ``v^T M v`` for points inside a real ellipse (chart z = 1)."""
        # the center of an ellipse is interior
        M = self.array()
        center = np.linalg.solve(M[:2, :2], -M[:2, 2])
        v = np.array([center[0], center[1], 1.0])
        return int(np.sign(v @ M @ v))


def _veronese(p: Sequence) -> list:
    x, y, z = p
    return [x * x, 2 * x * y, y * y, 2 * x * z, 2 * y * z, z * z]


def _exact_nullspace(rows: list[list]) -> list[list]:
    """Basis of the right nullspace by Gauss-Jordan elimination (exact)."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        basis.append(v)
    return basis


def conic_through_five(pts: Sequence[HomPoint]) -> Conic:
    """The unique conic through five points, no four of them collinear."""
    if len(pts) != 5:
        raise ValueError("need exactly five points")
    coords = [p.coords for p in pts]
    exact = sc.all_exact(sum(coords, ()))
    if exact:
        basis = _exact_nullspace([_veronese(p) for p in coords])
        if len(basis) != 1:
            raise DegenerateConic("five points do not determine a unique conic")
        v = basis[0]
    else:
        A = np.array([_veronese([float(c) for c in p]) for p in coords])
        A /= np.linalg.norm(A, axis=1, keepdims=True)
        _, s, vt = np.linalg.svd(A)
        if s[-1] <= sc.EPS * s[0]:
            raise DegenerateConic("five points do not determine a unique conic")
        v = list(vt[-1])
    a, b, c, d, e, f = v
    conic = Conic(((a, b, d), (b, c, e), (d, e, f)))
    if conic.classify() == "degenerate":
        raise DegenerateConic("conic through the points is degenerate (three are collinear)")
    return conic
