"""The pentagon moduli space: coordinates, Gauss group, H_lambda as a rational map, energy and centers."""

from __future__ import annotations

from dataclasses import dataclass

from . import scalar as sc
from .errors import (
    CenterAtInfinity,
    DegenerateModuli,
    NotGeneric,
    PoleOfE,
    PoleOfG,
    PoleOfScale,
    UndefinedAt,
    WrongArity,
)
from .polygon import Polygon, fifth_vertex, flag_invariant, heat_map, is_infinite
from .polynomial import poly_from_callable
from .projective import BASIS, SQUARE, HomPoint, frame_transform, join, meet
from .scalar import PHI, PHI_INV


@dataclass(frozen=True)
class ModuliPoint:
    """Class of a pentagon, given by two consecutive flag invariants ``(x3, x4)``."""

    x: object
    y: object

    def __iter__(self):
        yield self.x
        yield self.y

    def swap(self) -> "ModuliPoint":
        return ModuliPoint(self.y, self.x)

    def to_float(self) -> "ModuliPoint":
        return ModuliPoint(float(self.x), float(self.y))

    def is_exact(self) -> bool:
        return sc.is_exact(self.x) and sc.is_exact(self.y)

    def distance(self, other) -> float:
        ox, oy = other
        return ((float(self.x) - float(ox)) ** 2 + (float(self.y) - float(oy)) ** 2) ** 0.5

    def close_to(self, other, tol: float) -> bool:
        if self.is_exact() and ModuliPoint(*other).is_exact() and tol == 0:
            return self == ModuliPoint(*other)
        return self.distance(other) <= tol


REGULAR = ModuliPoint(PHI_INV, PHI_INV)
STAR_REGULAR = ModuliPoint(-PHI, -PHI)


# -- coordinates -----------------------------------------------------------

def psi(P: Polygon) -> ModuliPoint:
    """Moduli coordinates ``(x3, x4)`` of a pentagon."""
    if len(P) != 5:
        raise WrongArity("moduli coordinates are defined for pentagons")
    return ModuliPoint(flag_invariant(P, 3), flag_invariant(P, 4))


def pentagon_from_moduli(m) -> Polygon:
    """A pentagon with the given moduli whose first four vertices are the square.

    The fifth vertex is ``[xy - y - 1 : xy + y - 1 : xy - y + 1]``.
    """
    x, y = m
    try:
        P = Polygon((*SQUARE, fifth_vertex(x, y)))
        back = psi(P)
    except (ValueError, NotGeneric) as exc:
        raise DegenerateModuli(f"no generic pentagon has moduli ({x}, {y})") from exc
    m = ModuliPoint(x, y)
    if m.is_exact() and P.is_exact():
        ok = back == m
    else:
        ok = back.distance(m) <= 1e-6 * max(1.0, abs(float(x)), abs(float(y)))
    if not ok:
        raise DegenerateModuli(f"reconstruction is degenerate at ({x}, {y})")
    return P


# -- the Gauss group -------------------------------------------------------

def gauss_step(m) -> ModuliPoint:
    """``G(x, y) = (y, (1 - x) / (1 - xy))``, the relabeling by one vertex."""
    x, y = m
    d = 1 - x * y
    if sc.is_zero(d):
        raise PoleOfG(f"1 - xy vanishes at ({x}, {y})", factor="1 - xy")
    return ModuliPoint(y, (1 - x) / d)


def swap(m) -> ModuliPoint:
    """``R(x, y) = (y, x)``, the orientation reversal."""
    x, y = m
    return ModuliPoint(y, x)


@dataclass(frozen=True)
class GaussGroupElement:
    """Element ``G^rotation R^reflect`` of the dihedral group of order 10."""

    rotation: int = 0
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rotation", self.rotation % 5)
        object.__setattr__(self, "reflect", bool(self.reflect))

    @property
    def index(self) -> int:
        return self.rotation + 5 * self.reflect

    @classmethod
    def from_index(cls, k: int) -> "GaussGroupElement":
        if not 0 <= k < 10:
            raise ValueError("index must be in 0..9")
        return cls(k % 5, k >= 5)

    @classmethod
    def all(cls) -> list["GaussGroupElement"]:
        return [cls.from_index(k) for k in range(10)]

    def __call__(self, m) -> ModuliPoint:
        m = ModuliPoint(*m)
        if self.reflect:
            m = swap(m)
        for _ in range(self.rotation):
            m = gauss_step(m)
        return m

    def __matmul__(self, other: "GaussGroupElement") -> "GaussGroupElement":
        # R G^k = G^{-k} R
        sgn = -1 if self.reflect else 1
        return GaussGroupElement(self.rotation + sgn * other.rotation, self.reflect ^ other.reflect)

    def inverse(self) -> "GaussGroupElement":
        if self.reflect:
            return self
        return GaussGroupElement(-self.rotation, False)


def _same_point(a: ModuliPoint, b: ModuliPoint) -> bool:
    if a.is_exact() and b.is_exact():
        return a == b
    return a.distance(b) <= 1e-12 * max(1.0, abs(float(a.x)), abs(float(a.y)))


def gauss_orbit(m) -> list[ModuliPoint]:
    """Distinct points of the orbit of ``m`` under the Gauss group, in index order."""
    out: list[ModuliPoint] = []
    for g in GaussGroupElement.all():
        p = g(m)
        if not any(_same_point(p, q) for q in out):
            out.append(p)
    return out


def in_fundamental_triangle(m, tol: float = 0.0) -> bool:
    """Membership in the closed triangle with corners (0,0), (1/phi,0), (1/phi,1/phi)."""
    x, y = m
    if sc.is_exact(x) and sc.is_exact(y) and tol == 0:
        return 0 <= y and y <= x and x <= PHI_INV
    xf, yf = float(x), float(y)
    return -tol <= yf and yf <= xf + tol and xf <= float(PHI_INV) + tol


def reduce_to_fundamental(m) -> ModuliPoint:
    """Orbit representative in the fundamental triangle; lexicographic minimum on ties."""
    x, y = m
    if not (0 < float(x) < 1 and 0 < float(y) < 1):
        raise ValueError("reduction is defined on the open unit square")
    exact = ModuliPoint(x, y).is_exact()
    tol = 0.0 if exact else 1e-12
    cands = [p for p in gauss_orbit(m) if in_fundamental_triangle(p, tol)]
    if not cands:
        raise ArithmeticError(f"no orbit point of ({x}, {y}) lies in the fundamental triangle")
    return min(cands, key=lambda p: (p.x, p.y) if exact else (float(p.x), float(p.y)))


# -- H_lambda as a rational map ---------------------------------------------

def _p(x, y, l):
    return (l**3 * (x * y**2 - x * y)
            + l**2 * (-2 * x * y**2 + 3 * x * y + 2 * y**2 - 2 * y - 1)
            + l * (2 * x * y**2 - 3 * y**2 + 3 * y - 2)
            + (y**2 - y))


def _q(x, y, l):
    return (l**3 * (x * y - y)
            + l**2 * (2 * x * y**2 - x * y + 2 * x - y - 2)
            + l * (-x * y**2 + 4 * x * y - x - 2)
            + (y - 1))


def _r(x, y, l):
    return (l**3 * (x**2 * y - x * y - x + 1)
            + l**2 * (2 * x**2 * y**2 - x**2 * y - 3 * x * y - x + 3)
            + l * (-x**2 * y**2 + x**2 * y - 2 * x * y + 2)
            + (-x**2 * y + x))


#: Integer polynomials P, Q, R in (x, y, lambda).
P_POLY = poly_from_callable(_p, 3)
Q_POLY = poly_from_callable(_q, 3)
R_POLY = poly_from_callable(_r, 3)

# leading lambda^3 coefficients, used at lambda = infinity
_TOP = {name: poly.coefficients_in(2)[3] for name, poly in
        (("P", P_POLY), ("Q", Q_POLY), ("R", R_POLY))}
_ALL = {"P": P_POLY, "Q": Q_POLY, "R": R_POLY}


def pqr(name: str, x, y, lam):
    """Evaluate P, Q or R at ``(x, y; lam)``; at infinity, the lambda^3 coefficient."""
    if is_infinite(lam):
        return _TOP[name].evaluate((x, y))
    return _ALL[name].evaluate((x, y, lam))


def _denominator_check(value, label: str, lam, x, y):
    scale = max(1.0, abs(float(x)), abs(float(y))) ** 4
    if not is_infinite(lam):
        scale *= max(1.0, abs(float(lam))) ** 3
    if sc.is_zero(value, scale):
        raise UndefinedAt(f"{label} vanishes at ({x}, {y}; {lam})", factor=label)


def heat_moduli(m, lam) -> ModuliPoint:
    """H_lambda on moduli: ``x' = P(x,y) R(x,y) / (Q(x,y) R(y,x))`` and symmetrically."""
    x, y = m
    pxy, pyx = pqr("P", x, y, lam), pqr("P", y, x, lam)
    qxy, qyx = pqr("Q", x, y, lam), pqr("Q", y, x, lam)
    rxy, ryx = pqr("R", x, y, lam), pqr("R", y, x, lam)
    for v, label in ((qxy, "Q(x,y)"), (qyx, "Q(y,x)"), (rxy, "R(x,y)"), (ryx, "R(y,x)")):
        _denominator_check(v, label, lam, x, y)
    return ModuliPoint(pxy * rxy / (qxy * ryx), pyx * ryx / (qyx * rxy))


def energy(m):
    """``E(x, y) = xy(1 - x)(1 - y) / (1 - xy)``."""
    x, y = m
    d = 1 - x * y
    if sc.is_zero(d):
        raise PoleOfE(f"1 - xy vanishes at ({x}, {y})", factor="1 - xy")
    return x * y * (1 - x) * (1 - y) / d


def derivative_scale(lam):
    """Scalar s with ``dH_lambda(1/phi, 1/phi) = s I``."""
    if is_infinite(lam):
        return 1
    den = (lam + PHI**3) * (lam + PHI_INV)
    if sc.is_zero(den):
        raise PoleOfScale(f"scale has a pole at lambda = {lam}", factor="(lambda + phi^3)(lambda + 1/phi)")
    return (lam - PHI) ** 2 / den


# -- centers ---------------------------------------------------------------

# affine image of the regular pentagon with exact coordinates; its center is the origin
_C1 = PHI_INV / 2          # cos(2 pi / 5)
_C2 = -PHI / 2             # cos(4 pi / 5)
REGULAR_REFERENCE = (
    HomPoint(1, 0, 1),
    HomPoint(_C1, 1, 1),
    HomPoint(_C2, PHI_INV, 1),
    HomPoint(_C2, -PHI_INV, 1),
    HomPoint(_C1, -1, 1),
)
STAR_REFERENCE = tuple(REGULAR_REFERENCE[(2 * j) % 5] for j in range(5))
ORIGIN = HomPoint(0, 0, 1)


def projective_center(Q: Polygon, star: bool = False) -> HomPoint:
    """Image of the origin under the map taking the reference pentagon onto Q.

    Q must be projectively regular (or star-regular with ``star=True``).
    """
    ref = STAR_REFERENCE if star else REGULAR_REFERENCE
    if not Q.is_exact():
        ref = tuple(p.to_float() for p in ref)
    T = frame_transform(ref[:4], tuple(Q.vertices[:4]))
    return T.apply(ORIGIN)


def symmetry_axes_center(Q: Polygon) -> HomPoint:
    """Center of a projectively regular pentagon as the meet of two symmetry axes.

    The axis through vertex j joins meet(j+1 j+2, j-1 j-2) and meet(j+1 j-2, j-1 j+2).
    """
    def axis(j):
        a = meet(join(Q[j + 1], Q[j + 2]), join(Q[j - 1], Q[j - 2]))
        b = meet(join(Q[j + 1], Q[j - 2]), join(Q[j - 1], Q[j + 2]))
        return join(a, b)

    return meet(axis(0), axis(1))


def _collapsed_to(Q: Polygon):
    """The common vertex if all vertices of Q coincide, else None."""
    first = Q[0]
    tol = None if Q.is_exact() else 1e-9
    if all(v.equals(first, tol) for v in Q.vertices[1:]):
        return first
    return None


def center(P: Polygon) -> HomPoint:
    """Center(P): the projective center of H_phi(P)."""
    lam = PHI if P.is_exact() else float(PHI)
    Q = heat_map(P, lam)
    return _collapsed_to(Q) or projective_center(Q)


def star_center(P: Polygon) -> HomPoint:
    """Center*(P): the projective center of the star-regular H_{-1/phi}(P).

    A projectively regular P is sent to a single point, which is then the center.
    """
    lam = -PHI_INV if P.is_exact() else -float(PHI_INV)
    Q = heat_map(P, lam)
    return _collapsed_to(Q) or projective_center(Q, star=True)


def basis_frame_coords(P: Polygon):
    """Map taking the first four vertices to the basis frame, and the fifth vertex's affine coordinates."""
    if len(P) != 5:
        raise WrongArity("basis-frame coordinates are defined for pentagons")
    T = frame_transform(tuple(P.vertices[:4]), BASIS)
    v = T.apply(P[4])
    if v.is_at_infinity():
        raise DegenerateModuli("fifth vertex lies at infinity in the basis frame chart")
    return T, v.to_affine()


def center_map(x, y, homogeneous: bool = False):
    """Closed-form Center for the pentagon with vertices e1, e2, e3, (1,1,1) and (x, y).

    Returns the affine pair ``((phi x + y)/(phi y + 1), (phi x + y)/(phi (phi^2 x - 1)))``,
    or the homogeneous point when ``homogeneous`` is true. A center at
    infinity raises :class:`CenterAtInfinity` carrying the homogeneous point.
    """
    phi = PHI if (sc.is_exact(x) and sc.is_exact(y)) else float(PHI)
    s = phi * x + y
    a = phi * y + 1
    b = phi * (phi * phi * x - 1)
    if sc.is_zero(s) and (sc.is_zero(a) or sc.is_zero(b)):
        raise CenterAtInfinity(f"center of ({x}, {y}) is undetermined", point=None)
    point = HomPoint(s * b, s * a, a * b)
    if homogeneous:
        return point
    if sc.is_zero(a) or sc.is_zero(b):
        raise CenterAtInfinity(f"center of ({x}, {y}) lies at infinity", point=point)
    return (s / a, s / b)


def star_center_map(x, y, homogeneous: bool = False):
    """Center* for the basis-frame pentagon with fifth vertex (x, y), by construction."""
    P = Polygon((*BASIS, HomPoint(x, y, 1)))
    c = star_center(P)
    if homogeneous:
        return c
    if c.is_at_infinity():
        raise CenterAtInfinity(f"star center of ({x}, {y}) lies at infinity", point=c)
    return c.to_affine()


def center_closed_form(P: Polygon) -> HomPoint:
    """Center(P) through the basis-frame normalization and the closed form."""
    T, (x, y) = basis_frame_coords(P)
    return T.inverse().apply(center_map(x, y, homogeneous=True))


def star_center_closed(P: Polygon) -> HomPoint:
    T, (x, y) = basis_frame_coords(P)
    return T.inverse().apply(star_center_map(x, y, homogeneous=True))
