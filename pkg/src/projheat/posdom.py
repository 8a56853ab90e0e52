"""Positive dominance certificates and the energy-gap polynomials.

A polynomial on the unit box is positive dominant when the sums of its
coefficients over every downward-closed block of exponents are positive.
Subdividing the box and rescaling each piece back to the unit box extends
the test; the surviving leaves form a certificate that can be replayed
from the text file alone.
"""

from __future__ import annotations

import enum
import functools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import scalar as sc
from .errors import CannotCertify, InexactBackend, NotDivisible, ValidationError
from .moduli import P_POLY, Q_POLY, R_POLY
from .polygon import collinearity_det
from .polynomial import MultiPoly, divide_exact, poly_from_callable
from .scalar import PHI


class Variant(enum.IntEnum):
    """Dominance levels ordered by strength; FAIL is below all of them."""

    FAIL = 0
    VWPD = 1
    WPD = 2
    SPD = 3

    @classmethod
    def parse(cls, name) -> "Variant":
        if isinstance(name, Variant):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValidationError(f"unknown dominance variant {name!r}") from None


@dataclass(frozen=True)
class DominanceStatus:
    """Strongest level reached, with the smallest partial sum and where it occurs."""

    level: Variant
    min_sum: object
    min_index: tuple
    total: object

    def satisfies(self, variant) -> bool:
        return self.level >= Variant.parse(variant)

    @property
    def name(self) -> str:
        return "Fail" if self.level == Variant.FAIL else self.level.name


def _require_exact(p: MultiPoly):
    if not p.is_exact():
        raise InexactBackend("positive dominance needs exact coefficients")


def partial_sums(p: MultiPoly) -> np.ndarray:
    """Array ``S[I] = sum of a_J over J <= I`` on the full exponent grid."""
    _require_exact(p)
    shape = tuple(max(d, 0) + 1 for d in p.degrees())
    grid = np.zeros(shape, dtype=object)
    grid[...] = Fraction(0)
    for e, c in p.terms.items():
        grid[e] = grid[e] + c
    for axis in range(p.nvars):
        grid = np.cumsum(grid, axis=axis, dtype=object)
    return grid


def dominance_status(p: MultiPoly, variant=None) -> DominanceStatus:
    """Classify p as SPD, WPD, VWPD or Fail from its downward-closed partial sums.

    ``variant`` is accepted for symmetry with :func:`prove_positive`; the
    returned status always records the strongest level reached.
    """
    _require_exact(p)
    if p.is_zero():
        return DominanceStatus(Variant.FAIL, Fraction(0), (0,) * p.nvars, Fraction(0))
    S = partial_sums(p)
    min_idx, min_val, min_sign = None, None, None
    for idx in np.ndindex(S.shape):
        v = S[idx]
        s = sc.sign(v)
        if min_sign is None or s < min_sign or (s == min_sign and sc.sign(v - min_val) < 0):
            min_idx, min_val, min_sign = idx, v, s
    total = S[tuple(d - 1 for d in S.shape)]
    if min_sign > 0:
        level = Variant.SPD
    elif min_sign == 0 and sc.sign(total) > 0:
        level = Variant.WPD
    elif min_sign == 0:
        level = Variant.VWPD
    else:
        level = Variant.FAIL
    return DominanceStatus(level, min_val, tuple(int(i) for i in min_idx), total)


# -- boxes -----------------------------------------------------------------------

def _exact(v):
    if isinstance(v, float):
        raise InexactBackend("box endpoints must be exact")
    if isinstance(v, int):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class BoxRegion:
    """Product of closed intervals with exact endpoints."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple((_exact(lo), _exact(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if sc.sign(hi - lo) <= 0:
                raise ValidationError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def unit(cls, k: int) -> "BoxRegion":
        return cls(tuple((Fraction(0), Fraction(1)) for _ in range(k)))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def widths(self) -> list:
        return [hi - lo for lo, hi in self.intervals]

    def split_axis(self) -> int:
        """Widest side, lowest index on ties."""
        w = self.widths()
        best = 0
        for i in range(1, len(w)):
            if sc.sign(w[i] - w[best]) > 0:
                best = i
        return best

    def split(self) -> tuple["BoxRegion", "BoxRegion", int]:
        i = self.split_axis()
        lo, hi = self.intervals[i]
        mid = (lo + hi) / 2
        a = list(self.intervals)
        b = list(self.intervals)
        a[i] = (lo, mid)
        b[i] = (mid, hi)
        return BoxRegion(tuple(a)), BoxRegion(tuple(b)), i

    def contains(self, point: Sequence) -> bool:
        return all(sc.sign(x - lo) >= 0 and sc.sign(hi - x) >= 0
                   for x, (lo, hi) in zip(point, self.intervals))

    def center(self) -> tuple:
        return tuple((lo + hi) / 2 for lo, hi in self.intervals)

    def sample(self, rng: random.Random, denominator: int = 1 << 20) -> tuple:
        """Random exact point of the box."""
        pts = []
        for lo, hi in self.intervals:
            t = Fraction(rng.randrange(denominator + 1), denominator)
            pts.append(lo + (hi - lo) * t)
        return tuple(pts)

    def to_text(self) -> str:
        return "x".join(f"[{sc.format_scalar(lo)},{sc.format_scalar(hi)}]" for lo, hi in self.intervals)

    @classmethod
    def from_text(cls, text: str) -> "BoxRegion":
        parts = text.strip().split("x")
        ivs = []
        for part in parts:
            part = part.strip()
            if not (part.startswith("[") and part.endswith("]")):
                raise ValidationError(f"bad interval {part!r}")
            lo, hi = part[1:-1].split(",")
            ivs.append((sc.parse_scalar(lo), sc.parse_scalar(hi)))
        return cls(tuple(ivs))


def rescale_to_box(p: MultiPoly, box: BoxRegion) -> MultiPoly:
    """Pull p back along the orientation-preserving affine map from the unit box onto ``box``."""
    _require_exact(p)
    if box.dim != p.nvars:
        raise ValidationError("box dimension does not match the variable count")
    q = p
    for i, (lo, hi) in enumerate(box.intervals):
        if lo == 0 and hi == 1:
            continue
        q = q.affine_substitute(i, lo, hi - lo)
    return q


def reflect(p: MultiPoly, mask: Sequence[int]) -> MultiPoly:
    """Substitute ``x_i -> 1 - x_i`` for every i with ``mask[i]`` set."""
    q = p
    for i, m in enumerate(mask):
        if m:
            q = q.affine_substitute(i, 1, -1)
    return q


# -- certificates ----------------------------------------------------------------------

@dataclass
class DominanceCertificate:
    """Leaves of a subdivision of ``root`` on which ``reflect(poly, mask)`` is dominant."""

    poly: MultiPoly
    root: BoxRegion
    variant: Variant
    leaves: list            # [(BoxRegion, Variant)]
    depth: int
    mask: tuple = ()

    def __post_init__(self):
        if not self.mask:
            self.mask = (0,) * self.poly.nvars

    @property
    def target(self) -> MultiPoly:
        return reflect(self.poly, self.mask)

    def to_text(self) -> str:
        lines = [
            "posdom-certificate 1",
            f"nvars {self.poly.nvars}",
            f"variant {self.variant.name}",
            "mask " + " ".join(str(int(m)) for m in self.mask),
            f"root {self.root.to_text()}",
            f"depth {self.depth}",
            f"terms {len(self.poly.terms)}",
        ]
        lines.extend(self.poly.to_lines())
        lines.append(f"leaves {len(self.leaves)}")
        for box, status in self.leaves:
            lines.append(f"box={box.to_text()}; status={status.name}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DominanceCertificate":
        lines = [ln.rstrip("\n") for ln in text.splitlines()]
        it = iter(lines)

        def field(name):
            line = next(it)
            key, _, val = line.partition(" ")
            if key != name:
                raise ValidationError(f"expected {name!r}, found {line!r}")
            return val.strip()

        try:
            if next(it).strip() != "posdom-certificate 1":
                raise ValidationError("not a certificate file")
            nvars = int(field("nvars"))
            variant = Variant.parse(field("variant"))
            mask = tuple(int(m) for m in field("mask").split())
            root = BoxRegion.from_text(field("root"))
            depth = int(field("depth"))
            nterms = int(field("terms"))
            poly = MultiPoly.from_lines([next(it) for _ in range(nterms)], nvars)
            nleaves = int(field("leaves"))
            leaves = []
            for _ in range(nleaves):
                line = next(it)
                box_part, status_part = line.split(";")
                if not box_part.startswith("box=") or not status_part.strip().startswith("status="):
                    raise ValidationError(f"bad leaf line {line!r}")
                leaves.append((BoxRegion.from_text(box_part[4:]),
                               Variant.parse(status_part.strip()[7:])))
        except StopIteration:
            raise ValidationError("truncated certificate") from None
        if len(mask) != nvars or root.dim != nvars:
            raise ValidationError("certificate dimensions disagree")
        return cls(poly, root, variant, leaves, depth, mask)

    def replay(self) -> bool:
        """Re-check every leaf from the stored polynomial and the subdivision rule."""
        replay_certificate(self)
        return True


def replay_certificate(cert: DominanceCertificate) -> None:
    """Raise :class:`CannotCertify` unless the certificate checks out.

    Leaves must be exactly the boxes produced by the fixed split rule, and
    each leaf's pullback is recomputed directly from the stored polynomial.
    """
    target = cert.target
    claimed = {box: status for box, status in cert.leaves}
    if len(claimed) != len(cert.leaves):
        raise CannotCertify("duplicate leaf boxes")
    seen = 0
    stack = [(cert.root, 0)]
    max_depth = 0
    while stack:
        box, depth = stack.pop()
        if box in claimed:
            seen += 1
            max_depth = max(max_depth, depth)
            status = claimed[box]
            if status < cert.variant:
                raise CannotCertify(f"leaf {box.to_text()} is below {cert.variant.name}", box=box)
            actual = dominance_status(rescale_to_box(target, box))
            if actual.level < status:
                raise CannotCertify(f"leaf {box.to_text()} is not {status.name}", box=box)
            continue
        if depth >= cert.depth:
            raise CannotCertify(f"box {box.to_text()} is not covered by any leaf", box=box)
        a, b, _ = box.split()
        stack.append((b, depth + 1))
        stack.append((a, depth + 1))
    if seen != len(cert.leaves):
        raise CannotCertify("certificate lists boxes outside the subdivision tree")
    if max_depth != cert.depth:
        raise CannotCertify("recorded depth does not match the leaves")


def prove_positive(p: MultiPoly, root: BoxRegion | None = None, variant="WPD",
                   max_depth: int = 40, max_boxes: int = 200_000,
                   mask: Sequence[int] = ()) -> DominanceCertificate:
    """Divide-and-conquer positivity proof on ``root``.

    Boxes are processed breadth first. A box that is not dominant is halved
    along its widest side. If p is not positive at a box centre the search
    stops at once, since no certificate can exist.
    """
    _require_exact(p)
    variant = Variant.parse(variant)
    if variant == Variant.FAIL:
        raise ValidationError("variant must be SPD, WPD or VWPD")
    root = root or BoxRegion.unit(p.nvars)
    mask = tuple(mask) or (0,) * p.nvars
    target = reflect(p, mask)
    half = Fraction(1, 2)
    queue = [(root, rescale_to_box(target, root), 0)]
    leaves = []
    depth_reached = 0
    processed = 0
    while queue:
        nxt = []
        for box, local, depth in queue:
            processed += 1
            if processed > max_boxes:
                raise CannotCertify(f"box budget {max_boxes} exhausted", box=box)
            status = dominance_status(local)
            if status.level >= variant:
                leaves.append((box, status.level))
                depth_reached = max(depth_reached, depth)
                continue
            value = local.evaluate((half,) * local.nvars)
            if sc.sign(value) < 0 or (variant != Variant.VWPD and sc.sign(value) == 0):
                raise CannotCertify(f"polynomial is not positive at the centre of {box.to_text()}", box=box)
            if depth >= max_depth:
                raise CannotCertify(f"box {box.to_text()} is not {variant.name} at depth {max_depth}", box=box)
            a, b, i = box.split()
            nxt.append((a, local.affine_substitute(i, 0, half), depth + 1))
            nxt.append((b, local.affine_substitute(i, half, half), depth + 1))
        queue = nxt
    leaves.sort(key=lambda lb: _box_key(lb[0]))
    return DominanceCertificate(p, root, variant, leaves, depth_reached, mask)


def _box_key(box: BoxRegion):
    return tuple(float(lo) for lo, _ in box.intervals)


def prove_with_reflections(p: MultiPoly, variant="WPD", max_depth: int = 0) -> DominanceCertificate:
    """Try the 2^k reflections of the unit box in mask order and return the first certificate."""
    k = p.nvars
    last = None
    for bits in range(1 << k):
        mask = tuple((bits >> i) & 1 for i in range(k))
        try:
            return prove_positive(p, variant=variant, max_depth=max_depth, mask=mask)
        except CannotCertify as exc:
            last = exc
    raise CannotCertify(f"no reflection of the unit box certifies: {last}")


# -- helpers on two-variable polynomials ---------------------------------------------------

def blow_up(p: MultiPoly) -> MultiPoly:
    """``q(x, t) = p(x, t x)``."""
    if p.nvars != 2:
        raise ValidationError("blow-up is defined for two variables")
    x, t = MultiPoly.variables(2)
    return p.compose([x, t * x])


def normalize_content(p: MultiPoly) -> MultiPoly:
    """Divide by the positive rational content."""
    c = p.integer_content()
    return p if c == 1 else p.map_coefficients(lambda a: a / c)


_X, _Y = MultiPoly.variables(2)
SIMPLE_FACTORS = {
    "x": _X,
    "y": _Y,
    "1-x": 1 - _X,
    "1-y": 1 - _Y,
    "1-xy": 1 - _X * _Y,
}


def strip_simple_factors(q: MultiPoly) -> tuple[MultiPoly, dict]:
    """Remove every power of x, y, 1-x, 1-y, 1-xy and the rational content."""
    found = {}
    for name, f in SIMPLE_FACTORS.items():
        while True:
            try:
                q2 = divide_exact(q, f)
            except NotDivisible:
                break
            found[name] = found.get(name, 0) + 1
            q = q2
    c = q.integer_content()
    if c != 1:
        found["content"] = c
        q = q.map_coefficients(lambda a: a / c)
    return q, found


# -- the energy gap ------------------------------------------------------------------------

def _swap_xy(p: MultiPoly) -> MultiPoly:
    return p.permute([1, 0] + list(range(2, p.nvars)))


def _to_sympy(p: MultiPoly, gens):
    import sympy

    return sympy.Poly.from_dict({e: sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
                                 for e, c in p.terms.items()}, *gens)


def _from_sympy(poly, nvars: int) -> MultiPoly:
    terms = {}
    for e, c in poly.terms():
        terms[tuple(e)] = Fraction(int(c.p), int(c.q))
    return MultiPoly(terms, nvars)


def _polynomial_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    import sympy

    gens = sympy.symbols(f"v0:{a.nvars}")
    return _from_sympy(sympy.gcd(_to_sympy(a, gens), _to_sympy(b, gens)), a.nvars)


@dataclass(frozen=True)
class EnergyGap:
    """``E(H_lambda(m)) - E(m) = N / D`` as polynomials in (x, y, lambda)."""

    N: MultiPoly
    D: MultiPoly
    common_factor: MultiPoly

    def evaluate(self, x, y, lam):
        """N/D at a point; float inputs are evaluated exactly and rounded once.

        The expanded monomial form cancels badly in float arithmetic, so a
        direct float evaluation would lose about eight digits.
        """
        pt = (x, y, lam)
        if sc.all_exact(pt):
            return self.N(*pt) / self.D(*pt)
        exact = tuple(Fraction(float(v)) for v in pt)
        return float(self.N(*exact) / self.D(*exact))


@functools.lru_cache(maxsize=1)
def energy_gap() -> EnergyGap:
    """Reduced numerator and denominator of the energy gain of one step of H_lambda.

    The raw fraction is formed over a common denominator, then the common
    polynomial factor is cancelled. The factor comes from a gcd computation
    and is confirmed by exact division of both sides.
    """
    P, Q, R = P_POLY, Q_POLY, R_POLY
    Ps, Qs, Rs = _swap_xy(P), _swap_xy(Q), _swap_xy(R)
    x, y, _ = MultiPoly.variables(3)
    num = P * Ps * (Q * Rs - P * R) * (Qs * R - Ps * Rs)
    den = Q * Qs * R * Rs * (Q * Qs - P * Ps)
    e0 = x * y * (1 - x) * (1 - y)
    n_raw = num * (1 - x * y) - e0 * den
    d_raw = den * (1 - x * y)
    g = _polynomial_gcd(n_raw, d_raw)
    N = divide_exact(n_raw, g)
    D = divide_exact(d_raw, g)
    # the gcd already removed shared monomials; fix the rational scale by N's content
    c = N.integer_content()
    N = N.map_coefficients(lambda a: a / c)
    D = D.map_coefficients(lambda a: a / c)
    half = Fraction(1, 2)
    if N(half, half, 1) < 0:
        N, D = -N, -D
    return EnergyGap(N, D, g)


def extract_lambda_coefficients(N: MultiPoly) -> list[MultiPoly]:
    """``N_i`` with ``N = sum_i N_i lambda^(i+1)``; the constant term must vanish."""
    coeffs = N.coefficients_in(2)
    if not coeffs[0].is_zero():
        raise ValidationError("N has a nonzero constant lambda-coefficient")
    return coeffs[1:]


# -- the triangle pipeline -------------------------------------------------------------------

def _triangle_substitutions():
    """Affine pieces of the triangle (0,0), (1/phi,0), (1/phi,1/phi) with the blow-up built in."""
    x, y = MultiPoly.variables(2)
    x = x.to_qsqrt5()
    y = y.to_qsqrt5()
    k = (2 * PHI).inverse()          # 1 / (2 phi)
    inv = PHI.inverse()              # 1 / phi
    return {
        "D1": [x * k, x * y * k],
        "D2": [(1 - x * Fraction(1, 2)) * inv, (1 - x * y * Fraction(1, 2)) * inv],
        "Box": [(1 - x * Fraction(1, 2)) * inv, y * k],
    }


def triangle_pieces(q_plus: MultiPoly) -> dict:
    """The three pulled-back pieces of q on the triangle, before monomial stripping."""
    qq = q_plus.to_qsqrt5()
    return {name: qq.compose(subs) for name, subs in _triangle_substitutions().items()}


@dataclass
class PieceCertificate:
    name: str
    monomial: tuple
    poly: MultiPoly
    certificate: DominanceCertificate


@dataclass
class CertificateBundle:
    """Certificates for the three triangle pieces of one polynomial."""

    stripped: dict
    reduced: MultiPoly
    pieces: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return max((p.certificate.depth for p in self.pieces), default=0)

    def replay(self) -> bool:
        for p in self.pieces:
            p.certificate.replay()
        return True


def triangle_positivity_pipeline(q: MultiPoly, variant="WPD", max_depth: int = 40) -> CertificateBundle:
    """Certify ``q > 0`` on the interior of the triangle (0,0), (1/phi,0), (1/phi,1/phi)."""
    if q.nvars != 2:
        raise ValidationError("the triangle pipeline takes a polynomial in (x, y)")
    _require_exact(q)
    q_plus, stripped = strip_simple_factors(q)
    bundle = CertificateBundle(stripped, q_plus)
    for name, piece in triangle_pieces(q_plus).items():
        reduced, mono = piece.strip_monomial()
        try:
            cert = prove_positive(reduced, variant=variant, max_depth=max_depth)
        except CannotCertify as exc:
            raise CannotCertify(f"piece {name}: {exc}", box=exc.box, piece=name) from None
        bundle.pieces.append(PieceCertificate(name, mono, reduced, cert))
    return bundle


# -- the collinearity determinant ---------------------------------------------------------

def collinearity_parts() -> tuple[MultiPoly, MultiPoly]:
    """``ae - bd`` and ``bf - ce`` as polynomials in (x1, x2, x3, x4, lambda)."""
    from .polygon import b5_coords, b7_coords

    def parts(x1, x2, x3, x4, lam):
        a, b, c = b5_coords(x1, x2, lam)
        d, e, f = b7_coords(x1, x2, x3, x4, lam)
        return a * e - b * d, b * f - c * e

    v = MultiPoly.variables(5)
    return parts(*v)


def collinearity_poly() -> MultiPoly:
    return poly_from_callable(collinearity_det, 5)


@dataclass
class CoefficientCertificate:
    part: str
    power: int
    monomial: tuple
    certificate: DominanceCertificate


def certify_collinearity(max_depth: int = 0, variant="WPD") -> list[CoefficientCertificate]:
    """Certify each lambda-coefficient of ae-bd and bf-ce on (0,1)^4.

    Monomial factors are removed first, since they vanish on a face of the
    box. The rest is certified on some reflection of the unit box, which
    moves the zeros away from the corner the partial sums start from.
    """
    out = []
    for name, part in zip(("ae-bd", "bf-ce"), collinearity_parts()):
        for k, coeff in enumerate(part.coefficients_in(4)):
            if coeff.is_zero():
                continue
            reduced, mono = coeff.strip_monomial()
            reduced = normalize_content(reduced)
            try:
                cert = prove_with_reflections(reduced, variant=variant, max_depth=max_depth)
            except CannotCertify as exc:
                raise CannotCertify(f"{name}, lambda^{k}: {exc}", piece=f"{name}:{k}") from None
            out.append(CoefficientCertificate(name, k, mono, cert))
    return out


# -- soundness spot checks -----------------------------------------------------------------

def spot_check(cert: DominanceCertificate, samples_per_leaf: int = 100, seed: int = 0) -> int:
    """Evaluate the target polynomial at random exact interior points of every leaf.

    Returns the number of samples checked; raises on a counterexample.
    """
    rng = random.Random(seed)
    target = cert.target
    strict = cert.variant != Variant.VWPD
    count = 0
    for box, _ in cert.leaves:
        for _ in range(samples_per_leaf):
            pt = box.sample(rng)
            # open box for WPD: nudge off the faces
            pt = tuple(sc.to_exact(v) for v in pt)
            if strict and any(v == lo or v == hi for v, (lo, hi) in zip(pt, box.intervals)):
                continue
            val = target.evaluate(pt)
            s = sc.sign(val)
            if s < 0 or (strict and s == 0):
                raise CannotCertify(f"counterexample {pt} in leaf {box.to_text()}", box=box)
            count += 1
    return count
