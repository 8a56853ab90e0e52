"""Sparse multivariate polynomials with exact or float coefficients."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import scalar as sc
from .errors import NotDivisible, ValidationError
from .scalar import QSqrt5


def _div(a, b):
    """Division that keeps int / int exact."""
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def _add_exp(a: tuple, b: tuple) -> tuple:
    return tuple(i + j for i, j in zip(a, b))


class MultiPoly:
    """Polynomial in ``nvars`` variables stored as ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored. Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, terms: Mapping | Iterable = (), nvars: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if any(e < 0 for e in exp):
                raise ValueError("negative exponent")
            if nvars is None:
                nvars = len(exp)
            elif len(exp) != nvars:
                raise ValueError("exponent length does not match variable count")
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
                if clean[exp] == 0:
                    del clean[exp]
        if nvars is None:
            raise ValueError("cannot infer the variable count of an empty polynomial")
        self.nvars = nvars
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "MultiPoly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls({tuple(exp): 1}, nvars)

    @classmethod
    def variables(cls, nvars: int) -> tuple:
        return tuple(cls.var(i, nvars) for i in range(nvars))

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials have different variable counts")
            return other
        return MultiPoly.constant(other, self.nvars)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if other == 0:
                return MultiPoly.zero(self.nvars)
            return MultiPoly({e: c * other for e, c in self.terms.items()}, self.nvars)
        other = self._lift(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(out, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            return divide_exact(self, other)
        return MultiPoly({e: _div(c, other) for e, c in self.terms.items()}, self.nvars)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(other, self.nvars)
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"MultiPoly({self.to_string()})"

    # -- queries -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return all(sc.is_exact(c) for c in self.terms.values())

    def degree(self, i: int) -> int:
        """Degree in variable ``i`` (-1 for the zero polynomial)."""
        return max((e[i] for e in self.terms), default=-1)

    def degrees(self) -> tuple:
        return tuple(self.degree(i) for i in range(self.nvars))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, exp: Sequence[int]):
        return self.terms.get(tuple(exp), 0)

    def evaluate(self, point: Sequence):
        """Value at ``point`` using per-variable power tables."""
        if len(point) != self.nvars:
            raise ValueError("point has the wrong dimension")
        degs = self.degrees()
        powers = []
        for v, d in zip(point, degs):
            row = [1]
            for _ in range(max(d, 0)):
                row.append(row[-1] * v)
            powers.append(row)
        total = 0
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    t = t * powers[i][k]
            total = total + t
        return total

    def __call__(self, *point):
        return self.evaluate(point)

    def monomial_content(self) -> tuple:
        """Exponent of the largest monomial dividing every term."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def integer_content(self) -> Fraction:
        """Positive rational c such that ``self / c`` has coprime integer coefficients.

        For Q(sqrt 5) coefficients both the rational and the sqrt 5 parts count.
        """
        parts = []
        for c in self.terms.values():
            if isinstance(c, QSqrt5):
                parts.extend([c.a, c.b])
            elif isinstance(c, (int, Fraction)):
                parts.append(Fraction(c))
            else:
                raise TypeError("integer content needs exact coefficients")
        parts = [p for p in parts if p != 0]
        if not parts:
            return Fraction(1)
        den = math.lcm(*(p.denominator for p in parts))
        g = math.gcd(*(int(p * den) for p in parts))
        return Fraction(g, den)

    # -- transformations -----------------------------------------------------

    def map_coefficients(self, f) -> "MultiPoly":
        return MultiPoly({e: f(c) for e, c in self.terms.items()}, self.nvars)

    def to_float(self) -> "MultiPoly":
        return self.map_coefficients(float)

    def to_qsqrt5(self) -> "MultiPoly":
        return self.map_coefficients(sc.to_qsqrt5)

    def divide_monomial(self, exp: Sequence[int]) -> "MultiPoly":
        exp = tuple(exp)
        out = {}
        for e, c in self.terms.items():
            q = tuple(a - b for a, b in zip(e, exp))
            if any(k < 0 for k in q):
                raise NotDivisible("monomial does not divide the polynomial")
            out[q] = c
        return MultiPoly(out, self.nvars)

    def strip_monomial(self) -> tuple["MultiPoly", tuple]:
        m = self.monomial_content()
        return self.divide_monomial(m), m

    def permute(self, perm: Sequence[int]) -> "MultiPoly":
        """Variable ``i`` of the result is variable ``perm[i]`` of ``self``."""
        out = {}
        for e, c in self.terms.items():
            out[tuple(e[perm[i]] for i in range(self.nvars))] = c
        return MultiPoly(out, self.nvars)

    def coefficients_in(self, i: int) -> list["MultiPoly"]:
        """Coefficients of powers of variable ``i`` as polynomials in the others."""
        d = self.degree(i)
        out: list[dict] = [dict() for _ in range(d + 1)]
        for e, c in self.terms.items():
            out[e[i]][e[:i] + e[i + 1:]] = c
        return [MultiPoly(t, self.nvars - 1) for t in out]

    def affine_substitute(self, i: int, a, b) -> "MultiPoly":
        """Substitute ``x_i -> a + b x_i``."""
        d = self.degree(i)
        if d <= 0:
            return self
        # rows of binomial expansions of (a + b x)^k
        expansions = [[1]]
        for k in range(1, d + 1):
            prev = expansions[-1]
            row = [0] * (k + 1)
            for j, c in enumerate(prev):
                row[j] = row[j] + c * a
                row[j + 1] = row[j + 1] + c * b
            expansions.append(row)
        out: dict = {}
        for e, c in self.terms.items():
            for j, w in enumerate(expansions[e[i]]):
                if w == 0:
                    continue
                ne = e[:i] + (j,) + e[i + 1:]
                out[ne] = out.get(ne, 0) + c * w
        return MultiPoly(out, self.nvars)

    def compose(self, subs: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute polynomial ``subs[i]`` for variable ``i``."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        m = subs[0].nvars
        degs = self.degrees()
        powers = []
        for s, d in zip(subs, degs):
            row = [MultiPoly.constant(1, m)]
            for _ in range(max(d, 0)):
                row.append(row[-1] * s)
            powers.append(row)
        out: dict = {}
        for e, c in self.terms.items():
            t = MultiPoly.constant(c, m)
            for i, k in enumerate(e):
                if k:
                    t = t * powers[i][k]
            for ee, cc in t.terms.items():
                out[ee] = out.get(ee, 0) + cc
        return MultiPoly(out, m)

    # -- text form -----------------------------------------------------------

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def to_lines(self) -> list[str]:
        """One ``i1 i2 ... : p/q [ s/t ]`` line per term, in sorted order."""
        lines = []
        for e, c in self.sorted_terms():
            idx = " ".join(str(k) for k in e)
            if isinstance(c, QSqrt5):
                if c.b == 0:
                    lines.append(f"{idx} : {c.a}")
                else:
                    lines.append(f"{idx} : {c.a} {c.b}")
            elif isinstance(c, (int, Fraction)):
                lines.append(f"{idx} : {Fraction(c)}")
            else:
                raise TypeError("text form needs exact coefficients")
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str], nvars: int | None = None) -> "MultiPoly":
        terms = []
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise ValidationError(f"term line lacks ':' separator: {raw!r}")
            left, right = line.split(":", 1)
            try:
                exp = tuple(int(t) for t in left.split())
                parts = right.split()
                if len(parts) == 1:
                    c = Fraction(parts[0])
                elif len(parts) == 2:
                    c = QSqrt5(Fraction(parts[0]), Fraction(parts[1]))
                else:
                    raise ValueError("expected one or two coefficients")
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"bad term line {raw!r}: {exc}") from exc
            if nvars is not None and len(exp) != nvars:
                raise ValidationError(f"term {raw!r} has {len(exp)} indices, expected {nvars}")
            if any(k < 0 for k in exp):
                raise ValidationError(f"negative exponent in {raw!r}")
            terms.append((exp, c))
        if nvars is None:
            if not terms:
                raise ValidationError("empty polynomial needs an explicit variable count")
            nvars = len(terms[0][0])
        if any(len(e) != nvars for e, _ in terms):
            raise ValidationError("inconsistent number of indices across terms")
        return cls(terms, nvars)

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = ["x", "y", "z", "w"][: self.nvars] if self.nvars <= 4 else [
                f"x{i}" for i in range(self.nvars)
            ]
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
            )
            cs = sc.format_scalar(c)
            if not mono:
                parts.append(f"({cs})")
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)


def divide_exact(p: MultiPoly, f: MultiPoly) -> MultiPoly:
    """Exact quotient ``p / f``; raises :class:`NotDivisible` on a remainder.

    Plain multivariate long division in lexicographic order. When ``f``
    divides ``p`` the remainder is zero in any monomial order, so a leading
    term that ``f`` cannot cancel proves non-divisibility.
    """
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.nvars != f.nvars:
        raise ValueError("polynomials have different variable counts")
    lead_f = max(f.terms)
    cf = f.terms[lead_f]
    rem = dict(p.terms)
    quot: dict = {}
    f_items = list(f.terms.items())
    while rem:
        lead = max(rem)
        q_exp = tuple(a - b for a, b in zip(lead, lead_f))
        if any(k < 0 for k in q_exp):
            raise NotDivisible("remainder is nonzero")
        c = _div(rem[lead], cf)
        if isinstance(c, Fraction) and c.denominator == 1:
            c = int(c)
        quot[q_exp] = c
        for e, cc in f_items:
            ne = _add_exp(e, q_exp)
            v = rem.get(ne, 0) - c * cc
            if v == 0:
                rem.pop(ne, None)
            else:
                rem[ne] = v
    return MultiPoly(quot, p.nvars)


def poly_from_callable(fn, nvars: int) -> MultiPoly:
    """Build a polynomial by evaluating ``fn`` on the variable polynomials."""
    return fn(*MultiPoly.variables(nvars))
