"""Number backends: plain floats with a tolerance, or exact elements of Q(sqrt 5).

Geometry and polynomial code in this package only uses ``+ - * /`` and
comparisons, so it runs unchanged on ``float``, ``int``, ``Fraction`` and
:class:`QSqrt5` values.
"""

from __future__ import annotations

import math
import os
import re
from fractions import Fraction
from numbers import Rational
from typing import Union


def _default_eps() -> float:
    raw = os.environ.get("HEATMAP_EPS")
    if raw is None:
        return 1e-10
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"HEATMAP_EPS is not a number: {raw!r}") from exc
    if not value > 0:
        raise ValueError("HEATMAP_EPS must be positive")
    return value


#: Relative tolerance used by float-mode degeneracy tests. Read once at import.
EPS: float = _default_eps()


class QSqrt5:
    """Exact number ``a + b*sqrt(5)`` with rational ``a`` and ``b``.

    Instances are immutable and hashable. Arithmetic with ints and Fractions
    stays exact; mixing with a float gives a float.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        a = Fraction(a)
        b = Fraction(b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt5 is immutable")

    def __reduce__(self):
        return (QSqrt5, (self.a, self.b))

    # -- conversions -------------------------------------------------------

    @staticmethod
    def coerce(value) -> "QSqrt5":
        if isinstance(value, QSqrt5):
            return value
        if isinstance(value, (int, Fraction)):
            return QSqrt5(value, 0)
        raise TypeError(f"cannot convert {type(value).__name__} to QSqrt5 exactly")

    def __float__(self) -> float:
        # Fractions convert with correct rounding; one extra rounding for the sum
        return float(self.a) + float(self.b) * math.sqrt(5.0)

    def conjugate(self) -> "QSqrt5":
        return QSqrt5(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 5 b^2``."""
        return self.a * self.a - 5 * self.b * self.b

    def is_rational(self) -> bool:
        return self.b == 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, QSqrt5):
            return QSqrt5(self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return QSqrt5(self.a + other, self.b)
        if isinstance(other, float):
            return float(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QSqrt5(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, QSqrt5):
            return QSqrt5(self.a - other.a, self.b - other.b)
        if isinstance(other, (int, Fraction)):
            return QSqrt5(self.a - other, self.b)
        if isinstance(other, float):
            return float(self) - other
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSqrt5(other - self.a, -self.b)
        if isinstance(other, float):
            return other - float(self)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, QSqrt5):
            a, b, c, d = self.a, self.b, other.a, other.b
            return QSqrt5(a * c + 5 * b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return QSqrt5(self.a * other, self.b * other)
        if isinstance(other, float):
            return float(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "QSqrt5":
        n = self.norm()
        if n == 0:
            # the norm of a nonzero element is nonzero since sqrt 5 is irrational
            raise ZeroDivisionError("division by zero in Q(sqrt 5)")
        return QSqrt5(self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, QSqrt5):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt 5)")
            return QSqrt5(self.a / other, self.b / other)
        if isinstance(other, float):
            return float(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSqrt5(other) * self.inverse()
        if isinstance(other, float):
            return other / float(self)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QSqrt5(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- ordering ----------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt 5``."""
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == 0 or sb == 0 or sa == sb:
            return sa or sb
        # opposite signs: compare a^2 with 5 b^2
        diff = a * a - 5 * b * b
        if diff > 0:
            return sa
        return sb

    def _cmp(self, other) -> int:
        if isinstance(other, float):
            fs = float(self)
            return (fs > other) - (fs < other)
        return (self - QSqrt5.coerce(other)).sign()

    def __eq__(self, other):
        if isinstance(other, QSqrt5):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, float):
            return self.b == 0 and float(self.a) == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __repr__(self):
        return f"QSqrt5({self.a}, {self.b})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[float, int, Fraction, QSqrt5]

SQRT5 = QSqrt5(0, 1)
PHI = QSqrt5(Fraction(1, 2), Fraction(1, 2))
PHI_INV = PHI - 1  # 1/phi = phi - 1


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, QSqrt5)) and not isinstance(value, bool)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def to_exact(value) -> Union[Fraction, QSqrt5]:
    """Convert ints, Fractions, QSqrt5 and floats (by exact binary value)."""
    if isinstance(value, QSqrt5):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float has no exact value")
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


def to_qsqrt5(value) -> QSqrt5:
    return QSqrt5.coerce(to_exact(value))


def to_float(value) -> float:
    return float(value)


def is_zero(value, scale: float = 1.0, eps: float | None = None) -> bool:
    """Zero test: exact for exact values, relative to ``scale`` for floats."""
    if is_exact(value):
        return value == 0
    if eps is None:
        eps = EPS
    return abs(value) <= eps * scale


def sign(value) -> int:
    if isinstance(value, QSqrt5):
        return value.sign()
    return (value > 0) - (value < 0)


def magnitude(value) -> float:
    """Float absolute value, used only for pivoting and scale estimates."""
    return abs(float(value))


def parse_scalar(text: str, exact: bool = True) -> Scalar:
    """Parse ``p/q``, decimals, ``phi``, ``-1/phi``, ``sqrt5`` or ``a+b*sqrt5``.

    Decimals are read as exact rationals when ``exact`` is true, so ``1.1``
    becomes ``11/10``.
    """
    s = text.strip().lower().replace(" ", "")
    named = {
        "phi": PHI,
        "-phi": -PHI,
        "1/phi": PHI_INV,
        "-1/phi": -PHI_INV,
        "sqrt5": SQRT5,
        "-sqrt5": -SQRT5,
    }
    if s in named:
        value = named[s]
        return value if exact else float(value)
    if "sqrt5" in s or "√5" in s:
        s = s.replace("√5", "sqrt5")
        # split a+b*sqrt5 at the sign that starts the irrational part
        m = re.match(r"^(.*?)([+-][^+-]*sqrt5)$", s) or re.match(r"^()([^+-]*sqrt5)$", s)
        if m is None:
            raise ValueError(f"cannot parse scalar {text!r}")
        rat, irr = m.group(1), m.group(2)
        irr = irr.replace("*sqrt5", "").replace("sqrt5", "")
        if irr in ("", "+"):
            irr = "1"
        elif irr == "-":
            irr = "-1"
        value = QSqrt5(Fraction(rat) if rat else 0, Fraction(irr))
        return value if exact else float(value)
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse scalar {text!r}") from exc
    if exact:
        return value
    return float(value)


def format_scalar(value) -> str:
    """Inverse of :func:`parse_scalar` for exact values; repr for floats."""
    if isinstance(value, QSqrt5):
        if value.b == 0:
            return str(value.a)
        if value.a == 0:
            return f"{value.b}*sqrt5"
        sgn = "+" if value.b > 0 else "-"
        return f"{value.a}{sgn}{abs(value.b)}*sqrt5"
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return repr(float(value))
