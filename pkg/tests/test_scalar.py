import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from projheat import scalar as sc
from projheat.scalar import PHI, PHI_INV, SQRT5, QSqrt5

from conftest import fractions

qsqrt5 = st.builds(QSqrt5, fractions(), fractions())


def test_golden_ratio_identities():
    assert PHI * PHI == PHI + 1
    assert PHI * PHI_INV == 1
    assert PHI - PHI_INV == 1
    assert SQRT5 * SQRT5 == 5
    assert float(PHI) == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-15)


@given(qsqrt5, qsqrt5, qsqrt5)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == 0


@given(qsqrt5)
def test_inverse(a):
    if a == 0:
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1


@given(qsqrt5)
def test_sign_matches_float(a):
    f = float(a)
    if abs(f) > 1e-9:
        assert a.sign() == (1 if f > 0 else -1)


@given(qsqrt5)
def test_norm_is_product_with_conjugate(a):
    assert a * a.conjugate() == a.norm()


@given(qsqrt5)
def test_format_parse_round_trip(a):
    assert sc.parse_scalar(sc.format_scalar(a)) == a


@pytest.mark.parametrize("text,value", [
    ("phi", PHI), ("-1/phi", -PHI_INV), ("3/4", Fraction(3, 4)), ("-2", Fraction(-2)),
    ("0.25", Fraction(1, 4)), ("sqrt5", SQRT5),
])
def test_parse_scalar(text, value):
    assert sc.parse_scalar(text) == value


def test_parse_scalar_rejects_garbage():
    with pytest.raises(ValueError):
        sc.parse_scalar("nonsense")


def test_rational_qsqrt5_mixes_with_fraction():
    assert PHI + Fraction(1, 2) == QSqrt5(1, Fraction(1, 2))
    assert (PHI * 2).is_rational() is False
    assert (PHI - PHI_INV).is_rational()
