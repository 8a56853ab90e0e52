from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from projheat.polygon import Polygon
from projheat.projective import HomPoint

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def fractions(lo=-5, hi=5, max_den=50):
    return st.fractions(min_value=lo, max_value=hi, max_denominator=max_den)


def open_unit(max_den=60):
    return st.fractions(min_value=Fraction(1, max_den), max_value=1 - Fraction(1, max_den),
                        max_denominator=max_den)


unit_moduli = st.tuples(open_unit(), open_unit()).filter(lambda m: m[0] * m[1] != 1)
float_unit = st.floats(min_value=0.02, max_value=0.98)
float_moduli = st.tuples(float_unit, float_unit)


@st.composite
def transforms(draw):
    """Random well-conditioned float projective matrices."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    while True:
        A = np.eye(3) + 0.4 * rng.normal(size=(3, 3))
        A[2, :2] *= 0.2
        if abs(np.linalg.det(A)) > 0.2:
            return A


@st.composite
def rational_transforms(draw):
    entries = draw(st.lists(st.integers(-4, 4), min_size=9, max_size=9))
    M = [entries[0:3], entries[3:6], entries[6:9]]
    det = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
           + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
    if det == 0:
        M = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    return tuple(tuple(Fraction(v) for v in row) for row in M)


@st.composite
def rational_pentagons(draw):
    """Rational pentagons with no three vertices collinear."""
    pts = draw(st.lists(st.tuples(st.integers(-9, 9), st.integers(-9, 9)), min_size=5, max_size=5, unique=True))
    for i in range(5):
        for j in range(i + 1, 5):
            for k in range(j + 1, 5):
                (a, b), (c, d), (e, f) = pts[i], pts[j], pts[k]
                if (c - a) * (f - b) - (d - b) * (e - a) == 0:
                    assume(False)
    return Polygon(HomPoint(Fraction(x), Fraction(y), 1) for x, y in pts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s[6:9].strip(" ."))):
            terminalreporter.write_line(line)
