from fractions import Fraction

import pytest
import sympy

from projheat import posdom as pd
from projheat.acceptance import displayed_half_values, displayed_n0_n13, _poly_at
from projheat.errors import UndefinedAt
from projheat.moduli import energy, heat_moduli
from projheat.polynomial import MultiPoly, divide_exact

F = Fraction
X, Y = MultiPoly.variables(2)


@pytest.fixture(scope="module")
def gap():
    return pd.energy_gap()


@pytest.fixture(scope="module")
def coeffs(gap):
    return pd.extract_lambda_coefficients(gap.N)


def test_shape(gap, coeffs):
    assert gap.N.degrees() == (10, 10, 14)
    assert all(e[2] >= 1 for e in gap.N.terms)
    assert len(coeffs) == 14
    assert all(not c.is_zero() for c in coeffs)
    assert gap.N.evaluate((F(1, 2), F(1, 2), 1)) > 0


def test_common_factor_really_divides(gap):
    num = gap.N * gap.common_factor
    assert divide_exact(num, gap.common_factor) == gap.N


def test_float_cross_check(gap, rng):
    checked = 0
    while checked < 100:
        x, y = rng.uniform(0.01, 0.99, 2)
        lam = rng.uniform(0.01, 10)
        try:
            direct = float(energy(heat_moduli((x, y), lam))) - float(energy((x, y)))
        except UndefinedAt:
            continue
        assert gap.evaluate(x, y, lam) == pytest.approx(direct, abs=1e-10)
        checked += 1


def test_exact_cross_check(gap):
    for x, y, lam in ((F(1, 3), F(2, 5), F(3, 2)), (F(4, 7), F(1, 9), F(7)), (F(1, 2), F(1, 2), F(1, 10))):
        direct = energy(heat_moduli((x, y), lam)) - energy((x, y))
        assert gap.N.evaluate((x, y, lam)) / gap.D.evaluate((x, y, lam)) == direct


def test_displayed_n0_and_n13_match(coeffs):
    n0, n13 = displayed_n0_n13()
    assert coeffs[0] == n0
    assert coeffs[13] == n13
    # the displayed N_0 divides the computed lambda^1 coefficient
    assert divide_exact(coeffs[0], n0) == 1


def test_n1_displayed_terms(coeffs):
    q = divide_exact(coeffs[1], 1 - X * Y)
    low = {e: c for e, c in q.terms.items() if sum(e) <= 2}
    assert low == {(2, 0): 4, (1, 1): 12, (0, 2): 4}
    top = max(sum(e) for e in q.terms)
    assert {e: c for e, c in q.terms.items() if sum(e) >= top - 1} == {(8, 8): -1, (8, 7): 7, (7, 8): 7}


def test_n12_displayed_terms(coeffs):
    q = divide_exact(coeffs[12], (1 - X) * X * (1 - Y) * Y)
    low = {e: c for e, c in q.terms.items() if sum(e) <= 1}
    assert low == {(0, 0): 1, (1, 0): 3, (0, 1): 3}
    top = max(sum(e) for e in q.terms)
    assert {e: c for e, c in q.terms.items() if sum(e) == top} == {(8, 6): -4, (7, 7): -12, (6, 8): -4}


def test_half_values(gap):
    l, n_shown, d_shown = displayed_half_values()
    half = F(1, 2)
    assert sympy.cancel(_poly_at(gap.D, half, half) / d_shown) == 1
    # the computed N carries an extra factor lambda relative to the display
    assert sympy.cancel(_poly_at(gap.N, half, half) / n_shown) == l


def test_n0_pipeline_monomials(coeffs):
    bundle = pd.triangle_positivity_pipeline(coeffs[0])
    monos = {p.name: p.monomial for p in bundle.pieces}
    assert monos["D1"] == (1, 0)
    assert monos["D2"] == (2, 0)
    assert bundle.replay()


def test_all_coefficients_certify(coeffs):
    depths = []
    for c in coeffs:
        bundle = pd.triangle_positivity_pipeline(c)
        assert bundle.replay()
        assert all(p.certificate.variant >= pd.Variant.WPD for p in bundle.pieces)
        depths.append(bundle.depth)
    assert depths == [2, 3, 3, 4, 4, 4, 4, 4, 4, 2, 2, 2, 2, 2]


def test_certified_pieces_are_positive_at_samples(coeffs):
    bundle = pd.triangle_positivity_pipeline(coeffs[5])
    for piece in bundle.pieces:
        assert pd.spot_check(piece.certificate, samples_per_leaf=20, seed=3) == 20 * len(piece.certificate.leaves)
