import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from projheat import polygon as pg
from projheat.errors import NotGeneric, ValidationError, WrongArity
from projheat.moduli import heat_moduli, psi
from projheat.polygon import INF, Polygon, heat_map, heat_vertex, is_convex
from projheat.projective import SQUARE, HomPoint, ProjTransform, det3, frame_transform, join, meet
from projheat.sampling import random_convex_polygon
from projheat.scalar import PHI, PHI_INV

from conftest import open_unit, rational_pentagons, rational_transforms

F = Fraction
QUAD = (HomPoint(0, 0, 1), HomPoint(3, -1, 1), HomPoint(4, 2, 1), HomPoint(1, 3, 1))


def test_heat_vertex_special_parameters():
    a0, a2, a4, a6 = QUAD
    T = frame_transform(QUAD, SQUARE).inverse()
    assert heat_vertex(a0, a2, a4, a6, 0) == meet(join(a0, a4), join(a2, a6))
    assert heat_vertex(a0, a2, a4, a6, 1) == T.apply(HomPoint(1, 0, 1))
    assert heat_vertex(a0, a2, a4, a6, INF) == T.apply(HomPoint(1, 0, 0))


@pytest.mark.parametrize("lam", [F(1, 3), F(2), F(-7, 4), PHI])
def test_heat_vertex_cross_ratio_is_lambda(lam):
    from projheat.projective import cross_ratio

    T = frame_transform(QUAD, SQUARE).inverse()
    H, Q, P = T.apply(HomPoint(1, 0, 1)), T.apply(HomPoint(1, 0, 0)), T.apply(HomPoint(0, 0, 1))
    assert cross_ratio(H, Q, P, heat_vertex(*QUAD, lam)) == lam


def test_parse_lambda():
    assert pg.parse_lambda("inf") is INF
    assert pg.parse_lambda("phi") == PHI
    assert pg.parse_lambda("-1/phi") == -PHI_INV
    assert pg.parse_lambda("2/3") == F(2, 3)
    assert pg.parse_lambda("0.5", exact=False) == 0.5
    with pytest.raises(ValidationError):
        pg.parse_lambda("lambda")


def test_polygon_needs_five_vertices():
    with pytest.raises(WrongArity):
        Polygon(SQUARE)


def test_regular_and_star_convexity():
    P = Polygon.regular(5)
    assert is_convex(P)
    assert not is_convex(pg.star_relabel(P))
    assert is_convex(heat_map(P, 2.0))


def test_convex_requires_generic():
    P = Polygon([(0, 0, 1), (1, 0, 1), (2, 0, 1), (2, 2, 1), (0, 2, 1)])
    with pytest.raises(NotGeneric):
        is_convex(P)


def test_is_convex_rejects_reordered_polygons(rng):
    for _ in range(50):
        P = random_convex_polygon(rng, 6)
        assert is_convex(P)
        order = rng.permutation(6)
        shuffled = Polygon(P[int(k)] for k in order)
        cyclic = any(list(np.roll(order, r)) in (list(range(6)), list(range(5, -1, -1))) for r in range(6))
        assert is_convex(shuffled) == cyclic


@given(st.integers(0, 2**32 - 1), st.integers(5, 12), st.floats(0.01, 10))
def test_convexity_preserved(seed, n, lam):
    P = random_convex_polygon(np.random.default_rng(seed), n)
    assert is_convex(heat_map(P, lam))


def test_flag_invariants_regular():
    P = Polygon.regular(5)
    assert all(abs(x - float(PHI_INV)) < 1e-12 for x in pg.flag_invariants(P))


@given(rational_pentagons())
def test_flag_invariants_five_periodic(P):
    try:
        xs = pg.flag_invariants(P)
    except NotGeneric:
        return
    assert all(xs[i] == xs[i + 5] for i in range(5))


def test_convex_heptagon_invariants_in_unit_interval(rng):
    for _ in range(20):
        xs = pg.flag_invariants(random_convex_polygon(rng, 7))
        assert len(xs) == 14 and all(0 < x < 1 for x in xs)


@given(rational_pentagons(), rational_transforms())
def test_projective_naturality_exact(P, M):
    T = ProjTransform(M)
    try:
        xs = pg.flag_invariants(P)
        H = heat_map(P, F(1, 2))
    except NotGeneric:
        return
    Q = P.transform(T)
    assert pg.flag_invariants(Q) == xs
    assert heat_map(Q, F(1, 2)) == H.transform(T)


def test_star_relabel_order_four():
    P = Polygon.regular(5)
    S = pg.star_relabel(P)
    assert S.vertices == tuple(P[k] for k in (0, 2, 4, 1, 3))
    Q = P
    for _ in range(4):
        Q = pg.star_relabel(Q)
    assert Q == P
    with pytest.raises(WrongArity):
        pg.star_relabel(Polygon.regular(6))


@given(rational_pentagons(), st.sampled_from([F(1, 2), F(2), F(-3), F(5, 3)]))
def test_star_conjugacy(P, lam):
    try:
        lhs = psi(pg.star_relabel(heat_map(P, lam)))
        rhs = psi(heat_map(pg.star_relabel(P), -1 / lam))
    except NotGeneric:
        return
    assert lhs == rhs


@given(rational_pentagons(), st.sampled_from([F(0), F(1), F(1, 2), F(3), F(-2, 5)]))
def test_geometric_and_algebraic_maps_agree(P, lam):
    try:
        m = psi(P)
        lhs = psi(heat_map(P, lam))
        rhs = heat_moduli(m, lam)
    except (NotGeneric, ArithmeticError):
        return
    assert lhs == rhs


@given(rational_pentagons())
def test_pentagram_is_identity_on_classes(P):
    try:
        assert psi(heat_map(P, 0)) == psi(P)
    except NotGeneric:
        pass


def test_phi_gives_regular_class(rng):
    for _ in range(20):
        m = psi(heat_map(random_convex_polygon(rng, 5), float(PHI)))
        assert m.distance((float(PHI_INV), float(PHI_INV))) < 1e-9


def test_heat_map_array_matches_polygon_path(rng):
    P = random_convex_polygon(rng, 7)
    A = pg.heat_map_array(P.array(), 0.7)
    B = heat_map(P, 0.7).array()
    for a, b in zip(A, B):
        assert np.allclose(np.cross(a, b), 0, atol=1e-9 * np.linalg.norm(a) * np.linalg.norm(b))


@given(open_unit(), open_unit(), open_unit(), open_unit(), st.fractions(min_value=F(1, 20), max_value=5, max_denominator=20))
def test_collinearity_det_matches_geometry(x1, x2, x3, x4, lam):
    A = pg.hexagon_window(x1, x2, x3, x4)
    b3 = heat_vertex(A[0], A[1], A[2], A[3], lam)
    b5 = heat_vertex(A[1], A[2], A[3], A[4], lam)
    b7 = heat_vertex(A[2], A[3], A[4], A[5], lam)
    assert b3 == HomPoint(lam, 0, 1)
    assert b5 == HomPoint(*pg.b5_coords(x1, x2, lam))
    assert b7 == HomPoint(*pg.b7_coords(x1, x2, x3, x4, lam))
    value = pg.collinearity_det(x1, x2, x3, x4, lam)
    assert value == det3((lam, 0, 1), pg.b5_coords(x1, x2, lam), pg.b7_coords(x1, x2, x3, x4, lam))
    assert value > 0


def test_collinearity_det_at_half():
    h = F(1, 2)
    assert pg.collinearity_det(h, h, h, h, 1) > 0


def test_collinearity_det_grid_has_no_sign_change():
    grid = np.linspace(0.05, 0.95, 6)
    lams = (0.05, 0.5, 1.0, 3.0, 10.0)
    for x1, x2, x3, x4 in itertools.product(grid, repeat=4):
        for lam in lams:
            assert pg.collinearity_det(x1, x2, x3, x4, lam) > 0
        a, b, c = pg.b5_coords(x1, x2, 0.0)
        d, e, f = pg.b7_coords(x1, x2, x3, x4, 0.0)
        assert a * e - b * d > 0
