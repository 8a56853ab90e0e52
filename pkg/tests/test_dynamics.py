import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projheat import dynamics as dy
from projheat import projective as pj
from projheat.dynamics import OUTCOME_NAMES, Outcome
from projheat.errors import Inconclusive, OutOfRange, ValidationError
from projheat.moduli import REGULAR, basis_frame_coords, ModuliPoint, center_map, derivative_scale, energy
from projheat.polygon import Polygon, heat_map, is_convex
from projheat.projective import HomPoint
from projheat.sampling import random_convex_polygon
from projheat.scalar import PHI, PHI_INV

PHI_F = float(PHI)


def convex(seed, n=5):
    return random_convex_polygon(np.random.default_rng(seed), n)


def chordal(a: HomPoint, b: HomPoint) -> float:
    u = np.asarray(a.array(), float)
    v = np.asarray(b.array(), float)
    return float(np.linalg.norm(np.cross(u / np.linalg.norm(u), v / np.linalg.norm(v))))


@pytest.mark.parametrize("lam,outcome,limit", [
    (0.6, Outcome.POINT, Outcome.REGULAR),
    (1.0, Outcome.POINT, Outcome.REGULAR),
    (2.0, Outcome.LINE, Outcome.REGULAR),
    (-0.3, Outcome.LINE, Outcome.STAR_REGULAR),
    (-3.0, Outcome.POINT, Outcome.STAR_REGULAR),
    (PHI_F, Outcome.TWO_CYCLE, Outcome.REGULAR),
])
def test_classification_of_convex_pentagons(lam, outcome, limit):
    for seed in range(3):
        orbit = dy.iterate_orbit(convex(seed), lam)
        result = dy.classify(orbit, lam)
        assert result.outcome == outcome
        assert result.moduli_limit == limit
        assert result.name == OUTCOME_NAMES[outcome]


def test_classify_inconclusive():
    orbit = dy.iterate_orbit(convex(0), 2.0, max_steps=3)
    assert orbit.stop == Outcome.MAX_ITERATIONS
    with pytest.raises(Inconclusive):
        dy.classify(orbit, 2.0)


def test_orbit_steps_are_contiguous_and_energy_matches():
    orbit = dy.iterate_orbit(convex(1), 0.6)
    assert [s.step for s in orbit.steps] == list(range(len(orbit.steps)))
    for s in orbit.steps:
        assert s.energy == pytest.approx(float(energy((s.x, s.y))), rel=1e-12)


@pytest.mark.parametrize("lam", [0.3, 1.0, 1.5, 2.0, 5.0])
def test_energy_increases_along_convex_orbits(lam):
    for seed in range(4):
        steps = dy.iterate_orbit(convex(seed), lam).steps
        for a, b in zip(steps, steps[1:]):
            if ModuliPoint(a.x, a.y).distance(REGULAR) < 1e-6:
                break
            assert b.energy > a.energy


def test_regular_pentagon_moduli_constant():
    for lam in (0.5, 1.0, 3.0):
        orbit = dy.iterate_orbit(Polygon.regular(5), lam, max_steps=20)
        assert all(ModuliPoint(s.x, s.y).distance(REGULAR) < 1e-12 for s in orbit.steps)


def test_moduli_orbit_converges():
    orbit = dy.iterate_orbit(ModuliPoint(0.3, 0.6), 1.0)
    assert orbit.stop == Outcome.REGULAR
    orbit = dy.iterate_orbit(ModuliPoint(0.3, 0.6), -0.3)
    assert orbit.stop == Outcome.STAR_REGULAR


def test_exponential_tail_matches_derivative_scale():
    with mpmath.workdps(60):
        orbit = dy.iterate_orbit(ModuliPoint(mpmath.mpf("0.3"), mpmath.mpf("0.6")), 1,
                                 max_steps=60, tol=mpmath.mpf("1e-50"))
        r = mpmath.mpf(1) / mpmath.phi
        dist = [mpmath.sqrt((s.x - r) ** 2 + (s.y - r) ** 2) for s in orbit.steps]
    assert len(dist) >= 12
    ratios = [float(b / a) for a, b in zip(dist[-11:], dist[-10:])]
    s = float(derivative_scale(1))
    assert all(abs(q - s) < 1e-3 for q in ratios)


def test_collapse_point_examples():
    P = Polygon.regular(5)
    assert chordal(dy.collapse_point(P, 0.6), HomPoint(0, 0, 1)) < 1e-8
    with pytest.raises(OutOfRange):
        dy.collapse_point(P, 2.0)
    with pytest.raises(OutOfRange):
        dy.collapse_point(P, -0.3)


@pytest.mark.parametrize("seed", range(4))
def test_collapse_point_at_inverse_phi_is_center(seed):
    P = convex(seed)
    T, (x, y) = basis_frame_coords(P)
    expected = T.inverse().apply(center_map(x, y, homogeneous=True))
    got = dy.collapse_point(P, float(PHI_INV), tol=1e-12)
    assert chordal(got, expected) < 1e-7


@pytest.mark.parametrize("seed", range(3))
def test_star_center_is_collapse_point_of_minus_phi(seed):
    from projheat.moduli import star_center

    P = convex(seed)
    assert chordal(dy.collapse_point(P, -PHI_F, tol=1e-12), star_center(P)) < 1e-7


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from([0.3, 0.6, 1.0, 1.5, -2.0, -5.0]))
def test_collapse_point_is_orbit_invariant_and_vertex_free(seed, lam):
    P = convex(seed)
    c = dy.collapse_point(P, lam)
    assert chordal(c, dy.collapse_point(heat_map(P, lam), lam)) < 1e-7
    assert chordal(c, dy.collapse_point(P, lam, vertex=3)) < 1e-7


def test_ellipse_diameters_shrink_in_collapse_range():
    def diameter(Q):
        C = pj.conic_through_five(list(Q.vertices)).array()
        A, b, c = C[:2, :2], C[:2, 2], C[2, 2]
        k = b @ np.linalg.solve(A, b) - c
        return 2 / math.sqrt(np.linalg.eigvalsh(A / k).min())

    for seed in range(3):
        Q = convex(seed)
        ds = []
        for _ in range(12):
            ds.append(diameter(Q))
            Q = heat_map(Q, 0.6)
        ratios = np.array(ds[1:]) / np.array(ds[:-1])
        assert ratios.max() < 1
        assert ratios[-1] == pytest.approx(ratios[-2], rel=1e-2)


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from([1.7, 2.0, 4.0, -0.3, -0.5]))
def test_degeneration_line_is_stable(seed, lam):
    P = convex(seed)
    L = dy.degeneration_line(P, lam)
    L2 = dy.degeneration_line(heat_map(P, lam), lam)
    a, b = (np.asarray(l.array(), float) for l in (L, L2))
    assert np.linalg.norm(np.cross(a / np.linalg.norm(a), b / np.linalg.norm(b))) < 1e-7


def test_degeneration_line_out_of_range():
    with pytest.raises(OutOfRange):
        dy.degeneration_line(convex(0), 0.6)


def test_residual_decreases_slightly_above_phi():
    orbit = dy.iterate_orbit(convex(5), 1.7)
    assert orbit.stop == Outcome.LINE
    res = [s.residual for s in orbit.steps[-50:]]
    assert all(b < a for a, b in zip(res, res[1:]))


def test_symmetric_pentagon_line_is_symmetric():
    P = Polygon([(1.0, 0.0, 1), (0.2, 0.9, 1), (-0.8, 0.5, 1), (-0.8, -0.5, 1), (0.2, -0.9, 1)])
    assert is_convex(P)
    L = np.asarray(dy.degeneration_line(P, 2.0).array(), float)
    L /= np.linalg.norm(L)
    # the mirror image (l0, -l1, l2) must be the same line
    assert min(abs(L[1]), math.hypot(L[0], L[2])) < 1e-6


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("lam", [2.0, -0.3])
def test_dual_check_edge_lines_converge_to_line(seed, lam):
    P = convex(seed)
    orbit = dy.iterate_orbit(P, lam)
    L = np.asarray(dy.degeneration_line(P, lam).array(), float)
    L /= np.linalg.norm(L)
    V = np.asarray(orbit.vertices, float)
    E = np.cross(V, np.roll(V, -1, axis=0))
    E /= np.linalg.norm(E, axis=1, keepdims=True)
    assert np.max(np.linalg.norm(np.cross(E, L), axis=1)) < 1e-7


def test_decagon_regular():
    r = dy.decagon_test(Polygon.regular(5))
    assert r.passed and r.max_deviation < 1e-12


@pytest.mark.parametrize("seed", range(6))
def test_decagon_random_convex(seed):
    r = dy.decagon_test(convex(seed), tol=1e-8)
    assert r.passed
    assert r.max_deviation < 1e-8


def test_decagon_fit_rejects_non_decagon():
    pts = np.array([[np.cos(t), np.sin(t), 1.0] for t in np.linspace(0, 1.5, 10)])
    dev, _ = dy.decagon_fit(pts[0::2], pts[1::2])
    assert dev > 1e-3


def test_iterate_batch_agrees_with_single_orbits():
    polys = np.stack([convex(s).array() for s in range(6)])
    for lam in (0.6, 2.0):
        res = dy.iterate_batch(polys, lam)
        for k in range(6):
            assert res.outcome[k] == dy.iterate_orbit(convex(k), lam).stop


def test_julia_phi_uniform():
    img = dy.julia_raster(PHI_F, resolution=(32, 32), max_iter=5)
    assert img.histogram() == {"ConvergedRegular": 32 * 32}


def test_julia_zero_never_moves():
    img = dy.julia_raster(0.0, resolution=(16, 16), max_iter=10)
    assert set(np.unique(img.codes)) <= {int(Outcome.MAX_ITERATIONS), int(Outcome.UNDEFINED)}
    assert (img.codes == int(Outcome.MAX_ITERATIONS)).sum() >= 16 * 16 - 16


def test_julia_pixel_at_half():
    img = dy.julia_raster(1.0, window=(0.0, 0.0, 1.0, 1.0), resolution=(2, 2), max_iter=50)
    assert img.pixel_center(0, 0) == (0.25, 0.75)
    assert img.pixel_center(1, 1) == (0.75, 0.25)
    single = dy.julia_raster(1.0, window=(0.4, 0.4, 0.6, 0.6), resolution=(1, 1), max_iter=50)
    assert single.pixel_center(0, 0) == pytest.approx((0.5, 0.5))
    assert single.codes[0, 0] == Outcome.REGULAR


def test_julia_deterministic_and_rejects_bad_window():
    a = dy.julia_raster(0.5, resolution=(24, 16), max_iter=40)
    b = dy.julia_raster(0.5, resolution=(24, 16), max_iter=40)
    assert a.codes.shape == (16, 24)
    assert np.array_equal(a.codes, b.codes)
    with pytest.raises(ValidationError):
        dy.julia_raster(1.0, window=(1, 0, 0, 1))


def test_julia_agrees_with_moduli_orbits():
    img = dy.julia_raster(1.0, window=(-2.0, -2.0, 2.0, 2.0), resolution=(8, 8), max_iter=60)
    for j in range(8):
        for i in range(8):
            x, y = img.pixel_center(i, j)
            orbit = dy.iterate_orbit(ModuliPoint(x, y), 1.0, max_steps=60)
            code = Outcome(int(img.codes[j, i]))
            entered = any(0 < s.x < 1 and 0 < s.y < 1 for s in orbit.steps if s.defined and s.x is not None)
            if orbit.stop == Outcome.UNDEFINED and not entered:
                assert code == Outcome.UNDEFINED
            elif entered or orbit.stop == Outcome.REGULAR:
                assert code == Outcome.REGULAR
