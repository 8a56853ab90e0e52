"""The acceptance suite: twelve numbered checks, each returning PASS or FAIL with details.

Used by ``tests/test_acceptance.py`` and by the ``verify`` subcommand.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import scalar as sc
from .dynamics import Outcome, decagon_test, iterate_batch, iterate_orbit
from .errors import CannotCertify, UndefinedAt
from .moduli import (
    P_POLY,
    Q_POLY,
    R_POLY,
    ModuliPoint,
    basis_frame_coords,
    center_map,
    derivative_scale,
    energy,
    heat_moduli,
    psi,
    star_center_map,
)
from .polygon import heat_map, is_convex
from .polynomial import MultiPoly, divide_exact
from .posdom import (
    certify_collinearity,
    energy_gap,
    extract_lambda_coefficients,
    prove_positive,
    spot_check,
    triangle_positivity_pipeline,
)
from .projective import HomPoint
from .sampling import random_convex_polygon, random_generic_pentagon
from .scalar import PHI, PHI_INV, SQRT5


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"


# -- displayed formulas used as reference data -------------------------------------------

def displayed_constant_map_factors():
    """The factored P, Q, R at lambda = phi as printed, over Q(sqrt 5)."""
    x, y = (v.to_qsqrt5() for v in MultiPoly.variables(2))
    return {
        "P": (y + PHI) * (x * y + y * PHI_INV - PHI) * SQRT5,
        "Q": (y + PHI) * (x * y + x * PHI_INV - PHI) * (PHI * SQRT5),
        "R": (x * y - PHI) * (x * y + x * PHI_INV - PHI) * (PHI * SQRT5),
    }


def specialize_lambda(p: MultiPoly, lam) -> MultiPoly:
    x, y = (v.to_qsqrt5() for v in MultiPoly.variables(2))
    return p.to_qsqrt5().compose([x, y, MultiPoly.constant(sc.to_qsqrt5(lam), 2)])


def displayed_half_values():
    """The printed factorizations of N and D at x = y = 1/2, as sympy expressions in l."""
    import sympy

    l = sympy.Symbol("l")
    n = (sympy.Rational(1, 1048576) * (l + 1) * (3 * l + 2) * (4 * l + 3) * (2 * l**2 + 8 * l + 3) ** 2
         * (4 * l**6 + 36 * l**5 + 91 * l**4 + 160 * l**3 + 169 * l**2 + 86 * l + 16))
    d = (sympy.Rational(3, 262144) * (l + 1) * (3 * l + 2) ** 2 * (l**2 + 6 * l + 3)
         * (2 * l**2 + 8 * l + 3) ** 2 * (2 * l**3 + 12 * l**2 + 13 * l + 4) ** 2)
    return l, n, d


def displayed_n0_n13():
    """Printed N_0 and N_13 including their simple factors."""
    x, y = MultiPoly.variables(2)
    c0 = (x - x**2 + y - 7*x*y + 6*x**2*y + x**3*y - y**2 + 6*x*y**2 - 2*x**2*y**2 - 5*x**3*y**2
          - x**4*y**2 + x*y**3 - 5*x**2*y**3 + 6*x**3*y**3 + x**4*y**3 - x**2*y**4 + x**3*y**4 - x**4*y**4)
    c13 = (1 - x + x**2 - y - 6*x*y + 5*x**2*y - x**3*y + y**2 + 5*x*y**2 + 2*x**2*y**2 - 4*x**3*y**2
           - x*y**3 - 4*x**2*y**3 + x**3*y**3 + x**4*y**3 + x**3*y**4)
    n0 = 2 * (1 - x) * x * (1 - y) * y * (1 - x * y) ** 2 * c0
    n13 = 2 * (1 - x) ** 2 * x**2 * (1 - y) ** 2 * y**2 * (1 - x * y) * c13
    return n0, n13


def _poly_at(p: MultiPoly, x, y):
    """Lambda-polynomial of p at fixed exact (x, y), as a sympy expression in l."""
    import sympy

    l = sympy.Symbol("l")
    out = 0
    for k, c in enumerate(p.coefficients_in(2)):
        v = Fraction(c(x, y))
        out += sympy.Rational(v.numerator, v.denominator) * l**k
    return out


# -- criteria -----------------------------------------------------------------------------

def criterion_1(rng, count=1000):
    worst = 0.0
    target_r, target_s = float(PHI_INV), -float(PHI)
    for _ in range(count):
        P = random_generic_pentagon(rng)
        a = psi(heat_map(P, float(PHI)))
        b = psi(heat_map(P, -float(PHI_INV)))
        worst = max(worst, abs(a.x - target_r), abs(a.y - target_r), abs(b.x - target_s), abs(b.y - target_s))
    shown = displayed_constant_map_factors()
    actual = {"P": specialize_lambda(P_POLY, PHI), "Q": specialize_lambda(Q_POLY, PHI),
              "R": specialize_lambda(R_POLY, PHI)}
    holds = {k: actual[k] == shown[k] for k in "PQR"}
    ok = worst <= 1e-9 and all(holds.values())
    ids = ", ".join(f"{k}_phi {'holds' if v else 'does not hold'}" for k, v in holds.items())
    return ok, f"max moduli error {worst:.1e} over {count} pentagons; displayed identities: {ids}"


def _near_pole(m, lam) -> bool:
    x, y = m
    vals = [Q_POLY(x, y, lam), Q_POLY(y, x, lam), R_POLY(x, y, lam), R_POLY(y, x, lam)]
    scale = max(1.0, abs(lam)) ** 3
    return min(abs(v) for v in vals) < 1e-6 * scale


def criterion_2(rng, count=1000):
    # error measured relative to max(1, |value|): near a pole the outputs are large
    worst = 0.0
    worst_abs = 0.0
    done = 0
    while done < count:
        P = random_convex_polygon(rng)
        lam = float(rng.uniform(-5, 5))
        m = psi(P)
        if _near_pole(m, lam):
            continue
        a = psi(heat_map(P, lam))
        b = heat_moduli(m, lam)
        for u, v in ((a.x, b.x), (a.y, b.y)):
            worst_abs = max(worst_abs, abs(u - v))
            worst = max(worst, abs(u - v) / max(1.0, abs(v)))
        done += 1
    return worst <= 1e-9, (f"max scaled error {worst:.1e} (absolute {worst_abs:.1e}) "
                           f"over {count} samples")


def criterion_3(rng, count=1000):
    failures = 0
    for i in range(count):
        n = 5 + i % 8
        P = random_convex_polygon(rng, n)
        lam = float(rng.uniform(0, 10)) or 10.0
        if not is_convex(heat_map(P, lam)):
            failures += 1
    return failures == 0, f"{failures} non-convex images among {count} convex n-gons, n = 5..12"


def criterion_4(rng, count=10_000):
    failures = 0
    rechecked = 0
    r = float(PHI_INV)
    done = 0
    while done < count:
        x, y = rng.uniform(0, 1, 2)
        if math.hypot(x - r, y - r) <= 1e-6:
            continue
        lam = float(10 ** rng.uniform(-3, 3))
        m = ModuliPoint(float(x), float(y))
        try:
            gain = energy(heat_moduli(m, lam)) - energy(m)
        except UndefinedAt:
            gain = 0.0
        if not gain > 0:
            # settle borderline float results exactly
            rechecked += 1
            me = ModuliPoint(Fraction(x), Fraction(y))
            le = Fraction(lam)
            if not energy(heat_moduli(me, le)) - energy(me) > 0:
                failures += 1
        done += 1
    return failures == 0, f"{failures} non-increases among {count} samples ({rechecked} settled exactly)"


def criterion_5(rng):
    h = 1e-6
    r = float(PHI_INV)
    worst = 0.0
    for lam in (0.1, 0.5, 1.0, 2.0, 5.0):
        s = float(derivative_scale(lam))
        J = np.zeros((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            a = heat_moduli(ModuliPoint(r + e[0], r + e[1]), lam)
            b = heat_moduli(ModuliPoint(r - e[0], r - e[1]), lam)
            J[:, j] = [(a.x - b.x) / (2 * h), (a.y - b.y) / (2 * h)]
        worst = max(worst, float(np.max(np.abs(J - s * np.eye(2)))))
    with mpmath.workdps(60):
        seed = ModuliPoint(mpmath.mpf("0.3"), mpmath.mpf("0.8"))
        orbit = iterate_orbit(seed, 1, max_steps=200, tol=mpmath.mpf(10) ** -45)
        phi = (1 + mpmath.sqrt(5)) / 2
        d = [mpmath.sqrt((st.x - 1 / phi) ** 2 + (st.y - 1 / phi) ** 2) for st in orbit.steps]
        ratios = [float(d[k + 1] / d[k]) for k in range(len(d) - 11, len(d) - 1)]
    s1 = float(derivative_scale(1))
    dev = max(abs(q - s1) for q in ratios)
    ok = worst <= 1e-6 and dev <= 1e-3
    return ok, f"max |J - sI| = {worst:.1e}; last 10 contraction ratios at lambda=1 within {dev:.1e} of s(1) = {s1:.6f}"


def criterion_6(rng=None):
    import sympy

    gap = energy_gap()
    half = Fraction(1, 2)
    l, n_shown, d_shown = displayed_half_values()
    n_ratio = sympy.cancel(_poly_at(gap.N, half, half) / n_shown)
    d_ratio = sympy.cancel(_poly_at(gap.D, half, half) / d_shown)
    n_ok = not n_ratio.has(l)
    d_ok = not d_ratio.has(l)
    detail = f"N(1/2,1/2)/shown = {n_ratio}; D(1/2,1/2)/shown = {d_ratio}"
    return n_ok and d_ok, detail


def criterion_7(rng=None):
    gap = energy_gap()
    coeffs = extract_lambda_coefficients(gap.N)
    depths = []
    for q in coeffs:
        try:
            depths.append(triangle_positivity_pipeline(q).depth)
        except CannotCertify as exc:
            return False, f"N_{len(depths)} failed: {exc}"
    n0, n13 = displayed_n0_n13()
    try:
        divide_exact(coeffs[0], n0)
        divide_exact(coeffs[13], n13)
        divides = True
    except Exception:
        divides = False
    ok = len(coeffs) == 14 and max(depths) <= 4 and divides
    return ok, (f"{len(coeffs)} coefficients certified, depths {depths} (max {max(depths)}); "
                f"displayed N_0, N_13 divide exactly: {divides}")


def criterion_8(rng=None):
    try:
        certs = certify_collinearity(max_depth=0)
    except CannotCertify as exc:
        return False, str(exc)
    for c in certs:
        c.certificate.replay()
    depth = max(c.certificate.depth for c in certs)
    masks = ", ".join(f"{c.part} l^{c.power} mask {''.join(map(str, c.certificate.mask))}" for c in certs)
    return depth == 0, f"{len(certs)} coefficient certificates at depth {depth} ({masks})"


def criterion_9(rng, count=200):
    pentagons = [random_generic_pentagon(rng) for _ in range(count)]
    batch = np.stack([P.array() for P in pentagons])
    out = []
    for lam, formula, name in ((float(PHI_INV), center_map, "Center"),
                               (-float(PHI), star_center_map, "Center*")):
        res = iterate_batch(batch, lam, tol=1e-12)
        worst = 0.0
        missed = int(np.sum(res.outcome != Outcome.POINT))
        for i, P in enumerate(pentagons):
            T, (x, y) = basis_frame_coords(P)
            got = T.apply(HomPoint(*res.vertices[i, 0])).to_affine()
            want = formula(x, y)
            worst = max(worst, abs(got[0] - want[0]), abs(got[1] - want[1]))
        out.append((missed, worst, name))
    ok = all(m == 0 and w <= 1e-6 for m, w, _ in out)
    return ok, "; ".join(f"{name}: max deviation {w:.1e}, {m} non-collapsing" for m, w, name in out)


def criterion_10(rng, count=200):
    worst = 0.0
    fails = 0
    for _ in range(count):
        res = decagon_test(random_convex_polygon(rng), tol=1e-8)
        worst = max(worst, res.max_deviation)
        fails += not res.passed
    import sympy

    c = sympy.nsimplify(sympy.cos(sympy.pi / 5))
    ca, cb = (sympy.Rational(v) for v in sympy.Poly(sympy.expand(c), sympy.sqrt(5)).all_coeffs()[::-1])
    cos_exact = sc.QSqrt5(Fraction(int(ca.p), int(ca.q)), Fraction(int(cb.p), int(cb.q)))
    half = PHI / 2
    chebyshev = 16 * half**5 - 20 * half**3 + 5 * half  # cos(5t) at cos(t) = phi/2
    exact_ok = 2 * cos_exact == PHI and chebyshev == -1
    return fails == 0 and exact_ok, (f"{fails} failures among {count}, max deviation {worst:.1e}; "
                                     f"2cos(pi/5) == phi exactly: {exact_ok}")


RANGES = {
    Outcome.POINT: (0.3, 1.0, 1.5),
    Outcome.LINE: (1.7, 2.0, 5.0),
}


def criterion_11(rng, count=100):
    polys = np.stack([random_convex_polygon(rng).array() for _ in range(count)])
    bad = []
    for expected, lams in RANGES.items():
        for lam in lams:
            for value in (lam, -1 / lam):
                res = iterate_batch(polys, value, max_steps=20000)
                wrong = int(np.sum(res.outcome != expected))
                if wrong:
                    bad.append(f"lambda={value:.4g}: {wrong}")
    return not bad, ("all 12 parameters x 100 pentagons classified as expected" if not bad
                     else "misclassified: " + ", ".join(bad))


def criterion_12(rng, total_samples=100_000):
    x, = MultiPoly.variables(1)
    quad = prove_positive(x * x - 2 * x + Fraction(11, 10), variant="SPD")
    certs = [quad]
    certs += [c.certificate for c in certify_collinearity(max_depth=0)]
    gap = energy_gap()
    for q in extract_lambda_coefficients(gap.N)[::4]:
        certs += [p.certificate for p in triangle_positivity_pipeline(q).pieces]
    # random positive polynomials on boxes
    prng = random.Random(int(rng.integers(1 << 30)))
    for _ in range(10):
        a, b = MultiPoly.variables(2)
        c = Fraction(prng.randint(1, 9), 10)
        p = (a - Fraction(prng.randint(1, 9), 10)) ** 2 + (b - Fraction(prng.randint(1, 9), 10)) ** 2 * c + Fraction(1, 50)
        certs.append(prove_positive(p, variant="WPD"))
    leaves = sum(len(c.leaves) for c in certs)
    per_leaf = max(1, -(-total_samples // leaves))
    checked = 0
    try:
        for i, c in enumerate(certs):
            checked += spot_check(c, samples_per_leaf=per_leaf, seed=i)
    except CannotCertify as exc:
        return False, f"counterexample found: {exc}"
    ok = checked >= total_samples and quad.depth >= 1
    return ok, (f"{checked} exact samples in {leaves} leaves of {len(certs)} certificates, no counterexample; "
                f"x^2-2x+1.1 certified at depth {quad.depth}")


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "constant-map parameters", criterion_1),
    (2, "geometric and algebraic heat map agree", criterion_2),
    (3, "convexity preserved", criterion_3),
    (4, "energy strictly increases", criterion_4),
    (5, "derivative at the regular class", criterion_5),
    (6, "N and D at (1/2, 1/2)", criterion_6),
    (7, "positivity of the N_i on the triangle", criterion_7),
    (8, "collinearity determinant certificates", criterion_8),
    (9, "collapse point equals the center formula", criterion_9),
    (10, "two-cycle forms a regular decagon", criterion_10),
    (11, "collapse and degeneration ranges", criterion_11),
    (12, "certificate soundness", criterion_12),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    num, title, fn = CRITERIA[number - 1]
    rng = np.random.default_rng(seed + num)
    start = time.perf_counter()
    passed, detail = fn(rng)
    return CriterionResult(num, title, bool(passed), detail, time.perf_counter() - start)


def run_all(seed: int = 0, only=None) -> list[CriterionResult]:
    numbers = only or range(1, len(CRITERIA) + 1)
    return [run_criterion(n, seed) for n in numbers]
