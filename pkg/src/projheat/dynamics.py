"""Orbits of H_lambda: iteration, classification, collapse points, the two-cycle test and Julia rasters.

Polygon orbits run in floating point. Each iterate is renormalized by the
projective map sending its first four vertices to the square, and the
accumulated inverse map is kept separately. That keeps the construction well
conditioned while the actual polygon shrinks to a point or flattens to a line.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from . import scalar as sc
from .errors import Inconclusive, OutOfRange, UndefinedAt, ValidationError
from .moduli import (
    REGULAR,
    STAR_REGULAR,
    ModuliPoint,
    energy,
    heat_moduli,
    psi,
    P_POLY,
    Q_POLY,
    R_POLY,
)
from .polygon import Polygon, is_infinite
from .projective import HomLine, HomPoint

PHI_F = (1 + math.sqrt(5)) / 2


class Outcome(enum.IntEnum):
    """Orbit outcomes; the integer values are the raster codes."""

    REGULAR = 0
    STAR_REGULAR = 1
    POINT = 2
    LINE = 3
    TWO_CYCLE = 4
    UNDEFINED = 5
    MAX_ITERATIONS = 6


OUTCOME_NAMES = {
    Outcome.REGULAR: "ConvergedRegular",
    Outcome.STAR_REGULAR: "ConvergedStarRegular",
    Outcome.POINT: "CollapsedToPoint",
    Outcome.LINE: "DegeneratedToLine",
    Outcome.TWO_CYCLE: "TwoCycleDecagon",
    Outcome.UNDEFINED: "Undefined",
    Outcome.MAX_ITERATIONS: "MaxIterations",
}

COLORS = {
    Outcome.REGULAR: (255, 255, 255),
    Outcome.STAR_REGULAR: (0, 0, 0),
    Outcome.POINT: (0, 0, 255),
    Outcome.LINE: (255, 0, 0),
    Outcome.UNDEFINED: (255, 255, 0),
    Outcome.MAX_ITERATIONS: (128, 128, 128),
    Outcome.TWO_CYCLE: (0, 160, 0),
}


# -- batched polygon engine ----------------------------------------------------

_SQUARE = np.array([[-1.0, 1, 1], [1, 1, 1], [1, -1, 1], [-1, -1, 1]])


def _det(a, b, c):
    return np.einsum("...i,...i->...", a, np.cross(b, c))


def _frame_cols(S):
    """Matrices with columns mu_i s_i sending e1, e2, e3, (1,1,1) to the rows of S (..., 4, 3)."""
    s1, s2, s3, s4 = S[..., 0, :], S[..., 1, :], S[..., 2, :], S[..., 3, :]
    mu = np.stack([_det(s4, s2, s3), _det(s1, s4, s3), _det(s1, s2, s4)], axis=-1)
    cols = np.stack([s1, s2, s3], axis=-1)  # columns are s_i
    return cols * mu[..., None, :]


def _adj(M):
    c0, c1, c2 = M[..., :, 0], M[..., :, 1], M[..., :, 2]
    return np.stack([np.cross(c1, c2), np.cross(c2, c0), np.cross(c0, c1)], axis=-2)


_F_SQ = _frame_cols(_SQUARE)


def _unit_rows(W):
    n = np.linalg.norm(W, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return W / n


def _heat_batch(W, lam):
    """H_lambda on a batch ``(B, n, 3)``; same labeling as :func:`polygon.heat_map`."""
    s1 = np.roll(W, 1, axis=1)
    s2 = W
    s3 = np.roll(W, -1, axis=1)
    s4 = np.roll(W, -2, axis=1)
    d1 = _det(s4, s2, s3)
    d2 = _det(s1, s4, s3)
    d3 = _det(s1, s2, s4)
    if is_infinite(lam):
        p, q = 1.0, 0.0
    else:
        p, q = float(lam), 1.0
    B = ((q - p) * d1)[..., None] * s1 - (p * d2)[..., None] * s2 + (q * d3)[..., None] * s3
    if W.shape[1] == 5:
        B = np.roll(B, -2, axis=1)
    # relative size of the smallest window determinant flags degenerate windows
    scale = np.min(np.abs(np.stack([d1, d2, d3], axis=-1)), axis=(-1, -2))
    return _unit_rows(B), scale


def _renormalize(W, T):
    """Send the first four vertices of each polygon to the square; update actual = T W."""
    F = _frame_cols(W[:, :4, :])
    M = _F_SQ[None] @ _adj(F)  # maps W[:, i] to square_i up to scale
    W2 = np.einsum("bij,bnj->bni", M, W)
    T2 = T @ F @ _adj(_F_SQ)[None]
    T2 /= np.linalg.norm(T2, axis=(1, 2), keepdims=True)
    detF = np.abs(np.linalg.det(F / np.linalg.norm(F, axis=(1, 2), keepdims=True)))
    return _unit_rows(W2), T2, detF


def _actual(W, T):
    U = _unit_rows(np.einsum("bij,bnj->bni", T, W))
    # fix signs so that each point has nonnegative largest-magnitude coordinate
    k = np.argmax(np.abs(U), axis=-1)
    s = np.sign(np.take_along_axis(U, k[..., None], axis=-1))
    s[s == 0] = 1
    return U * s


def _chordal_diameter(U):
    c = np.linalg.norm(np.cross(U[:, :, None, :], U[:, None, :, :]), axis=-1)
    return np.max(c, axis=(1, 2))


def _line_residual(U):
    s = np.linalg.svd(U, compute_uv=False)
    with np.errstate(invalid="ignore", divide="ignore"):
        return s[:, 2] / s[:, 1]


def _vertex_gap(U, V):
    d = np.minimum(np.linalg.norm(U - V, axis=-1), np.linalg.norm(U + V, axis=-1))
    return np.max(d, axis=-1)


@dataclass
class BatchResult:
    outcome: np.ndarray      # Outcome codes per polygon
    steps: np.ndarray        # step at which the outcome was decided
    vertices: np.ndarray     # actual vertices at that step (unit vectors)
    previous: np.ndarray     # actual vertices one step earlier


def iterate_batch(polys: np.ndarray, lam, max_steps: int = 5000, tol: float = 1e-9,
                  two_cycle: bool = True) -> BatchResult:
    """Iterate H_lambda on a batch of polygons ``(B, n, 3)`` until each one is decided.

    Stop criteria per polygon, checked in this order after every step:
    undefined construction, chordal diameter < tol (point), line residual
    sigma_3/sigma_2 < tol (line), and an exact alternation ``V_k = V_{k-2}``
    within tol (two-cycle).
    """
    W = _unit_rows(np.asarray(polys, dtype=float))
    B = W.shape[0]
    T = np.tile(np.eye(3), (B, 1, 1))
    W, T, _ = _renormalize(W, T)
    outcome = np.full(B, int(Outcome.MAX_ITERATIONS))
    steps = np.full(B, max_steps)
    U0 = _actual(W, T)
    final = U0.copy()
    prev_final = U0.copy()
    hist = [U0, U0]
    active = np.ones(B, dtype=bool)
    for k in range(1, max_steps + 1):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        Wk, scale = _heat_batch(W[idx], lam)
        bad = ~np.all(np.isfinite(Wk), axis=(1, 2)) | (scale < 1e-13)
        Wk = np.where(bad[:, None, None], W[idx], Wk)
        Wn, Tn, detF = _renormalize(Wk, T[idx])
        bad |= ~np.all(np.isfinite(Wn), axis=(1, 2)) | (detF < 1e-13)
        Wn = np.where(bad[:, None, None], W[idx], Wn)
        Tn = np.where(bad[:, None, None], T[idx], Tn)
        W[idx], T[idx] = Wn, Tn
        U = _actual(Wn, Tn)
        diam = _chordal_diameter(U)
        res = _line_residual(U)
        gap2 = _vertex_gap(U, hist[-2][idx])
        gap1 = _vertex_gap(U, hist[-1][idx])
        dec = np.full(len(idx), -1)
        dec[bad] = Outcome.UNDEFINED
        free = dec < 0
        dec[free & (diam < tol)] = Outcome.POINT
        free = dec < 0
        dec[free & (res < tol)] = Outcome.LINE
        free = dec < 0
        if two_cycle:
            cyc = (gap2 < tol) & (gap1 > math.sqrt(tol)) & (diam > math.sqrt(tol)) & (res > math.sqrt(tol))
            dec[free & cyc] = Outcome.TWO_CYCLE
        done = dec >= 0
        prev_full = hist[-1].copy()
        new_full = hist[-1].copy()
        new_full[idx] = U
        hist = [hist[-1], new_full]
        gi = idx[done]
        outcome[gi] = dec[done]
        steps[gi] = k
        final[gi] = U[done]
        prev_final[gi] = prev_full[gi]
        active[gi] = False
    rest = np.nonzero(active)[0]
    final[rest] = hist[-1][rest]
    prev_final[rest] = hist[-2][rest]
    return BatchResult(outcome, steps, final, prev_final)


# -- single orbits with a full record --------------------------------------------

@dataclass
class StepRecord:
    step: int
    x: float | None
    y: float | None
    energy: float | None
    diameter: float
    residual: float
    defined: bool


@dataclass
class OrbitRecord:
    """Per-step log of an orbit plus the reason it stopped."""

    lam: object
    kind: str  # "polygon" or "moduli"
    steps: list = field(default_factory=list)
    stop: Outcome = Outcome.MAX_ITERATIONS
    vertices: np.ndarray | None = None   # actual vertices at the last step
    previous: np.ndarray | None = None   # actual vertices one step earlier
    final_moduli: ModuliPoint | None = None

    def __len__(self):
        return len(self.steps)


def _moduli_of_array(U: np.ndarray):
    try:
        m = psi(Polygon.from_array(U))
        e = energy(m)
        return float(m.x), float(m.y), float(e)
    except Exception:
        return None, None, None


def _fixed_points(sample):
    """Regular and star-regular moduli in the number type of ``sample``."""
    if isinstance(sample, mpmath.mpf):
        phi = (1 + mpmath.sqrt(5)) / 2
        return (1 / phi, 1 / phi), (-phi, -phi)
    r, s = float(REGULAR.x), float(STAR_REGULAR.x)
    return (r, r), (s, s)


def _dist(m, ref):
    return ((m.x - ref[0]) ** 2 + (m.y - ref[1]) ** 2) ** 0.5


def _iterate_moduli(m, lam, max_steps, tol) -> OrbitRecord:
    """Moduli orbit in floats, or in mpmath precision when the seed is given as mpf."""
    rec = OrbitRecord(lam=lam, kind="moduli")
    x, y = tuple(m)
    if not (isinstance(x, mpmath.mpf) or isinstance(y, mpmath.mpf)):
        x, y = float(x), float(y)
        lam = lam if is_infinite(lam) else float(lam)
    elif not is_infinite(lam):
        lam = mpmath.mpf(lam) if not isinstance(lam, sc.QSqrt5) else mpmath.mpf(lam.a) + mpmath.mpf(lam.b) * mpmath.sqrt(5)
    m = ModuliPoint(x, y)
    reg, star = _fixed_points(x)

    def log(k, m):
        try:
            e = energy(m)
        except UndefinedAt:
            e = None
        rec.steps.append(StepRecord(k, m.x, m.y, e, math.nan, math.nan, True))

    log(0, m)
    rec.final_moduli = m
    for k in range(1, max_steps + 1):
        try:
            m = heat_moduli(m, lam)
            ok = all(math.isfinite(float(v)) for v in m)
        except (UndefinedAt, ZeroDivisionError):
            ok = False
        if not ok:
            rec.steps.append(StepRecord(k, None, None, None, math.nan, math.nan, False))
            rec.stop = Outcome.UNDEFINED
            return rec
        log(k, m)
        rec.final_moduli = m
        if _dist(m, reg) < tol:
            rec.stop = Outcome.REGULAR
            return rec
        if _dist(m, star) < tol:
            rec.stop = Outcome.STAR_REGULAR
            return rec
    return rec


def iterate_orbit(start, lam, max_steps: int = 5000, tol: float = 1e-9) -> OrbitRecord:
    """Iterate H_lambda from a polygon or a moduli point, logging every step."""
    if isinstance(start, Polygon):
        return _iterate_polygon(start, lam, max_steps, tol)
    if isinstance(start, ModuliPoint) or (isinstance(start, Sequence) and len(start) == 2):
        return _iterate_moduli(start, lam, max_steps, tol)
    raise TypeError("start must be a Polygon or a ModuliPoint")


def _iterate_polygon(P: Polygon, lam, max_steps, tol) -> OrbitRecord:
    rec = OrbitRecord(lam=lam, kind="polygon")
    pent = len(P) == 5
    W = _unit_rows(P.array()[None])
    T = np.eye(3)[None]
    W, T, _ = _renormalize(W, T)
    U = _actual(W, T)
    hist = [U, U]

    def log(k, U, defined=True):
        # moduli are projective invariants, so read them off the well-conditioned W
        if pent and defined:
            x, y, e = _moduli_of_array(W[0])
        else:
            x = y = e = None
        rec.steps.append(StepRecord(k, x, y, e, float(_chordal_diameter(U)[0]),
                                    float(_line_residual(U)[0]), defined))

    log(0, U)
    rec.vertices, rec.previous = U[0], U[0]
    for k in range(1, max_steps + 1):
        Wk, scale = _heat_batch(W, lam)
        ok = np.all(np.isfinite(Wk)) and scale[0] >= 1e-13
        if ok:
            Wn, Tn, detF = _renormalize(Wk, T)
            ok = np.all(np.isfinite(Wn)) and detF[0] >= 1e-13
        if not ok:
            rec.steps.append(StepRecord(k, None, None, None, math.nan, math.nan, False))
            rec.stop = Outcome.UNDEFINED
            return rec
        W, T = Wn, Tn
        U = _actual(W, T)
        log(k, U)
        rec.previous, rec.vertices = hist[-1][0], U[0]
        s = rec.steps[-1]
        gap2 = _vertex_gap(U, hist[-2])[0]
        gap1 = _vertex_gap(U, hist[-1])[0]
        hist = [hist[-1], U]
        if s.diameter < tol:
            rec.stop = Outcome.POINT
            break
        if s.residual < tol:
            rec.stop = Outcome.LINE
            break
        rt = math.sqrt(tol)
        if gap2 < tol and gap1 > rt and s.diameter > rt and s.residual > rt:
            rec.stop = Outcome.TWO_CYCLE
            break
    if pent and rec.steps[-1].x is not None:
        rec.final_moduli = ModuliPoint(rec.steps[-1].x, rec.steps[-1].y)
    return rec


@dataclass(frozen=True)
class OrbitClassification:
    """One orbit outcome with its witness (point, line, polygon pair, step or moduli)."""

    outcome: Outcome
    witness: object
    step: int
    moduli_limit: Outcome | None = None

    @property
    def name(self) -> str:
        return OUTCOME_NAMES[self.outcome]

    def __str__(self):
        extra = f", moduli -> {OUTCOME_NAMES[self.moduli_limit]}" if self.moduli_limit is not None else ""
        return f"{self.name} at step {self.step}: {self.witness}{extra}"


def _moduli_limit(m: ModuliPoint | None, tol: float = 1e-6):
    if m is None:
        return None
    if m.distance(REGULAR.to_float()) < tol:
        return Outcome.REGULAR
    if m.distance(STAR_REGULAR.to_float()) < tol:
        return Outcome.STAR_REGULAR
    return None


def classify(orbit: OrbitRecord, lam=None) -> OrbitClassification:
    """Turn a finished orbit into an outcome; raises Inconclusive if it never stopped."""
    step = orbit.steps[-1].step
    if orbit.stop == Outcome.MAX_ITERATIONS:
        raise Inconclusive(f"no stop criterion met within {step} steps")
    if orbit.stop == Outcome.UNDEFINED:
        return OrbitClassification(Outcome.UNDEFINED, step, step)
    if orbit.kind == "moduli":
        return OrbitClassification(orbit.stop, orbit.final_moduli, step, orbit.stop)
    limit = _moduli_limit(orbit.final_moduli)
    U = orbit.vertices
    if orbit.stop == Outcome.POINT:
        return OrbitClassification(Outcome.POINT, HomPoint(*U[0]), step, limit)
    if orbit.stop == Outcome.LINE:
        return OrbitClassification(Outcome.LINE, _fit_line(U), step, limit)
    pair = (Polygon.from_array(orbit.previous), Polygon.from_array(U))
    return OrbitClassification(Outcome.TWO_CYCLE, pair, step, limit)


def _fit_line(U: np.ndarray) -> HomLine:
    _, _, vt = np.linalg.svd(U)
    return HomLine(*vt[-1])


def _check_range(lam, kind: str):
    if is_infinite(lam):
        raise OutOfRange("lambda = inf is not in the collapse or degeneration range")
    v = float(lam)
    inv = 1 / PHI_F
    collapse = (0 < v < PHI_F) or (v < -inv)
    degen = (v > PHI_F) or (-inv < v < 0)
    if kind == "collapse" and not collapse:
        raise OutOfRange(f"lambda = {v} is not in (0, phi) or (-inf, -1/phi)")
    if kind == "line" and not degen:
        raise OutOfRange(f"lambda = {v} is not in (phi, inf) or (-1/phi, 0)")


def collapse_point(P: Polygon, lam, tol: float = 1e-9, vertex: int = 0,
                   max_steps: int = 20000) -> HomPoint:
    """Limit point of the traced vertex under iteration of H_lambda."""
    _check_range(lam, "collapse")
    rec = iterate_orbit(P, lam, max_steps=max_steps, tol=tol)
    if rec.stop != Outcome.POINT:
        raise Inconclusive(f"orbit ended with {OUTCOME_NAMES[rec.stop]}, not a collapse")
    return HomPoint(*rec.vertices[vertex % len(P)])


def degeneration_line(P: Polygon, lam, tol: float = 1e-9, max_steps: int = 20000) -> HomLine:
    """Least-squares line through late iterates once the residual ratio is below tol."""
    _check_range(lam, "line")
    rec = iterate_orbit(P, lam, max_steps=max_steps, tol=tol)
    if rec.stop != Outcome.LINE:
        raise Inconclusive(f"orbit ended with {OUTCOME_NAMES[rec.stop]}, not a line")
    return _fit_line(rec.vertices)


# -- the two-cycle at lambda = phi ---------------------------------------------

@dataclass(frozen=True)
class DecagonResult:
    passed: bool
    max_deviation: float
    even: Polygon | None = None
    odd: Polygon | None = None
    transform: np.ndarray | None = None


def _dlt(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Homography H with H src_i ~ dst_i in the least-squares algebraic sense."""
    rows = []
    for s, d in zip(src, dst):
        # d x (H s) = 0 gives two independent equations
        x, y, w = d
        rows.append(np.concatenate([np.zeros(3), -w * s, y * s]))
        rows.append(np.concatenate([w * s, np.zeros(3), -x * s]))
        rows.append(np.concatenate([-y * s, x * s, np.zeros(3)]))
    _, _, vt = np.linalg.svd(np.array(rows))
    return vt[-1].reshape(3, 3)


def _decagon_points() -> np.ndarray:
    t = np.pi * np.arange(10) / 5
    return np.column_stack([np.cos(t), np.sin(t), np.ones(10)])


def decagon_fit(even: np.ndarray, odd: np.ndarray) -> tuple[float, np.ndarray]:
    """Best projective fit of the 10 combined vertices to the regular decagon."""
    D = _decagon_points()
    even = _unit_rows(np.asarray(even, dtype=float))
    odd = _unit_rows(np.asarray(odd, dtype=float))
    best = (math.inf, None)
    for s in (1, -1):
        for r in (1, 3, 5, 7, 9):
            tgt_e = D[[(2 * s * j) % 10 for j in range(5)]]
            tgt_o = D[[(2 * s * j + r) % 10 for j in range(5)]]
            src = np.vstack([even, odd])
            dst = np.vstack([tgt_e, tgt_o])
            H = _dlt(src, dst)
            img = src @ H.T
            with np.errstate(invalid="ignore", divide="ignore"):
                aff = img[:, :2] / img[:, 2:3]
            dev = float(np.max(np.linalg.norm(aff - dst[:, :2], axis=1)))
            if dev < best[0]:
                best = (dev, H)
    return best


def decagon_test(P: Polygon, tol: float = 1e-8, max_steps: int = 100) -> DecagonResult:
    """Check that the even and odd limits of H_phi together form a projectively regular decagon."""
    if len(P) != 5:
        raise ValidationError("the decagon test is for pentagons")
    W = _unit_rows(P.array()[None])
    T = np.eye(3)[None]
    W, T, _ = _renormalize(W, T)
    hist = [_actual(W, T)]
    for _ in range(max_steps):
        Wk, scale = _heat_batch(W, PHI_F)
        if not np.all(np.isfinite(Wk)) or scale[0] < 1e-13:
            return DecagonResult(False, math.inf)
        W, T, _ = _renormalize(Wk, T)
        hist.append(_actual(W, T))
        if len(hist) >= 3 and _vertex_gap(hist[-1], hist[-3])[0] < 1e-13:
            break
    even, odd = hist[-1][0], hist[-2][0]
    if len(hist) % 2 == 0:  # hist[-1] is an odd iterate
        even, odd = odd, even
    dev, H = decagon_fit(even, odd)
    return DecagonResult(dev <= tol, dev, Polygon.from_array(even), Polygon.from_array(odd), H)


# -- Julia rasters -------------------------------------------------------------------

def _poly_eval_arrays(poly, x, y, lam):
    """Evaluate a (x, y, lambda) integer polynomial on arrays; lambda may be infinite."""
    if is_infinite(lam):
        top = poly.coefficients_in(2)[3]
        terms = [(e[0], e[1], 0, c) for e, c in top.terms.items()]
        lv = 1.0
    else:
        terms = [(e[0], e[1], e[2], c) for e, c in poly.terms.items()]
        lv = float(lam)
    out = np.zeros_like(x)
    for i, j, k, c in terms:
        out = out + float(c) * x**i * y**j * lv**k
    return out


@dataclass
class RasterImage:
    """Per-pixel outcome codes for a rectangle of the moduli plane; row 0 is the top row."""

    width: int
    height: int
    window: tuple
    codes: np.ndarray

    def pixel_center(self, i: int, j: int) -> tuple:
        x0, y0, x1, y1 = self.window
        return (x0 + (i + 0.5) * (x1 - x0) / self.width,
                y1 - (j + 0.5) * (y1 - y0) / self.height)

    def rgb(self) -> np.ndarray:
        img = np.zeros((self.height, self.width, 3), dtype=np.uint8)
        for code, color in COLORS.items():
            img[self.codes == int(code)] = color
        return img

    def histogram(self) -> dict:
        vals, counts = np.unique(self.codes, return_counts=True)
        return {OUTCOME_NAMES[Outcome(int(v))]: int(c) for v, c in zip(vals, counts)}


def julia_raster(lam, window=(-3.0, -3.0, 3.0, 3.0), resolution=(64, 64),
                 max_iter: int = 100, tol: float = 1e-9) -> RasterImage:
    """Classify every pixel's moduli orbit under H_lambda.

    A seed that reaches the open unit square is a convex class, so it is
    counted as converging (to the regular class for lambda > 0, the star
    class for lambda < 0). At lambda = 0 and infinity the map is the identity
    and that shortcut is not taken.
    """
    x0, y0, x1, y1 = (float(v) for v in window)
    if not (x1 > x0 and y1 > y0):
        raise ValidationError("window must satisfy x0 < x1 and y0 < y1")
    W, H = resolution
    if W <= 0 or H <= 0:
        raise ValidationError("resolution must be positive")
    xs = x0 + (np.arange(W) + 0.5) * (x1 - x0) / W
    ys = y1 - (np.arange(H) + 0.5) * (y1 - y0) / H
    X, Y = np.meshgrid(xs, ys)
    X, Y = X.ravel().copy(), Y.ravel().copy()
    codes = np.full(X.shape, int(Outcome.MAX_ITERATIONS))
    active = np.ones(X.shape, dtype=bool)
    ident = is_infinite(lam) or float(lam) == 0.0
    if not ident:
        conv = Outcome.REGULAR if float(lam) > 0 else Outcome.STAR_REGULAR
    r = float(REGULAR.x)
    s = float(STAR_REGULAR.x)
    eps = sc.EPS

    def settle(mask_codes):
        nonlocal active
        near_r = active & (np.hypot(X - r, Y - r) < tol)
        codes[near_r] = Outcome.REGULAR
        active &= ~near_r
        near_s = active & (np.hypot(X - s, Y - s) < tol)
        codes[near_s] = Outcome.STAR_REGULAR
        active &= ~near_s
        if not ident:
            inside = active & (X > 0) & (X < 1) & (Y > 0) & (Y < 1)
            codes[inside] = conv
            active &= ~inside

    settle(codes)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        x, y = X[idx], Y[idx]
        pxy, pyx = _poly_eval_arrays(P_POLY, x, y, lam), _poly_eval_arrays(P_POLY, y, x, lam)
        qxy, qyx = _poly_eval_arrays(Q_POLY, x, y, lam), _poly_eval_arrays(Q_POLY, y, x, lam)
        rxy, ryx = _poly_eval_arrays(R_POLY, x, y, lam), _poly_eval_arrays(R_POLY, y, x, lam)
        scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y))) ** 4
        if not ident:
            scale = scale * max(1.0, abs(float(lam))) ** 3
        bad = ((np.abs(qxy) <= eps * scale) | (np.abs(qyx) <= eps * scale)
               | (np.abs(rxy) <= eps * scale) | (np.abs(ryx) <= eps * scale))
        with np.errstate(all="ignore"):
            nx = pxy * rxy / (qxy * ryx)
            ny = pyx * ryx / (qyx * rxy)
        bad |= ~(np.isfinite(nx) & np.isfinite(ny))
        codes[idx[bad]] = Outcome.UNDEFINED
        active[idx[bad]] = False
        good = idx[~bad]
        X[good], Y[good] = nx[~bad], ny[~bad]
        settle(codes)
    return RasterImage(W, H, (x0, y0, x1, y1), codes.reshape(H, W))


# -- file formats -----------------------------------------------------------------------

def write_ppm(img: RasterImage, path) -> None:
    rgb = img.rgb()
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.width} {img.height}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary P6 file into an ``(height, width, 3)`` uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while data[pos:pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise ValidationError("not a binary PPM (P6) file")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValidationError("only 8-bit PPM files are supported")
    pixels = data[pos + 1: pos + 1 + 3 * w * h]
    if len(pixels) != 3 * w * h:
        raise ValidationError("truncated PPM data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w, 3)


CSV_HEADER = ["step", "x", "y", "energy", "diameter", "residual", "defined"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def write_orbit_csv(orbit: OrbitRecord, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for s in orbit.steps:
            w.writerow([_fmt(s.step), _fmt(s.x), _fmt(s.y), _fmt(s.energy),
                        _fmt(s.diameter), _fmt(s.residual), _fmt(s.defined)])


def read_orbit_csv(path) -> list[StepRecord]:
    def opt(v):
        return None if v == "" else float(v)

    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected orbit log header {header}")
        for row in r:
            if len(row) != len(CSV_HEADER):
                raise ValidationError(f"orbit log row has {len(row)} fields")
            out.append(StepRecord(int(row[0]), opt(row[1]), opt(row[2]), opt(row[3]),
                                  opt(row[4]), opt(row[5]), row[6] == "1"))
    return out
