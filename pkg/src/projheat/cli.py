"""Command-line front end: ``projheat <subcommand> ...``.

Exit codes: 0 on success, 1 on invalid input or a failed check, 2 when a
certificate cannot be produced or an orbit is inconclusive.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import CannotCertify, Inconclusive, OutOfRange, ProjheatError, ValidationError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _lambda(text: str):
    from .polygon import parse_lambda

    try:
        return parse_lambda(text)
    except ValueError as exc:
        raise ValidationError(f"bad lambda {text!r}: {exc}") from None


def _float_lambda(lam):
    from .polygon import is_infinite

    return lam if is_infinite(lam) else float(lam)


def _window(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ValidationError(f"bad window {text!r}") from None
    if len(vals) != 4:
        raise ValidationError("window needs four numbers x0,y0,x1,y1")
    return vals


def _moduli(text: str):
    from .moduli import ModuliPoint
    from .scalar import parse_scalar

    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError("moduli point needs two numbers x,y")
    try:
        return ModuliPoint(*(float(parse_scalar(p)) for p in parts))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _fmt_point(p) -> str:
    h = p.to_float()
    coords = " ".join(f"{c:.12g}" for c in h.array())
    if abs(h.array()[2]) < 1e-300:
        return f"[{coords}] (at infinity)"
    x, y = h.to_affine()
    return f"[{coords}] affine ({x:.12g}, {y:.12g})"


# -- subcommands ---------------------------------------------------------------------------

def cmd_iterate(args) -> int:
    from .dynamics import OUTCOME_NAMES, iterate_orbit, write_orbit_csv

    start = _moduli(args.moduli) if args.moduli else io.read_polygon(args.input, exact=False)
    rec = iterate_orbit(start, _float_lambda(_lambda(args.lam)), max_steps=args.steps, tol=args.tol)
    write_orbit_csv(rec, args.out)
    print(f"{len(rec.steps)} rows written to {args.out}; stopped: {OUTCOME_NAMES[rec.stop]}")
    return 0


def cmd_classify(args) -> int:
    from .dynamics import classify, iterate_orbit

    start = _moduli(args.moduli) if args.moduli else io.read_polygon(args.input, exact=False)
    lam = _float_lambda(_lambda(args.lam))
    rec = iterate_orbit(start, lam, max_steps=args.max_steps, tol=args.tol)
    print(classify(rec, lam))
    return 0


def cmd_julia(args) -> int:
    from .dynamics import julia_raster, write_ppm

    w, h = args.res
    img = julia_raster(_float_lambda(_lambda(args.lam)), _window(args.window), (w, h),
                       max_iter=args.max_iter, tol=args.tol)
    write_ppm(img, args.out)
    for name, count in sorted(img.histogram().items()):
        print(f"{name}: {count}")
    return 0


def cmd_posdom(args) -> int:
    from .posdom import BoxRegion, prove_positive

    p = io.read_poly(args.poly, args.nvars)
    root = BoxRegion.from_text(args.box) if args.box else None
    cert = prove_positive(p, root, variant=args.variant, max_depth=args.max_depth)
    Path(args.out).write_text(cert.to_text(), encoding="utf-8")
    print(f"certified {args.variant.upper()} with {len(cert.leaves)} leaves, depth {cert.depth}")
    return 0


def cmd_replay(args) -> int:
    from .posdom import DominanceCertificate

    cert = DominanceCertificate.from_text(Path(args.cert).read_text(encoding="utf-8"))
    cert.replay()
    print(f"certificate verified: {len(cert.leaves)} leaves, depth {cert.depth}, {cert.variant.name}")
    return 0


def cmd_center(args) -> int:
    from .moduli import center, star_center

    P = io.read_polygon(args.input)
    c = star_center(P) if args.star else center(P)
    print(_fmt_point(c))
    return 0


def cmd_collapse(args) -> int:
    from .dynamics import collapse_point, degeneration_line

    P = io.read_polygon(args.input, exact=False)
    lam = _float_lambda(_lambda(args.lam))
    try:
        point = collapse_point(P, lam, tol=args.tol, max_steps=args.max_steps)
        print("point " + _fmt_point(point))
    except OutOfRange:
        line = degeneration_line(P, lam, tol=args.tol, max_steps=args.max_steps)
        coords = " ".join(f"{float(c):.12g}" for c in line.array())
        print(f"line [{coords}]")
    return 0


def cmd_verify(args) -> int:
    from .acceptance import run_all

    only = [int(v) for v in args.only.split(",")] if args.only else None
    results = run_all(seed=args.seed, only=only)
    for r in results:
        print(r.line(), flush=True)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    if args.empirical:
        _empirical(args.seed)
    return 0 if passed == len(results) else 1


def _empirical(seed: int) -> None:
    """Outcome histograms for convex n-gons, n > 5 (reported, not asserted)."""
    from .dynamics import OUTCOME_NAMES, Outcome, iterate_batch
    from .sampling import random_convex_polygon

    rng = np.random.default_rng(seed)
    print("empirical outcomes for convex n-gons (20 per cell):")
    for n in (6, 7, 8):
        polys = np.stack([random_convex_polygon(rng, n).array() for _ in range(20)])
        for lam in (0.5, 1.0, 2 * np.cos(np.pi / n), 3.0):
            res = iterate_batch(polys, lam, max_steps=5000)
            vals, counts = np.unique(res.outcome, return_counts=True)
            hist = ", ".join(f"{OUTCOME_NAMES[Outcome(int(v))]}={c}" for v, c in zip(vals, counts))
            print(f"  n={n} lambda={lam:.4f}: {hist}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="projheat", description="Parametrized projective heat maps on polygons.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("iterate", help="iterate H_lambda and write a CSV orbit log")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", help="polygon file")
    g.add_argument("--moduli", help="moduli point x,y")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_iterate)

    s = sub.add_parser("classify", help="iterate and classify the orbit")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--moduli")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--max-steps", type=int, default=5000)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("julia", help="render a Julia-set raster as PPM")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--window", default="-3,-3,3,3")
    s.add_argument("--res", type=int, nargs=2, metavar=("W", "H"), default=(64, 64))
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_julia)

    s = sub.add_parser("posdom", help="certify positivity of a polynomial on a box")
    s.add_argument("--poly", required=True, help="sparse term file")
    s.add_argument("--nvars", type=int)
    s.add_argument("--variant", choices=("spd", "wpd", "vwpd", "SPD", "WPD", "VWPD"), default="wpd")
    s.add_argument("--max-depth", type=int, default=40)
    s.add_argument("--box", help="root box, e.g. [0,1]x[0,1/2]")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_posdom)

    s = sub.add_parser("replay", help="re-verify a certificate file")
    s.add_argument("cert")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("center", help="print Center(P)")
    s.add_argument("--input", required=True)
    s.add_argument("--star", action="store_true", help="print Center*(P) instead")
    s.set_defaults(func=cmd_center)

    s = sub.add_parser("collapse", help="print the collapse point or degeneration line")
    s.add_argument("--input", required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-steps", type=int, default=20000)
    s.set_defaults(func=cmd_collapse)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--empirical", action="store_true", help="also print n > 5 outcome histograms")
    s.set_defaults(func=cmd_verify)
    return p


def _join_negative_values(argv: list) -> list:
    # argparse takes "-1/phi" for an option; glue such values to their flag
    out = []
    for tok in argv:
        if out and out[-1] in ("--lambda", "--moduli", "--window") and tok.startswith("-"):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (CannotCertify, Inconclusive) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ProjheatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
