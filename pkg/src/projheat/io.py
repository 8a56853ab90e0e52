"""Text formats for polygons and polynomials."""

from __future__ import annotations

from pathlib import Path

from . import scalar as sc
from .errors import ValidationError
from .polygon import Polygon
from .polynomial import MultiPoly
from .projective import HomPoint


def parse_polygon(text: str, exact: bool = True) -> Polygon:
    """One vertex per line, ``x y`` or ``x y z``; ``#`` starts a comment."""
    verts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3):
            raise ValidationError(f"line {lineno}: expected 2 or 3 coordinates, got {len(parts)}")
        try:
            coords = [sc.parse_scalar(p, exact=exact) for p in parts]
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        try:
            verts.append(HomPoint(*coords))
        except Exception as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    if len(verts) < 5:
        raise ValidationError(f"a polygon needs at least 5 vertices, found {len(verts)}")
    return Polygon(verts)


def format_polygon(P: Polygon) -> str:
    """Homogeneous ``x y z`` lines that :func:`parse_polygon` reads back to equal vertices."""
    lines = [f"# polygon with {len(P)} vertices"]
    for v in P.vertices:
        lines.append(" ".join(sc.format_scalar(c) for c in v.coords))
    return "\n".join(lines) + "\n"


def read_polygon(path, exact: bool = True) -> Polygon:
    return parse_polygon(Path(path).read_text(encoding="utf-8"), exact=exact)


def write_polygon(P: Polygon, path) -> None:
    Path(path).write_text(format_polygon(P), encoding="utf-8")


def read_poly(path, nvars: int | None = None) -> MultiPoly:
    """Sparse term lines ``i1 i2 ... : p/q [s/t]``."""
    try:
        return MultiPoly.from_lines(Path(path).read_text(encoding="utf-8").splitlines(), nvars)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"bad polynomial file: {exc}") from None


def write_poly(p: MultiPoly, path) -> None:
    Path(path).write_text("\n".join(p.to_lines()) + "\n", encoding="utf-8")
