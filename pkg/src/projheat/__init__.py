"""Parametrized projective heat maps on polygons and pentagon moduli."""

from .errors import ProjheatError
from .moduli import ModuliPoint, center, heat_moduli, star_center
from .polygon import Polygon, heat_map
from .projective import HomLine, HomPoint, ProjTransform
from .scalar import PHI, QSqrt5

__version__ = "0.1.0"

__all__ = [
    "HomLine",
    "HomPoint",
    "ModuliPoint",
    "PHI",
    "Polygon",
    "ProjTransform",
    "ProjheatError",
    "QSqrt5",
    "center",
    "heat_map",
    "heat_moduli",
    "star_center",
]
