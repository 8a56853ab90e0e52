"""Exception types raised across the package."""


class ProjheatError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ProjheatError, ValueError):
    """Malformed user input (files, flags, parameters)."""


# projective primitives

class CoincidentPoints(ProjheatError):
    pass


class CoincidentLines(ProjheatError):
    pass


class NotCollinear(ProjheatError):
    pass


class DegenerateTuple(ProjheatError):
    pass


class DegenerateFrame(ProjheatError):
    pass


class DegenerateConic(ProjheatError):
    pass


class PointOutsideDomain(ProjheatError):
    pass


class NotNested(ProjheatError):
    pass


# polygons and moduli

class NotGeneric(ProjheatError):
    def __init__(self, message: str, window: int | None = None):
        super().__init__(message)
        self.window = window


class WrongArity(ProjheatError, ValueError):
    pass


class DegenerateModuli(ProjheatError):
    pass


class UndefinedAt(ProjheatError):
    """A rational map hit a vanishing denominator; ``factor`` names it."""

    def __init__(self, message: str, factor: str | None = None):
        super().__init__(message)
        self.factor = factor


class PoleOfG(UndefinedAt):
    pass


class PoleOfE(UndefinedAt):
    pass


class PoleOfScale(UndefinedAt):
    pass


class CenterAtInfinity(ProjheatError):
    """The center is a point at infinity; ``point`` holds it homogeneously."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


# positivity certificates

class InexactBackend(ProjheatError, TypeError):
    pass


class NotDivisible(ProjheatError):
    pass


class CannotCertify(ProjheatError):
    def __init__(self, message: str, box=None, piece: str | None = None):
        super().__init__(message)
        self.box = box
        self.piece = piece


# dynamics

class OutOfRange(ProjheatError, ValueError):
    pass


class Inconclusive(ProjheatError):
    pass
