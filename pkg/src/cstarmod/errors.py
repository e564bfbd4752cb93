class CStarModError(Exception):
    """Base class for every error raised by the package."""


class ShapeError(CStarModError, ValueError):
    """Operands live over different algebras, modules or domains."""


class DomainError(CStarModError, ValueError):
    """An operation was applied outside its mathematical domain."""


class GrammarError(CStarModError, ValueError):
    """A descriptor, module or polynomial literal failed to parse."""


class DegreeError(CStarModError, ValueError):
    """A piecewise polynomial exceeded the degree cap."""


class InvariantError(CStarModError, RuntimeError):
    """A structural invariant that must always hold was breached.

    Examples are an inconsistent Riesz system in finite dimension or a
    Jacobi sweep that fails to converge.
    """
