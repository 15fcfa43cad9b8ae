"""Exception hierarchy shared by all multidirac modules."""


class MultiDiracError(Exception):
    """Base class for all library errors."""


class DimensionError(MultiDiracError, ValueError):
    """Operands live on spaces of different dimension."""


class DegreeError(MultiDiracError, ValueError):
    """Operand degrees are incompatible with the requested operation."""


class ModeError(MultiDiracError, TypeError):
    """Exact (rational) and float coefficients were mixed."""


class ChartError(MultiDiracError, ValueError):
    """Symbolic objects from different charts were combined, or a name is unknown."""


class NonPolynomialError(MultiDiracError, TypeError):
    """A numeric-only model was passed to a symbolic entry point."""


class AdmissibilityError(MultiDiracError, ValueError):
    """No Hamiltonian multivector exists for the given form."""


class ConstraintDataError(MultiDiracError, ValueError):
    """Distribution and annihilator data are inconsistent or rank deficient."""


class StabilityError(MultiDiracError, ValueError):
    """Time step violates the stability bound of the scheme."""


class DegenerateConstraintError(MultiDiracError, ArithmeticError):
    """Saddle-point system of the constrained dynamics is singular."""


class InitializationError(MultiDiracError, ValueError):
    """Initial data do not satisfy the constraints."""


class ShapeError(MultiDiracError, ValueError):
    """Array shapes are inconsistent with the chart."""
