"""
Exception hierarchy for the extended Lorentz cone toolkit.
"""

from typing import Optional


class LorentzError(Exception):
    """Base class for all errors raised by this package"""


class DimensionError(LorentzError, ValueError):
    """Vector lengths disagree with the declared (p, q) split or cone dimension"""


class ConeSpecError(LorentzError, ValueError):
    """A cone description violates its invariants"""


class MapSpecError(LorentzError, ValueError):
    """A mapping or scalar function description is invalid"""


class SingularMatrixError(LorentzError, ValueError):
    """A matrix that must be inverted is singular or too ill-conditioned"""


class EnumerationLimitError(LorentzError):
    """Too many halfspaces for exhaustive active-set enumeration"""


class ProjectionError(LorentzError):
    """No projection candidate satisfied the optimality conditions"""


class ExactArithmeticError(LorentzError):
    """The requested operation has no exact (Decimal) implementation"""


class ProblemFileError(LorentzError, ValueError):
    """A problem file or configuration file could not be parsed"""

    def __init__(self, message: str, path: Optional[str] = None,
                 field: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.field = field
        self.line = line
        super().__init__(message)

    def __str__(self) -> str:
        context = []
        if self.path:
            context.append(str(self.path))
        if self.line is not None:
            context.append(f"line {self.line}")
        if self.field:
            context.append(f"field '{self.field}'")
        message = super().__str__()
        if context:
            return f"{': '.join(context)}: {message}"
        return message


class HypothesisError(LorentzError, ValueError):
    """A point supplied as a member of Omega or Gamma is not one"""
