"""Exception types shared across the package."""


class LdpLabError(Exception):
    """Base class for all package errors."""


class NonFinite(LdpLabError):
    """Matrix or vector contains NaN or infinite entries."""


class SingularMatrix(LdpLabError):
    """Determinant below the invertibility tolerance."""


class SingularProduct(SingularMatrix):
    """A renormalized running product collapsed numerically."""


class EigenFailure(LdpLabError):
    """The eigenvalue solver failed to converge."""


class DimensionMismatch(LdpLabError):
    """Operands have incompatible ambient dimensions."""


class BadIndex(LdpLabError):
    """Exterior-power index outside [1, d]."""


class BadParameters(LdpLabError):
    """Parameters violate a documented precondition."""


class NotProximalError(LdpLabError):
    """Operation requires proximal input matrices."""


class BudgetExceeded(LdpLabError):
    """Exhaustive enumeration would exceed the word budget."""

    def __init__(self, required, budget):
        self.required = int(required)
        self.budget = int(budget)
        super().__init__(
            f"enumeration needs budget {self.required}, got {self.budget}"
        )


class EmptySet(LdpLabError):
    """Hausdorff distance of an empty point set is undefined."""


class ParseError(LdpLabError):
    """Measure file could not be parsed."""


class ValidationError(LdpLabError):
    """Measure file parsed but violates an invariant."""
