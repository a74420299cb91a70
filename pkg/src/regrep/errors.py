"""Exception hierarchy shared by all modules."""


class RegRepError(Exception):
    """Base class for every error raised by the package."""


class NonPrimeP(RegRepError, ValueError):
    pass


class BadDegree(RegRepError, ValueError):
    pass


class SpecMismatch(RegRepError, ValueError):
    pass


class NotAUnit(RegRepError, ArithmeticError):
    pass


class BadLevel(RegRepError, ValueError):
    pass


class ShapeMismatch(RegRepError, ValueError):
    pass


class BadExponent(RegRepError, ValueError):
    pass


class NotRegular(RegRepError, ValueError):
    pass


class CapExceeded(RegRepError):
    """An enumeration would exceed the configured element cap."""


class NotASubgroup(RegRepError, ValueError):
    pass


class NotStable(RegRepError):
    pass


class ObstructionNonzero(RegRepError):
    """A linear character cannot be extended (nontrivial on N ∩ [G, G])."""


class NotElementaryAbelian(RegRepError):
    pass


class DegenerateForm(RegRepError):
    pass


class NoLagrangian(RegRepError):
    pass


class DimensionMismatch(RegRepError):
    pass


class NoExtensionFound(RegRepError):
    pass


class ParseError(RegRepError, ValueError):
    pass
