"""Exception hierarchy shared by all primavoid modules."""


class PrimavoidError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(PrimavoidError, ValueError):
    pass


class SuppliedPolynomialReducible(PrimavoidError, ValueError):
    pass


class DegreeMismatch(PrimavoidError, ValueError):
    pass


class CtxMismatch(PrimavoidError, ValueError):
    pass


class DivisionByZero(PrimavoidError, ZeroDivisionError):
    pass


class ZeroElement(PrimavoidError, ValueError):
    pass


class InputTooLarge(PrimavoidError, ValueError):
    pass


class DomainError(PrimavoidError, ValueError):
    pass


class NotPrimitive(PrimavoidError, ValueError):
    pass


class FieldTooLarge(PrimavoidError, ValueError):
    pass


class NotADivisor(PrimavoidError, ValueError):
    pass


class BasisNotIndependent(PrimavoidError, ValueError):
    pass


class LengthMismatch(PrimavoidError, ValueError):
    pass


class WrongCount(PrimavoidError, ValueError):
    pass


class NotGeneralPosition(PrimavoidError, ValueError):
    pass


class SetTooLarge(PrimavoidError, ValueError):
    pass


class WrongCharacteristic(PrimavoidError, ValueError):
    pass


class NumericalDrift(PrimavoidError, ArithmeticError):
    """Rounding of a character-sum count drifted beyond tolerance."""


class NoThresholdBelowCap(PrimavoidError, ValueError):
    """A sufficient condition never holds (or not below the search cap)."""
