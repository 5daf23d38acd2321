"""Exception hierarchy shared across the package."""


class CoverstreamError(Exception):
    """Base class for every error raised by this package."""


# finite fields

class FieldError(CoverstreamError, ValueError):
    pass


class NotPrimeError(FieldError):
    pass


class DegreeZeroError(FieldError):
    pass


class FieldOverflowError(FieldError):
    pass


class ZeroInverseError(FieldError, ZeroDivisionError):
    pass


# instances

class InstanceError(CoverstreamError, ValueError):
    pass


class InstanceSyntaxError(InstanceError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ElementOutOfRangeError(InstanceError):
    pass


class DuplicateIdError(InstanceError):
    pass


class NotACoverError(InstanceError):
    pass


class PassBudgetExceeded(CoverstreamError, RuntimeError):
    pass


# solvers

class InfeasibleSlackError(CoverstreamError, RuntimeError):
    pass


# edifices and generators

class ParamViolation(CoverstreamError, ValueError):
    pass


class IndexOutOfRangeError(CoverstreamError, IndexError):
    pass


class CapExceededError(CoverstreamError, RuntimeError):
    pass


class DegenerateWidthError(ParamViolation):
    pass


class ArityTooLargeError(ParamViolation):
    pass


class OracleBudgetExceeded(CoverstreamError, RuntimeError):
    pass
