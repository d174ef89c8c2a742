class HamoscError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(HamoscError):
    pass


class NotPSD(HamoscError):
    pass


class NoConvergence(HamoscError):
    pass


class DimensionMismatch(HamoscError, ValueError):
    pass


class ExprSyntaxError(HamoscError):
    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {position}{detail}")


class UnknownIdentifier(ExprSyntaxError):
    pass


class DomainError(HamoscError, ArithmeticError):
    def __init__(self, message, t=None, entry=None):
        self.t = t
        self.entry = entry
        where = f" at t={t!r}" if t is not None else ""
        if entry is not None:
            where += f" in entry {entry}"
        super().__init__(message + where)


class SchemaError(HamoscError, ValueError):
    pass


class HermitianViolation(HamoscError):
    def __init__(self, name, t, residual):
        self.name = name
        self.t = t
        self.residual = residual
        super().__init__(f"matrix {name} is not Hermitian at t={t:g} (residual {residual:.3e})")


class StepUnderflow(HamoscError):
    def __init__(self, t, h):
        self.t = t
        self.h = h
        super().__init__(f"step size underflow at t={t!r} (h={h:.3e})")


class NumericalBreakdown(HamoscError):
    pass


class RankTooLow(HamoscError):
    pass


class NotPositiveDefinite(HamoscError):
    pass


class HypothesisNotSatisfied(HamoscError):
    def __init__(self, condition, t=None):
        self.condition = condition
        self.t = t
        where = f" (t={t:g})" if t is not None else ""
        super().__init__(f"hypothesis not satisfied: {condition}{where}")
