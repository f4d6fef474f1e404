"""Exception hierarchy. Every error raised by the library derives from FiniteCombError."""

from __future__ import annotations


class FiniteCombError(ValueError):
    pass


class NotPrime(FiniteCombError):
    def __init__(self, q: int):
        super().__init__(f"modulus {q} is not prime")
        self.q = q


class ZeroInverse(FiniteCombError, ZeroDivisionError):
    pass


class SizeOutOfRange(FiniteCombError):
    pass


class FieldMismatch(FiniteCombError):
    pass


class EmptyInput(FiniteCombError):
    pass


class EmptyDivisor(FiniteCombError):
    pass


class ZeroDilation(FiniteCombError):
    pass


class BudgetExceeded(FiniteCombError):
    pass


class HypothesisFailed(FiniteCombError):
    def __init__(self, message: str, K=None):
        super().__init__(message)
        self.K = K


class TooSmall(FiniteCombError):
    pass


class NoCollisionInBudget(FiniteCombError):
    pass


class SingularMatrix(FiniteCombError):
    pass


class MassTooSmall(FiniteCombError):
    pass


class EqualPoints(FiniteCombError):
    pass


class DegenerateField(FiniteCombError):
    pass


class MissingDirection(FiniteCombError):
    pass


class NotDisjoint(FiniteCombError):
    pass


class NotSkew(FiniteCombError):
    pass


class NoNonzeroSolution(FiniteCombError):
    pass


class ExcludedNotMeetingStem(FiniteCombError):
    pass


class BadConfiguration(FiniteCombError):
    pass


class DegenerateIntersection(FiniteCombError):
    pass


class DegenerateLine(FiniteCombError):
    pass


class ParseError(FiniteCombError):
    pass


class ConfigError(FiniteCombError):
    pass


class MissingResults(FiniteCombError):
    pass
