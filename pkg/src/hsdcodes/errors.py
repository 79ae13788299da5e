"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HSDError(Exception):
    """Base class for all library errors."""


# field
class NotPrime(HSDError, ValueError):
    pass


class FieldTooLarge(HSDError, ValueError):
    pass


class NoConwayPolynomialShipped(HSDError, LookupError):
    pass


class ContextMismatch(HSDError, ValueError):
    pass


class NoRoot(HSDError, ValueError):
    pass


class ZeroInput(HSDError, ValueError):
    pass


class FieldDivisionByZero(HSDError, ZeroDivisionError):
    pass


# linalg
class DimensionMismatch(HSDError, ValueError):
    pass


class NotSquare(HSDError, ValueError):
    pass


# unitary
class SizeTooSmall(HSDError, ValueError):
    pass


class TuUnavailable(HSDError, ValueError):
    pass


class NoSolution(HSDError, RuntimeError):
    pass


class CapExceeded(HSDError, RuntimeError):
    """Raised when a group closure grows past its cap.

    ``partial`` holds the number of elements found before stopping.
    """

    def __init__(self, partial: int, cap: int):
        super().__init__(f"closure exceeded cap {cap} (found {partial} elements)")
        self.partial = partial
        self.cap = cap


# code
class BudgetExceeded(HSDError, RuntimeError):
    pass


class SubsetCountTooLarge(HSDError, RuntimeError):
    pass


# construct
class PreconditionFailed(HSDError, ValueError):
    pass


class NotUnitary(PreconditionFailed):
    pass


class BadAlpha(PreconditionFailed):
    pass


class CongruenceViolated(PreconditionFailed):
    pass


class SystemViolated(PreconditionFailed):
    pass


class RankDeficient(HSDError, ValueError):
    pass


class GuardViolated(PreconditionFailed):
    pass


class SpecViolated(PreconditionFailed):
    pass


class DegenerateExtension(HSDError, ValueError):
    pass


class NoIsotropicVector(HSDError, RuntimeError):
    pass


# mpcode
class RankDeficientA(HSDError, ValueError):
    pass


class LengthMismatch(HSDError, ValueError):
    pass


class NoRightInverse(HSDError, ValueError):
    pass


class InnerDistanceUnavailable(HSDError, RuntimeError):
    pass


# search
class TableFileMissing(HSDError, FileNotFoundError):
    pass
