"""Exception types raised across the package."""

from __future__ import annotations


class DerangementError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DerangementError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class DegreeMismatch(DerangementError, ValueError):
    pass


class InvalidPermutation(DerangementError, ValueError):
    pass


class ResourceLimit(DerangementError):
    """Refusal to start a computation that needs an explicit opt-in flag."""

    def __init__(self, message: str, flag: str = "--allow-long"):
        self.flag = flag
        super().__init__(f"{message} (pass {flag} to proceed)")


class NotLatin(DerangementError, ValueError):
    pass


class NotOrthogonal(DerangementError, ValueError):
    pass


class BrokenPair(DerangementError, ValueError):
    pass


class InvalidRectangle(DerangementError, ValueError):
    pass


class NotAClique(DerangementError, ValueError):
    pass


class CompositeModulus(DerangementError, ValueError):
    pass


class CharacteristicMismatch(DerangementError, ValueError):
    pass


class NonIntegralTrace(DerangementError, ValueError):
    pass


class StructuralReject(DerangementError, ValueError):
    """An R-set candidate violates one of its structural conditions."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NoUsableDependency(DerangementError):
    pass


class VerificationFailure(DerangementError):
    pass


class DegreeOutOfRange(DerangementError, ValueError):
    pass
