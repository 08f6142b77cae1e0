"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AggCloneError(Exception):
    """Base class for all errors raised by the package."""


class LatticeError(AggCloneError):
    pass


class CycleInCovers(LatticeError):
    pass


class NotALattice(LatticeError):
    def __init__(self, pair: tuple[str, str], kind: str):
        self.pair = pair
        self.kind = kind
        super().__init__(f"{{{pair[0]},{pair[1]}}} lack a unique {kind}")


class NotBounded(LatticeError):
    pass


class SizeGuardExceeded(AggCloneError):
    pass


class LatticeMismatch(AggCloneError):
    pass


class LatticeTooSmall(AggCloneError):
    pass


class NotAggregation(AggCloneError):
    pass


class InvalidIndexTuple(AggCloneError):
    pass


class ArityTooSmall(AggCloneError):
    pass


class UnboundVariable(AggCloneError):
    pass


class UnknownExternal(AggCloneError):
    pass


class ArityMismatch(AggCloneError):
    pass


class UnknownElementName(AggCloneError):
    pass


class TermSyntaxError(AggCloneError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class DimensionMismatch(AggCloneError):
    pass


class VerificationFailed(AggCloneError):
    pass


class FormatError(AggCloneError):
    """Malformed .lat/.fn/.rel input."""


class IncompleteTable(FormatError):
    pass


class DuplicateTuple(FormatError):
    pass
