"""Exception hierarchy shared by all gkdv modules.

Every error that reflects a mathematical condition (as opposed to a
programming bug) derives from :class:`GkdvError`; the command line maps
those to exit code 3.
"""

from __future__ import annotations


class GkdvError(Exception):
    """Base class for structured, user-facing errors."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class ParseError(GkdvError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["offset"] = self.offset
        return d


class ExprSyntaxError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


class DomainError(GkdvError):
    """Evaluation left the real domain of an expression node."""

    def __init__(self, message: str, node=None, where=None):
        super().__init__(message)
        self.node = node
        self.where = where

    def to_dict(self) -> dict:
        d = super().to_dict()
        if self.node is not None:
            d["node"] = str(self.node)
        if self.where is not None:
            d["where"] = self.where
        return d


class DegenerateSampling(GkdvError):
    pass


class InconsistentNullity(GkdvError):
    pass


class HypothesisViolated(GkdvError):
    def __init__(self, message: str, w=None):
        super().__init__(message)
        self.w = w

    def to_dict(self) -> dict:
        d = super().to_dict()
        if self.w is not None:
            d["w"] = self.w
        return d


class InsufficientTail(GkdvError):
    pass


class ForbiddenExponent(GkdvError):
    pass


class NegativeBase(GkdvError):
    pass


class StepSizeUnderflow(GkdvError):
    def __init__(self, message: str, z=None):
        super().__init__(message)
        self.z = z


class WrongCase(GkdvError):
    pass


class OutOfRange(GkdvError):
    pass


class NonMonotone(GkdvError):
    pass


class UnstableStep(GkdvError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(self.diagnostics)
        return d


class WindowExceeded(GkdvError):
    pass
