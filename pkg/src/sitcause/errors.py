"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SitCauseError(Exception):
    """Base class; ``category`` names the failure kind in diagnostics."""

    category = "Error"


class UnknownSymbol(SitCauseError):
    category = "UnknownSymbol"


class UnboundVariable(SitCauseError):
    category = "UnboundVariable"


class SortMismatch(SitCauseError):
    category = "SortMismatch"


class ArityError(SitCauseError):
    category = "ArityError"


class UnknownAction(UnknownSymbol):
    category = "UnknownAction"


class UnknownFluent(UnknownSymbol):
    category = "UnknownFluent"


class UnknownWorld(SitCauseError):
    category = "UnknownWorld"


class NotExecutable(SitCauseError):
    category = "NotExecutable"

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class EffectNotAchieved(SitCauseError):
    category = "EffectNotAchieved"


class ConflictingSensing(SitCauseError):
    category = "ConflictingSensing"


class NarrativeMismatch(SitCauseError):
    category = "NarrativeMismatch"


class ParseError(SitCauseError):
    """Raised by the DSL with every diagnostic collected for the input."""

    category = "ParseError"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
