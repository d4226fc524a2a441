"""Exception hierarchy shared by every curvlab module."""

from __future__ import annotations


class CurvlabError(Exception):
    """Base class for all curvlab errors."""


class IncompatibleScalarKinds(CurvlabError, TypeError):
    def __init__(self, left: str, right: str):
        super().__init__(f"incompatible scalar kinds: {left} and {right}")
        self.kinds = (left, right)


class MissingVariable(CurvlabError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"missing value for variable {self.name!r}"


class ModelInvariantError(CurvlabError, ValueError):
    """A model, jet or basis change violates one of its construction invariants.

    ``invariant`` is a short stable name ("h degenerate", "omega degenerate", ...)
    that the CLI echoes back to the user.
    """

    def __init__(self, invariant: str, detail: str = ""):
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)
        self.invariant = invariant


class IndexArityError(CurvlabError, ValueError):
    pass


class InvalidQuantity(CurvlabError, ValueError):
    pass


class JetOrderError(CurvlabError, ValueError):
    pass


class SweepConfigError(CurvlabError, ValueError):
    pass
