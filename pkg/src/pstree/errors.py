"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PstError(Exception):
    """Base class for all library errors."""


class TreeError(PstError, ValueError):
    pass


class DuplicateHistory(TreeError):
    def __init__(self, history):
        self.history = history
        super().__init__(f"duplicate history {_fmt(history)}")


class MissingPrefix(TreeError):
    def __init__(self, history, prefix):
        self.history = history
        self.prefix = prefix
        super().__init__(
            f"history {_fmt(history)} declared but its prefix {_fmt(prefix)} is not"
        )


class MissingRoot(TreeError):
    def __init__(self):
        super().__init__("the empty history (root) is not declared")


class UnknownHistory(PstError, KeyError):
    def __init__(self, history):
        self.history = history
        super().__init__(f"unknown history {_fmt(history)}")

    def __str__(self):
        return self.args[0]


class SightError(PstError, ValueError):
    """Raised when a sight function fails validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid sight function: {lines}{more}")


class NotTerminal(PstError, ValueError):
    def __init__(self, history):
        self.history = history
        super().__init__(f"{_fmt(history)} is not a terminal history")


class NotSightReachable(PstError, ValueError):
    def __init__(self, history, witness):
        self.history = history
        self.witness = witness
        super().__init__(
            f"{_fmt(history)} is not sight-reachable: "
            f"{_fmt(witness[1])} is not visible at {_fmt(witness[0])}"
        )


class EmptyRestriction(PstError, ValueError):
    pass


class NonPrefixClosedRestriction(PstError, ValueError):
    pass


class UnknownState(PstError, KeyError):
    def __str__(self):
        return self.args[0]


class UnknownStrategy(PstError, KeyError):
    def __str__(self):
        return self.args[0]


class ParseError(PstError, ValueError):
    """Syntax or semantic error with a 1-based source position."""

    def __init__(self, message, line=1, column=1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class NotFound(PstError):
    pass


class UnknownProposition(PstError, KeyError):
    def __str__(self):
        return self.args[0]


def _fmt(h):
    return "." if not h else ".".join(h)
