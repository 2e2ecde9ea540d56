"""Formula syntax trees for the preference-sight language and its modal extension.

One node family serves both logics: :mod:`pstree.logic` evaluates the
preference-sight fragment, :mod:`pstree.modal` evaluates everything.
``str(f)`` prints the concrete syntax accepted by :func:`pstree.textio.parse_formula`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import History, fmt

MODAL_OPS = (
    "move", "best", "bi", "bi*", "BI", "scbi", "scbi*", "SCBI",
    "movev", "bestv", "biv", "biv*", "BIv",
)


class Formula:
    __slots__ = ()

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __rshift__(self, other):
        return Implies(self, other)


@dataclass(frozen=True)
class Top(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bottom(Formula):
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class At(Formula):
    """True at every state that is a prefix of ``history``."""

    history: History

    def __str__(self):
        return f"at({fmt(self.history)})"


@dataclass(frozen=True)
class Geq(Formula):
    left: History
    right: History

    def __str__(self):
        return f"geq({fmt(self.left)},{fmt(self.right)})"


@dataclass(frozen=True)
class Sg(Formula):
    """Sight atom: true at the prefixes of everything seen from ``history``."""

    history: History

    def __str__(self):
        return f"sg({fmt(self.history)})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"~{self.arg}"


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __str__(self):
        return "(" + " & ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __str__(self):
        return "(" + " | ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} <-> {self.right})"


@dataclass(frozen=True)
class Announce(Formula):
    """``[!ann] body``."""

    ann: Formula
    body: Formula

    def __str__(self):
        return f"[ann {self.ann}] {self.body}"


@dataclass(frozen=True)
class Possible(Formula):
    """``<!ann> body``: ``ann`` holds and ``body`` holds after announcing it."""

    ann: Formula
    body: Formula

    def __str__(self):
        return f"<ann {self.ann}> {self.body}"


@dataclass(frozen=True)
class Univ(Formula):
    arg: Formula

    def __str__(self):
        return f"A {self.arg}"


# -- modal surface ---------------------------------------------------------


@dataclass(frozen=True)
class Prop(Formula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class End(Formula):
    def __str__(self):
        return "end"


@dataclass(frozen=True)
class EndView(Formula):
    def __str__(self):
        return "endv"


@dataclass(frozen=True)
class Box(Formula):
    op: str
    arg: Formula

    def __str__(self):
        return f"[{self.op}] {self.arg}"


@dataclass(frozen=True)
class Dia(Formula):
    op: str
    arg: Formula

    def __str__(self):
        return f"<{self.op}> {self.arg}"


@dataclass(frozen=True)
class View(Formula):
    """Evaluate ``arg`` in the model restricted to the current sight."""

    arg: Formula

    def __str__(self):
        return f"[view] {self.arg}"


@dataclass(frozen=True)
class Leq(Formula):
    """Some state at least as good as the current one satisfies ``arg``."""

    arg: Formula

    def __str__(self):
        return f"<leq> {self.arg}"


@dataclass(frozen=True)
class Sigma(Formula):
    """Every end point of play along the named strategy satisfies ``arg``."""

    name: str
    arg: Formula

    def __str__(self):
        return f"[sigma {self.name}] {self.arg}"


TRUE = Top()
FALSE = Bottom()


def big_and(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def big_or(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def sim(h1: History, h2: History) -> Formula:
    """Indifference ``h1 ∼ h2`` as a conjunction of two preference atoms."""
    return And((Geq(h1, h2), Geq(h2, h1)))


def gt(h1: History, h2: History) -> Formula:
    return And((Geq(h1, h2), Not(Geq(h2, h1))))


def is_modal(f: Formula) -> bool:
    """Whether ``f`` uses any operator outside the preference-sight language."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Prop, End, EndView, Box, Dia, View, Leq, Sigma)):
            return True
        if isinstance(g, Not) or isinstance(g, Univ):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.extend((g.left, g.right))
        elif isinstance(g, (Announce, Possible)):
            stack.extend((g.ann, g.body))
    return False


def histories_in(f: Formula) -> set[History]:
    out: set[History] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (At, Sg)):
            out.add(g.history)
        elif isinstance(g, Geq):
            out.update((g.left, g.right))
        elif isinstance(g, (Not, Univ, Box, Dia, View, Leq, Sigma)):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.extend((g.left, g.right))
        elif isinstance(g, (Announce, Possible)):
            stack.extend((g.ann, g.body))
    return out
