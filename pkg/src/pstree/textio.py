"""The ``.pst`` text format for preference-sight trees, and the formula parser.

``.pst`` is line oriented::

    # comment
    h .     0          payoff of the root
    h L.L   3/2        payoff of history L.L
    s .  -> ., L, R    sight at the root

Histories without an ``s`` line see their whole subtree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import History, PreferenceTree, hkey, fmt
from .errors import ParseError
from .formula import (
    MODAL_OPS, And, Announce, At, Bottom, Box, Dia, End, EndView, Formula, Geq, Iff, Implies,
    Leq, Not, Or, Possible, Prop, Sg, Sigma, Top, Univ, View,
)
from .sight import SightFunction, repair_sight, validate_sight

NAME = r"[A-Za-z0-9_]+"
PATH_RE = re.compile(rf"\.|\.?{NAME}(?:\.{NAME})*")
NUMBER_RE = re.compile(r"-?[0-9]+(?:/[0-9]+)?")


def parse_path(text: str) -> Optional[History]:
    """``"."`` is the root; ``"L.R"`` (or ``".L.R"``) is the history L, R."""
    if not PATH_RE.fullmatch(text):
        return None
    if text == ".":
        return ()
    return tuple(text.lstrip(".").split("."))


def fmt_payoff(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# documents


@dataclass(frozen=True)
class Decl:
    path: History
    line: int
    column: int


@dataclass
class PstDocument:
    """Declarations in file order, with source positions."""

    payoffs: dict[History, Fraction] = field(default_factory=dict)
    sights: dict[History, tuple[History, ...]] = field(default_factory=dict)
    hist_at: dict[History, Decl] = field(default_factory=dict)
    sight_at: dict[History, Decl] = field(default_factory=dict)
    member_at: dict[tuple[History, History], tuple[int, int]] = field(default_factory=dict)


def _tokens(line: str) -> list[tuple[str, int]]:
    """Whitespace-separated fields with 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_document(text: str) -> PstDocument:
    doc = PstDocument()
    for ln, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = _tokens(line)
        kind, col = toks[0]
        if kind == "h":
            if len(toks) != 3:
                where = toks[3][1] if len(toks) > 3 else len(line) + 1
                raise ParseError("expected 'h PATH NUMBER'", ln, where)
            (ptxt, pcol), (ntxt, ncol) = toks[1], toks[2]
            h = parse_path(ptxt)
            if h is None:
                raise ParseError(f"malformed path {ptxt!r}", ln, pcol)
            if not NUMBER_RE.fullmatch(ntxt):
                raise ParseError(f"malformed number {ntxt!r}", ln, ncol)
            num, _, den = ntxt.partition("/")
            if den and not den.strip("0"):
                raise ParseError("zero denominator", ln, ncol + ntxt.index("/") + 1)
            if h in doc.payoffs:
                first = doc.hist_at[h]
                raise ParseError(f"duplicate history {fmt(h)} (first declared on line {first.line})", ln, pcol)
            try:
                doc.payoffs[h] = Fraction(int(num), int(den) if den else 1)
            except ValueError:
                raise ParseError("number too long", ln, ncol) from None
            doc.hist_at[h] = Decl(h, ln, pcol)
        elif kind == "s":
            if len(toks) < 2:
                raise ParseError("expected 's PATH -> PATH, ...'", ln, len(line) + 1)
            ptxt, pcol = toks[1]
            h = parse_path(ptxt)
            if h is None:
                raise ParseError(f"malformed path {ptxt!r}", ln, pcol)
            arrow = line.find("->", pcol - 1 + len(ptxt))
            if arrow < 0 or line[pcol - 1 + len(ptxt): arrow].strip():
                raise ParseError("expected '->' after the path", ln, pcol + len(ptxt))
            if h in doc.sights:
                raise ParseError(f"duplicate sight for {fmt(h)} (first on line {doc.sight_at[h].line})", ln, pcol)
            rest_start = arrow + 2
            members = []
            pos = rest_start
            for piece in line[rest_start:].split(","):
                lead = len(piece) - len(piece.lstrip())
                item = piece.strip()
                icol = pos + lead + 1
                if not item:
                    raise ParseError("empty sight member", ln, icol)
                x = parse_path(item)
                if x is None:
                    raise ParseError(f"malformed path {item!r}", ln, icol)
                members.append(x)
                doc.member_at[(h, x)] = (ln, icol)
                pos += len(piece) + 1
            doc.sights[h] = tuple(members)
            doc.sight_at[h] = Decl(h, ln, pcol)
        else:
            raise ParseError(f"unknown statement {kind!r}; expected 'h', 's' or '#'", ln, col)
    return doc


def build_tree(doc: PstDocument) -> PreferenceTree:
    for h, d in doc.hist_at.items():
        for k in range(len(h)):
            if h[:k] not in doc.payoffs:
                raise ParseError(f"missing prefix {fmt(h[:k])} of {fmt(h)}", d.line, d.column)
    if () not in doc.payoffs:
        raise ParseError("no root declaration 'h . NUMBER'", 1, 1)
    return PreferenceTree(doc.payoffs)


def build_sight(doc: PstDocument, tree: PreferenceTree, repair: bool = False) -> SightFunction:
    for h, members in doc.sights.items():
        d = doc.sight_at[h]
        if h not in tree:
            raise ParseError(f"sight declared for unknown history {fmt(h)}", d.line, d.column)
        for x in members:
            ln, col = doc.member_at[(h, x)]
            if x not in tree:
                raise ParseError(f"unknown history {fmt(x)} in sight of {fmt(h)}", ln, col)
            if x[: len(h)] != h:
                raise ParseError(f"{fmt(x)} does not extend {fmt(h)}", ln, col)
    raw = {h: set(doc.sights[h]) if h in doc.sights else set(tree.subtree(h)) for h in tree.histories}
    if repair:
        return repair_sight(tree, raw)
    bad = validate_sight(tree, raw)
    if bad:
        v = bad[0]
        key = v.witness[0]
        d = doc.sight_at.get(key) or doc.hist_at[key]
        more = f" (and {len(bad) - 1} more)" if len(bad) > 1 else ""
        raise ParseError(f"invalid sight: {v}{more}; use --repair to close it", d.line, d.column)
    return SightFunction(tree, raw)


def parse_pst(text: str, repair: bool = False) -> tuple[PreferenceTree, SightFunction]:
    doc = parse_document(text)
    tree = build_tree(doc)
    return tree, build_sight(doc, tree, repair)


def decode(data: bytes) -> str:
    """UTF-8 decode; failures become a positioned :class:`ParseError`."""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        before = data[: e.start]
        line = before.count(b"\n") + 1
        col = e.start - (before.rfind(b"\n") + 1) + 1
        raise ParseError(f"invalid UTF-8 byte 0x{data[e.start]:02x}", line, col) from None


def parse_pst_bytes(data: bytes, repair: bool = False) -> tuple[PreferenceTree, SightFunction]:
    return parse_pst(decode(data), repair)


def load_pst(path: str, repair: bool = False) -> tuple[PreferenceTree, SightFunction]:
    with open(path, "rb") as fh:
        return parse_pst_bytes(fh.read(), repair)


def serialize_pst(tree: PreferenceTree, sight: SightFunction) -> str:
    """Canonical text: histories in order, then sights that are not the full subtree."""
    lines = [f"h {fmt(h)} {fmt_payoff(tree.payoff[h])}" for h in sorted(tree.histories, key=hkey)]
    for h in sorted(tree.histories, key=hkey):
        seen = sight[h]
        if seen != frozenset(tree.subtree(h)):
            lines.append(f"s {fmt(h)} -> " + ", ".join(fmt(x) for x in sorted(seen, key=hkey)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# formulas

_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[()\[\]<>,~&|*])|(?P<word>\.?[A-Za-z0-9_]+(?:\.[A-Za-z0-9_]+)*|\.))"
)
KEYWORDS = {"true", "false", "at", "geq", "sg", "A", "end", "endv", "ann", "view", "leq", "sigma"}
BRACKET_OPS = {op for op in MODAL_OPS if not op.endswith("*")}


class _Parser:
    def __init__(self, text: str, tree: Optional[PreferenceTree]):
        self.text = text
        self.tree = tree
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        n = len(text)
        while True:
            while pos < n and text[pos].isspace():
                pos += 1
            if pos >= n:
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise self.error(f"unexpected character {text[pos]!r}", pos)
            kind = "op" if m.group("op") else "word"
            val = m.group(kind)
            self.toks.append((kind, val, m.start(kind)))
            pos = m.end()
        self.i = 0

    def error(self, msg: str, offset: Optional[int] = None) -> ParseError:
        if offset is None:
            offset = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return ParseError(msg, line, col)

    def peek(self) -> Optional[str]:
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> tuple[str, str, int]:
        if self.i >= len(self.toks):
            raise self.error(f"expected {expected!r}" if expected else "unexpected end of input")
        tok = self.toks[self.i]
        if expected is not None and tok[1] != expected:
            raise self.error(f"expected {expected!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if not self.toks:
            raise self.error("empty formula", 0)
        f = self.iff()
        if self.i < len(self.toks):
            raise self.error(f"unexpected {self.peek()!r}")
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def path(self) -> History:
        kind, val, off = self.take()
        h = parse_path(val) if kind == "word" else None
        if h is None:
            raise self.error(f"expected a history path, found {val!r}", off)
        if self.tree is not None and h not in self.tree:
            raise self.error(f"unknown history {fmt(h)}", off)
        return h

    def args(self, name: str, arity: int, off: int) -> list[History]:
        self.take("(")
        out = [self.path()]
        while self.peek() == ",":
            self.take()
            out.append(self.path())
        if self.peek() != ")":
            raise self.error(f"expected ')' or ',' in {name}(...)")
        self.take()
        if len(out) != arity:
            raise self.error(f"{name} expects {arity} argument{'s' if arity > 1 else ''}, got {len(out)}", off)
        return out

    def modality(self, closer: str) -> str:
        kind, val, off = self.take()
        if kind != "word" or val not in BRACKET_OPS:
            raise self.error(f"unknown modality {val!r}", off)
        if self.peek() == "*":
            self.take()
            val += "*"
            if val not in MODAL_OPS:
                raise self.error(f"modality {val!r} has no iterated form", off)
        self.take(closer)
        return val

    def unary(self) -> Formula:
        kind, val, off = self.take()
        if val == "~":
            return Not(self.unary())
        if val == "(":
            f = self.iff()
            self.take(")")
            return f
        if val == "[":
            nxt = self.peek()
            if nxt == "ann":
                self.take()
                ann = self.iff()
                self.take("]")
                return Announce(ann, self.unary())
            if nxt == "view":
                self.take()
                self.take("]")
                return View(self.unary())
            if nxt == "sigma":
                self.take()
                k2, name, o2 = self.take()
                if k2 != "word" or not re.fullmatch(NAME, name):
                    raise self.error("expected a strategy name", o2)
                self.take("]")
                return Sigma(name, self.unary())
            return Box(self.modality("]"), self.unary())
        if val == "<":
            nxt = self.peek()
            if nxt == "ann":
                self.take()
                ann = self.iff()
                self.take(">")
                return Possible(ann, self.unary())
            if nxt == "leq":
                self.take()
                self.take(">")
                return Leq(self.unary())
            return Dia(self.modality(">"), self.unary())
        if kind != "word":
            raise self.error(f"unexpected {val!r}", off)
        if val == "A":
            return Univ(self.unary())
        if val == "true":
            return Top()
        if val == "false":
            return Bottom()
        if val == "end":
            return End()
        if val == "endv":
            return EndView()
        if val == "at":
            return At(*self.args("at", 1, off))
        if val == "sg":
            return Sg(*self.args("sg", 1, off))
        if val == "geq":
            return Geq(*self.args("geq", 2, off))
        if val in KEYWORDS or not re.fullmatch(NAME, val) or not val[0].isalpha():
            raise self.error(f"unexpected {val!r}", off)
        return Prop(val)


def parse_formula(text: str, tree: Optional[PreferenceTree] = None) -> Formula:
    """Parse concrete syntax; with ``tree`` every history path must exist."""
    return _Parser(text, tree).parse()
