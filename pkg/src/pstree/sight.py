"""Sight functions: validation, closure-based repair and horizon generators."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from .core import History, PreferenceTree, fmt, hkey, is_prefix, prefixes
from .errors import SightError, UnknownHistory


@dataclass(frozen=True)
class Violation:
    """One broken sight property.

    ``prop`` is one of ``domain``, ``extension``, ``nonempty``, ``reflexive``,
    ``DC`` or ``NF``; ``witness`` holds the histories that exhibit it.
    """

    prop: str
    witness: tuple[History, ...]

    def __str__(self):
        return f"{self.prop} ({', '.join(fmt(h) for h in self.witness)})"


class SightFunction(Mapping):
    """Validated map from each history to the finite set of histories it sees."""

    __slots__ = ("_s", "_hash")

    def __init__(self, tree: PreferenceTree, raw: Mapping[History, Iterable[History]]):
        violations = validate_sight(tree, raw)
        if violations:
            raise SightError(violations)
        self._s = {tuple(h): frozenset(tuple(x) for x in v) for h, v in raw.items()}
        self._hash = None

    @classmethod
    def _trusted(cls, s: dict[History, frozenset[History]]) -> "SightFunction":
        obj = cls.__new__(cls)
        obj._s = s
        obj._hash = None
        return obj

    def __getitem__(self, h):
        try:
            return self._s[h]
        except KeyError:
            raise UnknownHistory(h) from None

    def __iter__(self) -> Iterator[History]:
        return iter(self._s)

    def __len__(self) -> int:
        return len(self._s)

    def __eq__(self, other):
        if isinstance(other, SightFunction):
            return self._s == other._s
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._s.items()))
        return self._hash

    def __repr__(self):
        items = ", ".join(
            f"{fmt(h)}: {{{', '.join(fmt(x) for x in sorted(v, key=hkey))}}}"
            for h, v in sorted(self._s.items(), key=lambda kv: hkey(kv[0]))
        )
        return f"SightFunction({{{items}}})"

    def issubset(self, other: "SightFunction") -> bool:
        """Pointwise inclusion ``self(h) ⊆ other(h)``."""
        return all(v <= other[h] for h, v in self._s.items())


def _normalise(tree: PreferenceTree, raw: Mapping) -> dict[History, set[History]]:
    out = {}
    for h, v in raw.items():
        h = tuple(h)
        if h not in tree:
            raise UnknownHistory(h)
        vals = set()
        for x in v:
            x = tuple(x)
            if x not in tree:
                raise UnknownHistory(x)
            vals.add(x)
        out[h] = vals
    return out


def validate_sight(tree: PreferenceTree, raw: Mapping[History, Iterable[History]]) -> list[Violation]:
    """Return every violated sight property; an empty list means valid."""
    s = _normalise(tree, raw)
    out: list[Violation] = []
    for h in tree.histories:
        if h not in s:
            out.append(Violation("domain", (h,)))
    for h in sorted(s, key=hkey):
        seen = s[h]
        if not seen:
            out.append(Violation("nonempty", (h,)))
        if h not in seen:
            out.append(Violation("reflexive", (h,)))
        for x in sorted(seen, key=hkey):
            if not is_prefix(h, x):
                out.append(Violation("extension", (h, x)))
                continue
            for mid in prefixes(x, strict=True):
                if len(mid) <= len(h):
                    continue
                if mid not in seen:
                    out.append(Violation("DC", (h, mid, x)))
                if x not in s.get(mid, ()):
                    out.append(Violation("NF", (h, mid, x)))
    return out


def repair_sight(tree: PreferenceTree, raw: Mapping[History, Iterable[History]]) -> SightFunction:
    """Least pointwise superset of ``raw`` that is reflexive, DC and NF.

    Missing keys are treated as empty.  Entries that do not extend their key
    are rejected, because no superset can fix them.
    """
    s = _normalise(tree, raw)
    bad = [Violation("extension", (h, x)) for h, v in s.items() for x in v if not is_prefix(h, x)]
    if bad:
        raise SightError(bad)
    for h in tree.histories:
        s.setdefault(h, set()).add(h)
    # Processing shallow keys first lets one sweep settle most inputs; loop
    # until nothing changes to be safe.
    changed = True
    while changed:
        changed = False
        for h in tree.histories:
            for x in list(s[h]):
                for mid in prefixes(x, strict=True):
                    if len(mid) <= len(h):
                        continue
                    if mid not in s[h]:
                        s[h].add(mid)
                        changed = True
                    if x not in s[mid]:
                        s[mid].add(x)
                        changed = True
    return SightFunction._trusted({h: frozenset(v) for h, v in s.items()})


def full_sight(tree: PreferenceTree) -> SightFunction:
    return SightFunction._trusted({h: frozenset(tree.subtree(h)) for h in tree.histories})


def horizon_sight(tree: PreferenceTree, k: int) -> SightFunction:
    """Every history sees the extensions at most ``k`` steps ahead."""
    if k < 0:
        raise ValueError("horizon must be non-negative")
    return SightFunction._trusted(
        {h: frozenset(x for x in tree.subtree(h) if len(x) - len(h) <= k) for h in tree.histories}
    )


def minimal_sight(tree: PreferenceTree) -> SightFunction:
    return horizon_sight(tree, 0)
