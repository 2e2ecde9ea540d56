"""Preference-sight models, restriction updates, model checking, the
characterization formulas and the valid-principles suite.

States are histories.  Internally a state set is an ``int`` bitmask over the
canonical history order, so restriction and Boolean connectives are single
integer operations.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .core import History, PreferenceTree, hkey, is_strict_prefix
from .errors import EmptyRestriction, NonPrefixClosedRestriction, UnknownHistory, UnknownState
from .formula import (
    And, Announce, At, Bottom, Formula, Geq, Iff, Implies, Not, Or, Possible, Sg, Top, Univ,
    big_and, big_or, sim,
)
from .sight import SightFunction
from .solve import Strategy, bi_set, local_relation, scbi_set
from .visible import visible_tree


class _Frame:
    """Tree data shared by a model and all of its restrictions."""

    def __init__(self, tree: PreferenceTree, sight: SightFunction):
        self.tree = tree
        self.sight = sight
        self.order: tuple[History, ...] = tree.histories
        self.index = {h: i for i, h in enumerate(self.order)}
        n = self.n = len(self.order)
        self.full = (1 << n) - 1
        self.payoff = [tree.payoff[h] for h in self.order]
        self.children = [0] * n
        self.prefix = [0] * n
        for i, h in enumerate(self.order):
            self.prefix[i] = (self.prefix[self.index[h[:-1]]] if h else 0) | (1 << i)
            if h:
                self.children[self.index[h[:-1]]] |= 1 << i
        # strict descendants, deepest first
        self.desc = [0] * n
        for i in sorted(range(n), key=lambda i: -len(self.order[i])):
            m = self.children[i]
            rest = m
            while rest:
                low = rest & -rest
                m |= self.desc[low.bit_length() - 1]
                rest ^= low
            self.desc[i] = m
        self.terminal = sum(1 << i for i in range(n) if not self.children[i])
        self.sight_mask = []
        for h in self.order:
            m = 0
            for x in sight[h]:
                m |= self.prefix[self.index[x]]
            self.sight_mask.append(m)

    def idx(self, h: History) -> int:
        try:
            return self.index[h]
        except KeyError:
            raise UnknownHistory(h) from None

    def mask(self, hs: Iterable[History]) -> int:
        m = 0
        for h in hs:
            m |= 1 << self.idx(h)
        return m

    def members(self, mask: int) -> list[History]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.order[low.bit_length() - 1])
            mask ^= low
        return out


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class PSModel:
    """A preference-sight model or one of its restrictions.

    Preference atoms are state-uniform, so each model stores a rank per
    history instead of a valuation: ``geq(h1, h2)`` holds everywhere iff both
    ranks exist and ``rank(h1) >= rank(h2)``.  In the initial model the rank
    is the payoff; after restricting to ``X`` it is the best parent rank among
    the leaves of ``X`` below the history, and missing when there is none.
    """

    def __init__(self, tree: PreferenceTree, sight: SightFunction):
        self._init(_Frame(tree, sight), None, None)

    def _init(self, frame: _Frame, mask: Optional[int], parent: Optional["PSModel"]):
        self.frame = frame
        self.mask = frame.full if mask is None else mask
        self.parent = parent
        self._rank: dict[int, Optional[Fraction]] = {}
        self._children: dict[int, "PSModel"] = {}
        self._leaves: Optional[int] = None

    @classmethod
    def _restricted(cls, parent: "PSModel", mask: int) -> "PSModel":
        m = cls.__new__(cls)
        m._init(parent.frame, mask, parent)
        return m

    # -- structure -----------------------------------------------------------

    @property
    def tree(self) -> PreferenceTree:
        return self.frame.tree

    @property
    def sight(self) -> SightFunction:
        return self.frame.sight

    @property
    def states(self) -> frozenset[History]:
        return frozenset(self.frame.members(self.mask))

    @property
    def depth(self) -> int:
        """Number of restrictions applied since the initial model."""
        return 0 if self.parent is None else 1 + self.parent.depth

    def __contains__(self, h) -> bool:
        i = self.frame.index.get(h)
        return i is not None and bool(self.mask >> i & 1)

    def leaves(self) -> int:
        """``Z_X``: states without a descendant among the states."""
        if self._leaves is None:
            d = self.frame.desc
            self._leaves = sum(1 << i for i in bits(self.mask) if not d[i] & self.mask)
        return self._leaves

    def rank(self, i: int) -> Optional[Fraction]:
        if self.parent is None:
            return self.frame.payoff[i]
        try:
            return self._rank[i]
        except KeyError:
            pass
        below = self.leaves() & (self.frame.desc[i] | 1 << i)
        best = None
        for z in bits(below):
            r = self.parent.rank(z)
            if r is not None and (best is None or r > best):
                best = r
        self._rank[i] = best
        return best

    def geq_idx(self, i: int, j: int) -> bool:
        ri, rj = self.rank(i), self.rank(j)
        return ri is not None and rj is not None and ri >= rj

    # -- valuation ------------------------------------------------------------

    def at_val(self, h: History) -> frozenset[History]:
        return frozenset(self.frame.members(self.frame.prefix[self.frame.idx(h)] & self.mask))

    def sight_val(self, h: History) -> frozenset[History]:
        return frozenset(self.frame.members(self.frame.sight_mask[self.frame.idx(h)] & self.mask))

    def geq_val(self, h1: History, h2: History) -> bool:
        return self.geq_idx(self.frame.idx(h1), self.frame.idx(h2))

    def restrict(self, mask: int) -> "PSModel":
        """Restriction to a non-empty subset of the states (cached)."""
        if mask & ~self.mask:
            raise UnknownState("restriction is not a subset of the states")
        if not mask:
            raise EmptyRestriction("cannot restrict to the empty set")
        m = self._children.get(mask)
        if m is None:
            m = self._children[mask] = PSModel._restricted(self, mask)
        return m

    def __repr__(self):
        return f"PSModel(states={len(self.states)}, depth={self.depth})"


def mk_model(tree: PreferenceTree, sight: SightFunction) -> PSModel:
    return PSModel(tree, sight)


def is_prefix_closed_within(model: PSModel, mask: int) -> bool:
    pre = model.frame.prefix
    return all(pre[i] & model.mask & ~mask == 0 for i in bits(mask))


def update(model: PSModel, states: Iterable[History], require_closed: bool = True) -> PSModel:
    """Restrict ``model`` to ``states``.

    Announcements evaluated by the model checker restrict to arbitrary
    extensions; this entry point rejects sets that are not prefix-closed
    unless ``require_closed`` is false.
    """
    for h in states:
        if h not in model:
            raise UnknownState(f"{'.'.join(h) or '.'} is not a state of the model")
    mask = model.frame.mask(states)
    if not mask:
        raise EmptyRestriction("cannot restrict to the empty set")
    if require_closed and not is_prefix_closed_within(model, mask):
        raise NonPrefixClosedRestriction("restriction is not prefix-closed")
    return model.restrict(mask)


# ---------------------------------------------------------------------------
# evaluation

Hook = Callable[[PSModel, Formula, Callable], int]


def ext(model: PSModel, f: Formula, hook: Optional[Hook] = None) -> int:
    """Extension of ``f`` in ``model`` as a bitmask.

    ``hook(model, f, ext)`` handles node types outside this language.
    """
    fr = model.frame
    S = model.mask
    if isinstance(f, At):
        return fr.prefix[fr.idx(f.history)] & S
    if isinstance(f, Sg):
        return fr.sight_mask[fr.idx(f.history)] & S
    if isinstance(f, Geq):
        return S if model.geq_idx(fr.idx(f.left), fr.idx(f.right)) else 0
    if isinstance(f, Not):
        return S & ~ext(model, f.arg, hook)
    if isinstance(f, And):
        m = S
        for a in f.args:
            m &= ext(model, a, hook)
            if not m:
                break
        return m
    if isinstance(f, Or):
        m = 0
        for a in f.args:
            m |= ext(model, a, hook)
            if m == S:
                break
        return m
    if isinstance(f, Implies):
        left = ext(model, f.left, hook)
        if not left:
            return S
        return (S & ~left) | ext(model, f.right, hook)
    if isinstance(f, Iff):
        a, b = ext(model, f.left, hook), ext(model, f.right, hook)
        return S & ~(a ^ b)
    if isinstance(f, Univ):
        return S if ext(model, f.arg, hook) == S else 0
    if isinstance(f, Announce):
        X = ext(model, f.ann, hook)
        if not X:
            return S
        inner = ext(model.restrict(X), f.body, hook)
        return (S & ~X) | (X & inner)
    if isinstance(f, Possible):
        X = ext(model, f.ann, hook)
        if not X:
            return 0
        return X & ext(model.restrict(X), f.body, hook)
    if isinstance(f, Top):
        return S
    if isinstance(f, Bottom):
        return 0
    if hook is not None:
        return hook(model, f, lambda m, g: ext(m, g, hook))
    raise TypeError(f"cannot evaluate {type(f).__name__} in the preference-sight language")


def extension(model: PSModel, f: Formula) -> frozenset[History]:
    return frozenset(model.frame.members(ext(model, f)))


def evaluate(model: PSModel, state: History, f: Formula) -> bool:
    if state not in model:
        raise UnknownState(f"{'.'.join(state) or '.'} is not a state of the model")
    return bool(ext(model, f) >> model.frame.index[state] & 1)


@dataclass(frozen=True)
class Validity:
    ok: bool
    counter: Optional[History] = None

    def __bool__(self):
        return self.ok


def first_state(model: PSModel, mask: int) -> Optional[History]:
    """Canonically first history in ``mask`` (histories are indexed in order)."""
    if not mask:
        return None
    return model.frame.order[(mask & -mask).bit_length() - 1]


def valid(model: PSModel, f: Formula, hook: Optional[Hook] = None) -> Validity:
    bad = model.mask & ~ext(model, f, hook)
    return Validity(not bad, first_state(model, bad))


# ---------------------------------------------------------------------------
# characterization formulas


def z_formula(tree: PreferenceTree, sight: SightFunction, h: History) -> Formula:
    """Disjunction of the visible leaves at ``h``."""
    return big_or(At(z) for z in sorted(visible_tree(tree, sight, h).terminals, key=hkey))


def max_formula(tree: PreferenceTree, xs: Iterable[History]) -> Formula:
    """Disjunction of the objectively maximal members of ``xs``."""
    xs = sorted(set(xs), key=hkey)
    if not xs:
        return Bottom()
    top = max(tree.payoff[x] for x in xs)
    return big_or(At(x) for x in xs if tree.payoff[x] == top)


def bi_formula(tree: PreferenceTree) -> Formula:
    return big_or(At(z) for z in sorted(bi_set(tree), key=hkey))


def scbi_formula(tree: PreferenceTree, sight: SightFunction) -> Formula:
    return big_or(At(z) for z in sorted(scbi_set(tree, sight), key=hkey))


def below(a: History, b: History) -> Formula:
    """``A(a -> b)``: holds exactly when ``a`` is a prefix of ``b``."""
    return Univ(Implies(At(a), At(b)))


def consistency_formula(tree: PreferenceTree, sight: SightFunction) -> Formula:
    """Valid iff objective and subjective preference agree on every view."""
    parts = []
    for h in tree.histories:
        hs = sorted(sight[h], key=hkey)
        for h1 in hs:
            for h2 in hs:
                g = Geq(h1, h2)
                parts.append(And((Implies(g, Announce(Sg(h), g)), Implies(Possible(Sg(h), g), g))))
    return big_and(parts)


def sr_formula(tree: PreferenceTree, sight: SightFunction, h_star: History) -> Formula:
    """Valid iff every step of ``h_star`` is visible from its parent."""
    tree.check(h_star)
    parts = []
    for h in tree.histories:
        for ha in tree.children(h):
            parts.append(Implies(below(ha, h_star), Univ(Implies(At(ha), Sg(h)))))
    return big_and(parts)


def lo_formula(tree: PreferenceTree, sight: SightFunction, h_star: History) -> Formula:
    """Valid iff each visible leaf on ``h_star`` is a best visible leaf whose
    ties are exactly the visible leaves continuing to some BI history."""
    tree.check(h_star)
    bi = sorted(bi_set(tree), key=hkey)
    parts = []
    for h in tree.histories:
        zs = sorted(visible_tree(tree, sight, h).terminals, key=hkey)
        top = max_formula(tree, zs)
        for t in zs:
            ties = big_and(Iff(sim(t, t2), big_or(below(t2, z) for z in bi)) for t2 in zs)
            parts.append(Implies(below(t, h_star), And((Univ(Implies(At(t), top)), ties))))
    return big_and(parts)


def equivalence_formula(tree: PreferenceTree, sight: SightFunction) -> Formula:
    """``A(BI <-> SCBI)`` iff every BI history satisfies both conditions."""
    bi = bi_formula(tree)
    left = Univ(Iff(bi, scbi_formula(tree, sight)))
    right = big_and(
        Implies(Univ(Implies(At(z), bi)), And((sr_formula(tree, sight, z), lo_formula(tree, sight, z))))
        for z in sorted(tree.terminals, key=hkey)
    )
    return Iff(left, right)


def _steps(rel, start: History, k: int) -> set[History]:
    cur = {start}
    for _ in range(k):
        cur = {y for x in cur for y in rel.get(x, ())}
    return cur


def cfs_formula(tree: PreferenceTree, sight: SightFunction, strategy: Optional[Strategy] = None) -> Formula:
    """Local confluence of the (local BI or given) strategy on every view.

    At each ``h`` some visible leaf ``z`` is reached by the strategy and is at
    least as good as every visible leaf reached after any visible first move.
    A set-valued local BI relation contributes every path it allows.
    """
    conj = []
    for h in tree.histories:
        v = visible_tree(tree, sight, h)
        rel = local_relation(v, strategy)
        zs = sorted(v.terminals, key=hkey)
        disj = []
        for z in zs:
            for y in sorted(_steps(rel, h, len(z) - len(h)), key=hkey):
                rival = []
                for c in v.children(h):
                    for z2 in zs:
                        m = len(z2) - len(c)
                        if m < 0:
                            continue
                        for y2 in sorted(_steps(rel, c, m), key=hkey):
                            rival.append(Implies(Univ(Iff(At(y2), At(z2))), Geq(z, z2)))
                disj.append(And((Univ(Iff(At(y), At(z))), big_and(rival))))
        conj.append(big_or(disj))
    return big_and(conj)


def visible_tm_instances(tree: PreferenceTree, sight: SightFunction) -> Iterator[Formula]:
    """Conjuncts of the terminality principle transplanted to visible leaves."""
    for u in tree.histories:
        for z in sorted(visible_tree(tree, sight, u).terminals, key=hkey):
            for h in tree.histories:
                yield Implies(below(z, h), below(h, z))


def visible_tm_formula(tree: PreferenceTree, sight: SightFunction) -> Formula:
    return big_and(visible_tm_instances(tree, sight))


def sight_preference_formula(h: History, h1: History, h2: History) -> Formula:
    g = Geq(h1, h2)
    return Iff(Announce(Sg(h), g), Implies(Sg(h), g))


BUILDERS = {
    "Z": z_formula,
    "BI": lambda t, s: bi_formula(t),
    "SCBI": scbi_formula,
    "consistency": consistency_formula,
    "SR": sr_formula,
    "LO": lo_formula,
    "equivalence": equivalence_formula,
    "CFS": cfs_formula,
    "visible-TM": visible_tm_formula,
}


def build(name: str, tree: PreferenceTree, sight: SightFunction, *args) -> Formula:
    try:
        fn = BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown builder {name!r}; choose from {', '.join(BUILDERS)}") from None
    return fn(tree, sight, *args)


# ---------------------------------------------------------------------------
# valid principles


@dataclass(frozen=True)
class SuiteConfig:
    """Bounds for schema instantiation; larger families are sampled."""

    max_instances: int = 400
    ann_pool: int = 10
    body_pool: int = 10
    seed: int = 0


@dataclass(frozen=True)
class SchemaResult:
    name: str
    expected: str  # "valid", "invalid" or "open"
    verified: bool
    instances: int
    witness: Optional[Formula] = None
    state: Optional[History] = None

    @property
    def status(self) -> str:
        return "verified" if self.verified else "refuted"

    @property
    def unexpected(self) -> bool:
        return self.expected == "valid" and not self.verified


@dataclass(frozen=True)
class SuiteReport:
    results: tuple[SchemaResult, ...]

    def __getitem__(self, name: str) -> SchemaResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return not any(r.unexpected for r in self.results)


def _sample(items: Sequence, k: int, rng: random.Random) -> list:
    if len(items) <= k:
        return list(items)
    return [items[i] for i in sorted(rng.sample(range(len(items)), k))]


def _product(pools: Sequence[Sequence], k: int, rng: random.Random) -> list[tuple]:
    total = 1
    for p in pools:
        total *= len(p)
    if total <= k:
        return list(itertools.product(*pools))
    out = []
    for idx in sorted(rng.sample(range(total), k)):
        combo = []
        for p in reversed(pools):
            idx, r = divmod(idx, len(p))
            combo.append(p[r])
        out.append(tuple(reversed(combo)))
    return out


def atom_pool(model: PSModel, rng: random.Random, k: int, with_geq: bool = True) -> list[Formula]:
    hs = model.frame.order
    atoms: list[Formula] = [At(h) for h in hs] + [Sg(h) for h in hs]
    if with_geq:
        pairs = _product([hs, hs], max(k, 1), rng)
        atoms += [Geq(a, b) for a, b in pairs]
    return _sample(atoms, k, rng)


def announcement_pool(model: PSModel, rng: random.Random, k: int) -> list[Formula]:
    """Sight atoms and history atoms, with negations and small conjunctions."""
    hs = model.frame.order
    base: list[Formula] = [Sg(h) for h in hs] + [At(h) for h in hs]
    neg = [Not(a) for a in base]
    conj = [And((a, b)) for a, b in _product([base, base + neg], 4 * k, rng) if a != b]
    pool = _sample(base, max(1, k // 2), rng) + _sample(neg, max(1, k // 4), rng)
    pool += _sample(conj, max(1, k - len(pool)), rng)
    return pool


def body_pool(model: PSModel, rng: random.Random, k: int) -> list[Formula]:
    atoms = atom_pool(model, rng, k)
    anns = announcement_pool(model, rng, 2)
    extra = [Not(atoms[0]), Announce(anns[0], atoms[-1])] if atoms else []
    return atoms + extra


TAUT_TEMPLATES: tuple[Callable[[Formula, Formula, Formula], Formula], ...] = (
    lambda p, q, r: Or((p, Not(p))),
    lambda p, q, r: Implies(p, p),
    lambda p, q, r: Implies(And((p, q)), p),
    lambda p, q, r: Implies(p, Or((p, q))),
    lambda p, q, r: Implies(p, Implies(q, p)),
    lambda p, q, r: Implies(And((Implies(p, q), Implies(q, r))), Implies(p, r)),
    lambda p, q, r: Not(And((p, Not(p)))),
    lambda p, q, r: Iff(Not(Not(p)), p),
    lambda p, q, r: Iff(Not(And((p, q))), Or((Not(p), Not(q)))),
)


def schema_instances(name: str, model: PSModel, cfg: SuiteConfig) -> list[Formula]:
    """The instances of one schema on ``model`` (deterministic in ``cfg.seed``)."""
    rng = random.Random(f"{cfg.seed}:{name}")
    tree, sight = model.tree, model.sight
    hs = model.frame.order
    k = cfg.max_instances
    strict = [(a, b) for a in hs for b in hs if is_strict_prefix(a, b)]
    if name == "Taut":
        bodies = body_pool(model, rng, cfg.body_pool)
        combos = _product([TAUT_TEMPLATES, bodies, bodies, bodies], k, rng)
        return [t(p, q, r) for t, p, q, r in combos]
    if name == "T_geq":
        return [Geq(h, h) for h in _sample(hs, k, rng)]
    if name == "4_geq":
        return [Implies(And((Geq(a, b), Geq(b, c))), Geq(a, c)) for a, b, c in _product([hs, hs, hs], k, rng)]
    if name == "to_geq":
        return [Or((Geq(a, b), Geq(b, a))) for a, b in _product([hs, hs], k, rng)]
    if name == "T_s":
        return [Implies(At(h), Sg(h)) for h in _sample(hs, k, rng)]
    if name == "TM":
        zs = sorted(tree.terminals, key=hkey)
        return [Implies(below(z, h), below(h, z)) for z, h in _product([zs, hs], k, rng)]
    if name in ("DC", "NF"):
        chains = [(a, b, c) for a, b in strict for c in hs if is_strict_prefix(b, c)]
        out = []
        for h1, h2, h3 in _sample(chains, k, rng):
            tail = Univ(Implies(At(h2), Sg(h1))) if name == "DC" else Univ(Implies(At(h3), Sg(h2)))
            out.append(Implies(Univ(Implies(At(h3), Sg(h1))), tail))
        return out
    if name == "!ATOM-SP":
        anns = announcement_pool(model, rng, cfg.ann_pool)
        atoms = atom_pool(model, rng, cfg.body_pool, with_geq=False)
        return [Iff(Announce(f, p), Implies(f, p)) for f, p in _product([anns, atoms], k, rng)]
    if name == "!NEG":
        anns = announcement_pool(model, rng, cfg.ann_pool)
        bodies = body_pool(model, rng, cfg.body_pool)
        return [Iff(Announce(f, Not(p)), Implies(f, Not(Announce(f, p)))) for f, p in _product([anns, bodies], k, rng)]
    if name == "!CON":
        anns = announcement_pool(model, rng, cfg.ann_pool)
        bodies = body_pool(model, rng, cfg.body_pool)
        return [
            Iff(Announce(f, And((p, q))), And((Announce(f, p), Announce(f, q))))
            for f, p, q in _product([anns, bodies, bodies], k, rng)
        ]
    if name == "!COM":
        anns = announcement_pool(model, rng, cfg.ann_pool)
        bodies = body_pool(model, rng, cfg.body_pool)
        return [
            Iff(Announce(f, Announce(g, p)), Announce(And((f, Announce(f, g))), p))
            for f, g, p in _product([anns, anns, bodies], k, rng)
        ]
    if name == "Dual":
        anns = announcement_pool(model, rng, cfg.ann_pool)
        bodies = body_pool(model, rng, cfg.body_pool)
        return [Iff(Announce(f, p), Not(Possible(f, Not(p)))) for f, p in _product([anns, bodies], k, rng)]
    if name == "!Sight-Preference":
        return [sight_preference_formula(h, a, b) for h, a, b in _product([hs, hs, hs], k, rng)]
    if name == "visible-TM":
        return list(visible_tm_instances(tree, sight))
    raise KeyError(name)


# name -> expected classification
SCHEMAS: dict[str, str] = {
    "Taut": "valid",
    "T_geq": "valid",
    "4_geq": "valid",
    "to_geq": "valid",
    "T_s": "valid",
    "TM": "valid",
    "DC": "valid",
    "NF": "valid",
    "!ATOM-SP": "valid",
    "!NEG": "valid",
    "!CON": "valid",
    "!COM": "open",
    "Dual": "valid",
    "!Sight-Preference": "invalid",
    "visible-TM": "invalid",
}


def check_schema(name: str, model: PSModel, cfg: SuiteConfig = SuiteConfig()) -> SchemaResult:
    """Evaluate instances until one fails; the first failure is the witness."""
    expected = SCHEMAS[name]
    insts = schema_instances(name, model, cfg)
    for f in insts:
        v = valid(model, f)
        if not v:
            return SchemaResult(name, expected, False, len(insts), f, v.counter)
    return SchemaResult(name, expected, True, len(insts))


def axiom_suite(model: PSModel, cfg: SuiteConfig = SuiteConfig(), names: Optional[Iterable[str]] = None) -> SuiteReport:
    return SuiteReport(tuple(check_schema(n, model, cfg) for n in (names or SCHEMAS)))
