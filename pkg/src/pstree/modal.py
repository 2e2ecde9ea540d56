"""Modal logic of best action over preference-sight models, and its frame suite.

Evaluation contexts
-------------------
A context is a model (initial or restricted) plus a flag telling whether we
are inside a ``[view]``.  Tree relations (``move``, ``bi``, ``scbi``) are
restricted to the current states.  View-relative operators (``movev``,
``biv``, ``BIv``, ``endv``) work on the visible tree given by a state set
``V``: inside a view ``V`` is the current state set, outside a view it is the
sight of the evaluation state.  ``<leq>`` compares by the current model's
preference, which is subjective after a view update.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence

from .core import History, PreferenceTree, hkey, mk_tree
from .errors import UnknownProposition, UnknownStrategy, UnknownState
from .formula import (
    And, Box, Dia, End, EndView, Formula, Iff, Implies, Leq, Not, Prop, Sigma, View, MODAL_OPS,
)
from .logic import PSModel, _Frame, bits, ext as _lext, first_state
from .sight import SightFunction, full_sight
from .solve import Strategy, all_strategies, bi_set, bi_sight_gfp, classical_bi_relation, random_strategy, scbi_relation, scbi_set, strategy_count

STAR_BASE = {"bi*": "bi", "scbi*": "scbi", "biv*": "biv"}


class _Relations:
    """Per-frame relation masks, computed once."""

    def __init__(self, fr: _Frame):
        t = fr.tree
        self.bi = [0] * fr.n
        for h, kids in classical_bi_relation(t).moves.items():
            self.bi[fr.index[h]] = fr.mask(kids)
        self.scbi = [0] * fr.n
        for h, kids in scbi_relation(bi_sight_gfp(t, fr.sight, check=False)).items():
            self.scbi[fr.index[h]] = fr.mask(kids)
        self.bi_set = fr.mask(bi_set(t))
        self.scbi_set = fr.mask(scbi_set(t, fr.sight))
        self.views: dict[int, "_View"] = {}


class _View:
    """Visible tree determined by a prefix-closed state set ``V``."""

    def __init__(self, fr: _Frame, V: int):
        self.mask = V
        self.leaves = sum(1 << i for i in bits(V) if not fr.desc[i] & V)
        value: dict[int, Fraction] = {}
        for i in sorted(bits(V), key=lambda i: -len(fr.order[i])):
            kids = fr.children[i] & V
            value[i] = fr.payoff[i] if not kids else max(value[c] for c in bits(kids))
        self.bi = {}
        for i in bits(V):
            kids = fr.children[i] & V
            if kids:
                top = value[i]
                self.bi[i] = sum(1 << c for c in bits(kids) if value[c] == top)
        if self.leaves:
            top = max(fr.payoff[z] for z in bits(self.leaves))
            self.lm = sum(1 << z for z in bits(self.leaves) if fr.payoff[z] == top)
        else:
            self.lm = 0


def _relations(fr: _Frame) -> _Relations:
    r = getattr(fr, "_modal", None)
    if r is None:
        r = fr._modal = _Relations(fr)
    return r


@dataclass
class ModalChecker:
    """Evaluator for one valuation/strategy environment.

    ``relations`` may override the one-step ``bi`` relation (a list of child
    masks per history index); ``best`` and ``bi*`` follow the override.
    """

    valuation: Mapping[str, frozenset] = field(default_factory=dict)
    strategies: Mapping[str, Strategy] = field(default_factory=dict)
    in_view: bool = False
    bi_override: Optional[Sequence[int]] = None

    # -- helpers ---------------------------------------------------------------

    def _view(self, m: PSModel, i: int) -> _View:
        fr = m.frame
        V = m.mask if self.in_view else fr.sight_mask[i] & m.mask
        rel = _relations(fr)
        v = rel.views.get(V)
        if v is None:
            v = rel.views[V] = _View(fr, V)
        return v

    def _step(self, m: PSModel, op: str, i: int, view: Optional[_View] = None) -> int:
        fr = m.frame
        S = m.mask
        if op == "move":
            return fr.children[i] & S
        if op in ("best", "bi"):
            src = self.bi_override if self.bi_override is not None else _relations(fr).bi
            return src[i] & S
        if op == "scbi":
            return _relations(fr).scbi[i] & S
        view = view or self._view(m, i)
        if op == "movev":
            return fr.children[i] & view.mask
        if op in ("bestv", "biv"):
            return view.bi.get(i, 0)
        raise KeyError(op)

    def successors(self, m: PSModel, op: str, i: int) -> int:
        if op not in MODAL_OPS:
            raise ValueError(f"unknown modality {op!r}")
        rel = _relations(m.frame)
        if op == "BI":
            return rel.bi_set & m.mask
        if op == "SCBI":
            return rel.scbi_set & m.mask
        if op == "BIv":
            return self._view(m, i).lm
        if op in STAR_BASE:
            base = STAR_BASE[op]
            view = self._view(m, i) if base == "biv" else None
            seen = 1 << i
            frontier = [i]
            while frontier:
                j = frontier.pop()
                new = self._step(m, base, j, view) & ~seen
                seen |= new
                frontier.extend(bits(new))
            return seen
        return self._step(m, op, i)

    # -- evaluation ------------------------------------------------------------

    def ext(self, m: PSModel, f: Formula) -> int:
        return _lext(m, f, self._hook)

    def _hook(self, m: PSModel, f: Formula, recurse) -> int:
        fr = m.frame
        S = m.mask
        if isinstance(f, Prop):
            try:
                hs = self.valuation[f.name]
            except KeyError:
                raise UnknownProposition(f"no valuation for proposition {f.name!r}") from None
            return fr.mask(h for h in hs if h in fr.index) & S
        if isinstance(f, End):
            return fr.terminal & S
        if isinstance(f, EndView):
            if self.in_view:
                return m.leaves()
            return sum(1 << i for i in bits(S) if not fr.desc[i] & fr.sight_mask[i] & S)
        if isinstance(f, (Box, Dia)):
            F = self.ext(m, f.arg)
            out = 0
            for i in bits(S):
                succ = self.successors(m, f.op, i)
                if (isinstance(f, Box) and not succ & ~F) or (isinstance(f, Dia) and succ & F):
                    out |= 1 << i
            return out
        if isinstance(f, View):
            inner = ModalChecker(self.valuation, self.strategies, True, self.bi_override)
            cache: dict[int, int] = {}
            out = 0
            for i in bits(S):
                X = fr.sight_mask[i] & S
                if X not in cache:
                    cache[X] = inner.ext(m.restrict(X), f.arg)
                if cache[X] >> i & 1:
                    out |= 1 << i
            return out
        if isinstance(f, Leq):
            F = self.ext(m, f.arg)
            out = 0
            for i in bits(S):
                if any(m.geq_idx(u, i) for u in bits(F)):
                    out |= 1 << i
            return out
        if isinstance(f, Sigma):
            try:
                sigma = self.strategies[f.name]
            except KeyError:
                raise UnknownStrategy(f"unknown strategy {f.name!r}") from None
            F = self.ext(m, f.arg)
            out = 0
            for i in bits(S):
                h = fr.order[i]
                while True:
                    a = sigma.get(h)
                    nxt = fr.index.get(h + (a,)) if a is not None else None
                    if nxt is None or not S >> nxt & 1:
                        break
                    h = fr.order[nxt]
                if F >> fr.index[h] & 1:
                    out |= 1 << i
            return out
        raise TypeError(f"cannot evaluate {type(f).__name__}")


def modal_model(tree: PreferenceTree, sight: SightFunction) -> PSModel:
    return PSModel(tree, sight)


def modal_ext(model: PSModel, f: Formula, valuation=None, strategies=None) -> frozenset[History]:
    mask = ModalChecker(valuation or {}, strategies or {}).ext(model, f)
    return frozenset(model.frame.members(mask))


def eval_modal(
    tree: PreferenceTree,
    sight: SightFunction,
    state: History,
    f: Formula,
    valuation: Optional[Mapping[str, frozenset]] = None,
    strategies: Optional[Mapping[str, Strategy]] = None,
    model: Optional[PSModel] = None,
) -> bool:
    m = model or PSModel(tree, sight)
    if state not in m:
        raise UnknownState(f"{'.'.join(state) or '.'} is not a state")
    mask = ModalChecker(valuation or {}, strategies or {}).ext(m, f)
    return bool(mask >> m.frame.index[state] & 1)


def modal_valid(model: PSModel, f: Formula, valuation=None, strategies=None) -> Optional[History]:
    """First falsifying state, or ``None`` when ``f`` holds everywhere."""
    mask = ModalChecker(valuation or {}, strategies or {}).ext(model, f)
    return first_state(model, model.mask & ~mask)


# ---------------------------------------------------------------------------
# frame suite

P = Prop("p")


def _sigma_names(n: int) -> list[str]:
    return [f"s{i}" for i in range(n)]


def _end_p():
    return And((End(), P))


def _endv_p():
    return And((EndView(), P))


# Each schema: (expected, formula builder taking a strategy name or None, uses strategies)
def _schemas() -> dict[str, tuple[str, Callable[[Optional[str]], Formula], bool]]:
    ep, evp = _end_p(), _endv_p()
    return {
        # best-action characterization of bi
        "bi-axiom": ("valid", lambda s: Implies(
            Dia("bi*", ep), Box("move", Dia("bi*", And((End(), Leq(P))))),
        ), False),
        # an scbi move is a local BI move of the current view
        "scbi-step": ("valid", lambda s: Iff(Dia("scbi", P), View(Dia("biv", P))), False),
        "scbi-view-axiom": ("valid", lambda s: View(Implies(
            Dia("biv*", evp), Box("movev", Dia("biv*", And((EndView(), Leq(P))))),
        )), False),
        "bi-best-closure": ("valid", lambda s: Implies(
            Not(End()), Iff(Dia("best", Dia("bi*", ep)), Dia("bi*", ep)),
        ), False),
        "scbi-best-closure": ("invalid", lambda s: Implies(
            Not(End()), Iff(Dia("best", Dia("scbi*", ep)), Dia("scbi*", ep)),
        ), False),
        "view-global-best-closure": ("invalid", lambda s: View(Implies(
            Not(EndView()), Iff(Dia("best", Dia("biv*", evp)), Dia("biv*", evp)),
        )), False),
        "view-best-closure": ("valid", lambda s: View(Implies(
            Not(EndView()), Iff(Dia("bestv", Dia("biv*", evp)), Dia("biv*", evp)),
        )), False),
        "view-best-preferred": ("valid", lambda s: View(Implies(Dia("bestv", P), Box("movev", Leq(P)))), False),
        "bi-best-preferred": ("invalid", lambda s: Implies(Dia("best", P), Box("move", Leq(P))), False),
        "BI-idempotent": ("valid", lambda s: Implies(Box("BI", P), Box("BI", Box("BI", P))), False),
        "BIv-idempotent": ("invalid", lambda s: Implies(Box("BIv", P), Box("BIv", Box("BIv", P))), False),
        "SCBI-idempotent": ("valid", lambda s: Implies(Box("SCBI", P), Box("SCBI", Box("SCBI", P))), False),
        "bi-dominates-strategies": ("valid", lambda s: Implies(Dia("BI", P), Sigma(s, Leq(P))), True),
        "scbi-dominates-strategies": ("invalid", lambda s: Implies(Dia("SCBI", P), Sigma(s, Leq(P))), True),
        "view-bi-dominates-view-strategies": ("valid", lambda s: View(Implies(Dia("BIv", P), Sigma(s, Leq(P)))), True),
    }


FRAME_SCHEMAS = _schemas()


@dataclass(frozen=True)
class FrameConfig:
    random_valuations: int = 100
    max_terminal_subsets: int = 256
    max_strategies: int = 32
    seed: int = 0


@dataclass(frozen=True)
class FrameWitness:
    valuation: frozenset
    state: History
    strategy: Optional[dict] = None


@dataclass(frozen=True)
class FrameResult:
    name: str
    expected: str
    verified: bool
    checks: int
    witness: Optional[FrameWitness] = None

    @property
    def status(self) -> str:
        return "verified" if self.verified else "refuted"

    @property
    def unexpected(self) -> bool:
        return self.expected == "valid" and not self.verified


@dataclass(frozen=True)
class FrameReport:
    results: tuple[FrameResult, ...]

    def __getitem__(self, name: str) -> FrameResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return not any(r.unexpected for r in self.results)


def valuations(tree: PreferenceTree, cfg: FrameConfig) -> Iterator[frozenset]:
    """Singletons, terminal subsets, then random subsets of all histories."""
    rng = random.Random(f"{cfg.seed}:valuations")
    hs = tree.histories
    for h in hs:
        yield frozenset({h})
    zs = sorted(tree.terminals, key=hkey)
    if 2 ** len(zs) <= cfg.max_terminal_subsets:
        for r in range(len(zs) + 1):
            for combo in itertools.combinations(zs, r):
                yield frozenset(combo)
    else:
        for _ in range(cfg.max_terminal_subsets):
            yield frozenset(z for z in zs if rng.random() < 0.5)
    for _ in range(cfg.random_valuations):
        yield frozenset(h for h in hs if rng.random() < 0.5)


def strategy_pool(tree: PreferenceTree, cfg: FrameConfig) -> list[dict]:
    if strategy_count(tree) <= cfg.max_strategies:
        return [dict(s) for s in all_strategies(tree)]
    rng = random.Random(f"{cfg.seed}:strategies")
    return [random_strategy(tree, rng) for _ in range(cfg.max_strategies)]


def check_frame_schema(name: str, model: PSModel, cfg: FrameConfig = FrameConfig()) -> FrameResult:
    expected, make, uses_sigma = FRAME_SCHEMAS[name]
    tree = model.tree
    sigmas = strategy_pool(tree, cfg) if uses_sigma else [None]
    checks = 0
    for k, sigma in enumerate(sigmas):
        f = make("s" if sigma is not None else None)
        env = {"s": sigma} if sigma is not None else {}
        for val in valuations(tree, cfg):
            checks += 1
            bad = model.mask & ~ModalChecker({"p": val}, env).ext(model, f)
            if bad:
                return FrameResult(name, expected, False, checks, FrameWitness(val, first_state(model, bad), sigma))
    return FrameResult(name, expected, True, checks)


def frame_suite(tree: PreferenceTree, sight: SightFunction, cfg: FrameConfig = FrameConfig(), names=None) -> FrameReport:
    model = PSModel(tree, sight)
    return FrameReport(tuple(check_frame_schema(n, model, cfg) for n in (names or FRAME_SCHEMAS)))


# ---------------------------------------------------------------------------
# uniqueness of the bi relation on small trees


def tree_shapes(max_nodes: int) -> list[tuple]:
    """All unordered rooted trees with at most ``max_nodes`` nodes.

    A shape is a sorted tuple of child shapes; a leaf is ``()``.
    """
    by_size: dict[int, list[tuple]] = {1: [()]}
    for n in range(2, max_nodes + 1):
        shapes = set()
        # children multiset with sizes summing to n - 1
        def forests(total: int, max_size: int) -> Iterator[tuple]:
            if total == 0:
                yield ()
                return
            for size in range(min(total, max_size), 0, -1):
                for s in by_size[size]:
                    for rest in forests(total - size, size):
                        yield (s,) + rest
        for forest in forests(n - 1, n - 1):
            shapes.add(tuple(sorted(forest)))
        by_size[n] = sorted(shapes)
    return [s for n in range(1, max_nodes + 1) for s in by_size[n]]


def shape_histories(shape: tuple, prefix: History = ()) -> list[History]:
    out = [prefix]
    for k, child in enumerate(shape):
        out += shape_histories(child, prefix + (chr(ord("a") + k),))
    return out


def _subrelations(tree: PreferenceTree) -> Iterator[dict[History, tuple[History, ...]]]:
    internal = [h for h in tree.histories if not tree.is_terminal(h)]
    choices = []
    for h in internal:
        kids = tree.children(h)
        choices.append([c for r in range(1, len(kids) + 1) for c in itertools.combinations(kids, r)])
    for pick in itertools.product(*choices):
        yield dict(zip(internal, pick))


def _outcomes(tree: PreferenceTree, rel) -> dict[History, frozenset[History]]:
    out: dict[History, frozenset[History]] = {}
    for h in sorted(tree.histories, key=lambda h: -len(h)):
        out[h] = frozenset({h}) if tree.is_terminal(h) else frozenset().union(*(out[c] for c in rel[h]))
    return out


def axiom_holds(tree: PreferenceTree, rel, valuation: frozenset) -> bool:
    """Direct semantics of the bi axiom for relation ``rel`` and one valuation
    (``<leq>`` ranges over all histories by payoff)."""
    pay = tree.payoff
    outs = _outcomes(tree, rel)
    best_p = max((pay[u] for u in valuation), default=None)
    for h in tree.histories:
        if not outs[h] & valuation:
            continue
        for c in tree.children(h):
            if best_p is None or not any(best_p >= pay[v] for v in outs[c]):
                return False
    return True


def satisfying_relations(tree: PreferenceTree) -> list[dict]:
    """Every everywhere-successor subrelation of ``move`` satisfying the bi
    axiom for all terminal-subset valuations (singletons checked first)."""
    zs = sorted(tree.terminals, key=hkey)
    vals = [frozenset(c) for r in range(1, len(zs) + 1) for c in itertools.combinations(zs, r)]
    return [rel for rel in _subrelations(tree) if all(axiom_holds(tree, rel, v) for v in vals)]


@dataclass(frozen=True)
class UniquenessReport:
    trees: int
    relations: int
    failures: tuple  # (tree, satisfying relations) where the only one is not bi

    @property
    def ok(self) -> bool:
        return not self.failures


def bi_uniqueness(max_nodes: int = 7) -> UniquenessReport:
    """Exhaustively confirm that bi is the only relation satisfying the axiom,
    over all shapes with at most ``max_nodes`` nodes and every ranking of
    distinct terminal payoffs."""
    trees = rels = 0
    failures = []
    for shape in tree_shapes(max_nodes):
        hs = shape_histories(shape)
        leaves = [h for h in hs if not any(len(x) == len(h) + 1 and x[:-1] == h for x in hs)]
        for perm in itertools.permutations(range(1, len(leaves) + 1)):
            pay = {h: 0 for h in hs}
            pay.update(zip(leaves, perm))
            t = mk_tree(pay)
            trees += 1
            sat = satisfying_relations(t)
            rels += 1
            bi = {h: tuple(sorted(v)) for h, v in classical_bi_relation(t).moves.items() if v}
            if len(sat) != 1 or {h: tuple(sorted(v)) for h, v in sat[0].items()} != bi:
                failures.append((t, sat))
    return UniquenessReport(trees, rels, tuple(failures))
