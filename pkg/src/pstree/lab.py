"""Random instances, witness hunting and the sight-versus-payoff sweep."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .core import History, PreferenceTree, ROOT, fmt, hkey
from .errors import NotFound
from .sight import SightFunction, full_sight, horizon_sight, repair_sight, validate_sight
from .solve import scbi_set

ACTIONS = "abcdefghij"


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one random preference-sight tree.

    ``sight`` is ``"full"``, ``"horizon:K"`` or ``"random"``.  Non-root
    internal positions stop early with probability ``leaf_prob``.
    """

    depth: int = 3
    branching: int = 2
    low: Fraction = Fraction(0)
    high: Fraction = Fraction(10)
    distinct: bool = True
    sight: str = "random"
    seed: int = 0
    leaf_prob: float = 0.25
    see_prob: float = 0.5

    def __post_init__(self):
        if self.depth < 0 or self.branching < 1:
            raise ValueError("need depth >= 0 and branching >= 1")
        if self.low > self.high:
            raise ValueError("empty payoff range")


def random_shape(rng: random.Random, depth: int, branching: int, leaf_prob: float) -> list[History]:
    hs = [ROOT]
    frontier = [ROOT]
    while frontier:
        h = frontier.pop(0)
        if len(h) >= depth:
            continue
        if h and rng.random() < leaf_prob:
            continue
        for a in ACTIONS[: rng.randint(1, branching)]:
            hs.append(h + (a,))
            frontier.append(h + (a,))
    return hs


def random_payoffs(rng: random.Random, hs: list[History], spec: GenSpec) -> dict[History, Fraction]:
    lo, hi = Fraction(spec.low), Fraction(spec.high)
    if spec.distinct:
        n = len(hs)
        ranks = list(range(n))
        rng.shuffle(ranks)
        step = (hi - lo) / max(n - 1, 1)
        return {h: lo + step * r for h, r in zip(hs, ranks)}
    span = int(hi - lo)
    return {h: lo + rng.randint(0, max(span, 0)) for h in hs}


def random_sight(tree: PreferenceTree, rng: random.Random, see_prob: float = 0.5) -> SightFunction:
    """Per history, a random downward-closed visible region, then closed under NF.

    Every non-terminal history sees at least one child, so SCBI is never empty.
    """
    raw = {}
    for h in tree.histories:
        seen = {h}
        kids = list(tree.children(h))
        if kids:
            first = rng.choice(kids)
            seen.add(first)
        stack = list(kids)
        while stack:
            x = stack.pop()
            if x in seen or rng.random() < see_prob:
                seen.add(x)
                stack.extend(tree.children(x))
        raw[h] = seen
    return repair_sight(tree, raw)


def make_sight(tree: PreferenceTree, kind: str, rng: random.Random, see_prob: float = 0.5) -> SightFunction:
    if kind == "full":
        return full_sight(tree)
    if kind.startswith("horizon:"):
        return horizon_sight(tree, int(kind.split(":", 1)[1]))
    if kind == "random" or kind.startswith("random:"):
        if ":" in kind:
            rng = random.Random(int(kind.split(":", 1)[1]))
        return random_sight(tree, rng, see_prob)
    raise ValueError(f"unknown sight kind {kind!r}")


def random_instance(spec: GenSpec) -> tuple[PreferenceTree, SightFunction]:
    """Deterministic in ``spec.seed``."""
    rng = random.Random(spec.seed)
    hs = random_shape(rng, spec.depth, spec.branching, spec.leaf_prob)
    tree = PreferenceTree(random_payoffs(rng, hs, spec))
    return tree, make_sight(tree, spec.sight, rng, spec.see_prob)


def trial_seed(master: int, index: int) -> int:
    """Per-trial seed derived from the master seed (64-bit)."""
    return random.Random(f"{master}:{index}").getrandbits(64)


def instances(
    n: int,
    seed: int,
    max_depth: int = 4,
    max_branching: int = 3,
    distinct: bool = True,
    sight: str = "random",
) -> Iterator[tuple[GenSpec, PreferenceTree, SightFunction]]:
    """``n`` random instances with depth and branching drawn per trial."""
    for i in range(n):
        s = trial_seed(seed, i)
        rng = random.Random(s)
        spec = GenSpec(
            depth=rng.randint(0, max_depth),
            branching=rng.randint(1, max_branching),
            distinct=distinct,
            sight=sight,
            seed=s,
        )
        tree, sf = random_instance(spec)
        yield spec, tree, sf


# ---------------------------------------------------------------------------
# nested sights: which of the two outcomes is better?


@dataclass(frozen=True)
class NestedWitness:
    """``s1 ⊆ s2`` pointwise; ``z1``/``z2`` are SCBI outcomes under each."""

    case: str
    tree: PreferenceTree
    s1: SightFunction
    s2: SightFunction
    z1: History
    z2: History
    trial: int


FACT6_CASES = {
    "a": lambda p1, p2: p1 > p2,
    "b": lambda p1, p2: p2 > p1,
    "c": lambda p1, p2: p1 == p2,
}


def _widen(tree: PreferenceTree, s1: SightFunction, rng: random.Random) -> SightFunction:
    if rng.random() < 0.3:
        return full_sight(tree)
    raw = {h: set(v) for h, v in s1.items()}
    for h in tree.histories:
        for x in tree.subtree(h):
            if x not in raw[h] and rng.random() < 0.3:
                raw[h].add(x)
    return repair_sight(tree, raw)


def nested_pair(tree: PreferenceTree, s1: SightFunction, s2: SightFunction, case: str) -> Optional[tuple[History, History]]:
    """First ``(z1, z2)`` in canonical order satisfying ``case``, if any."""
    if not s1.issubset(s2):
        return None
    pay = tree.payoff
    test = FACT6_CASES[case]
    for z1 in sorted(scbi_set(tree, s1), key=hkey):
        for z2 in sorted(scbi_set(tree, s2), key=hkey):
            if test(pay[z1], pay[z2]):
                return z1, z2
    return None


def _drop_subtree(tree: PreferenceTree, h: History, sights: list[SightFunction]):
    keep = {x: p for x, p in tree.payoff.items() if x[: len(h)] != h}
    t2 = PreferenceTree(keep)
    return t2, [SightFunction(t2, {x: [y for y in s[x] if y in keep] for x in keep}) for s in sights]


def shrink_nested(w: NestedWitness) -> NestedWitness:
    """Greedily drop subtrees and sight entries while the witness survives."""
    tree, s1, s2 = w.tree, w.s1, w.s2
    changed = True
    while changed:
        changed = False
        for h in sorted(tree.histories, key=hkey, reverse=True):
            if not h or h not in tree:
                continue
            t2, (a, b) = _drop_subtree(tree, h, [s1, s2])
            if nested_pair(t2, a, b, w.case):
                tree, s1, s2, changed = t2, a, b, True
        for which in (2, 1):
            for h in sorted(tree.histories, key=hkey):
                cur = s2 if which == 2 else s1
                for x in sorted(cur[h], key=hkey, reverse=True):
                    if x == h or (which == 2 and x in s1[h]):
                        continue
                    raw = {k: set(v) for k, v in cur.items()}
                    raw[h].discard(x)
                    if validate_sight(tree, raw):
                        continue
                    cand = SightFunction(tree, raw)
                    pair = (s1, cand) if which == 2 else (cand, s2)
                    if nested_pair(tree, *pair, w.case):
                        s1, s2 = pair
                        cur = cand
                        changed = True
    z1, z2 = nested_pair(tree, s1, s2, w.case)
    return NestedWitness(w.case, tree, s1, s2, z1, z2, w.trial)


def hunt_fact6(case: str, trials: int = 10_000, seed: int = 0, max_depth: int = 3, max_branching: int = 3, shrink: bool = True) -> NestedWitness:
    """Search for nested sights whose SCBI outcomes compare as ``case`` says.

    Case ``a``: the narrower sight does strictly better; ``b``: strictly
    worse; ``c``: equally well.  Raises :class:`NotFound` after ``trials``.
    """
    if case not in FACT6_CASES:
        raise ValueError(f"unknown case {case!r}; expected a, b or c")
    if trials < 1:
        raise ValueError("trials must be positive")
    for i, (spec, tree, s1) in enumerate(instances(trials, seed, max_depth, max_branching)):
        rng = random.Random(spec.seed ^ 0x5EED)
        s2 = _widen(tree, s1, rng)
        pair = nested_pair(tree, s1, s2, case)
        if pair:
            w = NestedWitness(case, tree, s1, s2, pair[0], pair[1], i)
            w = shrink_nested(w) if shrink else w
            if not verify_nested(w):
                raise AssertionError("witness failed verification")
            return w
    raise NotFound(f"no witness for case {case} in {trials} trials")


def verify_nested(w: NestedWitness) -> bool:
    for s in (w.s1, w.s2):
        if validate_sight(w.tree, dict(s.items())):
            return False
    return (
        w.s1.issubset(w.s2)
        and w.z1 in scbi_set(w.tree, w.s1)
        and w.z2 in scbi_set(w.tree, w.s2)
        and FACT6_CASES[w.case](w.tree.payoff[w.z1], w.tree.payoff[w.z2])
    )


# ---------------------------------------------------------------------------
# schema counterexamples


@dataclass(frozen=True)
class SchemaCounterexample:
    schema: str
    source: str  # "fixture:NAME" or "trial:N"
    tree: PreferenceTree
    sight: SightFunction
    instance: str  # formula text, or the valuation of p for frame schemas
    state: History


def _refute(name: str, tree: PreferenceTree, sight: SightFunction, seed: int):
    from .logic import SCHEMAS, SuiteConfig, check_schema, mk_model, valid
    from .modal import FRAME_SCHEMAS, FrameConfig, ModalChecker, check_frame_schema

    model = mk_model(tree, sight)
    if name in SCHEMAS:
        r = check_schema(name, model, SuiteConfig(seed=seed))
        if r.verified:
            return None
        assert not valid(model, r.witness), "counterexample failed re-evaluation"
        return str(r.witness), r.state
    r = check_frame_schema(name, model, FrameConfig(seed=seed, random_valuations=20))
    if r.verified:
        return None
    w = r.witness
    f = FRAME_SCHEMAS[name][1]("s" if w.strategy is not None else None)
    env = {"s": w.strategy} if w.strategy is not None else {}
    mask = ModalChecker({"p": w.valuation}, env).ext(model, f)
    assert not mask >> model.frame.index[w.state] & 1, "counterexample failed re-evaluation"
    val = "{" + ", ".join(fmt(h) for h in sorted(w.valuation, key=hkey)) + "}"
    text = f"{f} with p = {val}"
    if w.strategy is not None:
        text += " and s = {" + ", ".join(f"{fmt(h)}:{a}" for h, a in sorted(w.strategy.items(), key=lambda kv: hkey(kv[0]))) + "}"
    return text, w.state


def schema_names() -> list[str]:
    from .logic import SCHEMAS
    from .modal import FRAME_SCHEMAS

    return list(SCHEMAS) + list(FRAME_SCHEMAS)


def hunt_schema(name: str, trials: int = 1000, seed: int = 0, max_depth: int = 3, max_branching: int = 3) -> SchemaCounterexample:
    """Falsify a registered schema: shipped fixtures first, then random trees."""
    from .fixtures import all_fixtures

    if name not in schema_names():
        raise ValueError(f"unknown schema {name!r}")
    for fname, (tree, sight) in all_fixtures().items():
        hit = _refute(name, tree, sight, seed)
        if hit:
            return SchemaCounterexample(name, f"fixture:{fname}", tree, sight, hit[0], hit[1])
    for i, (spec, tree, sight) in enumerate(instances(trials, seed, max_depth, max_branching)):
        hit = _refute(name, tree, sight, seed)
        if hit:
            return SchemaCounterexample(name, f"trial:{i}", tree, sight, hit[0], hit[1])
    raise NotFound(f"no counterexample to {name} in {trials} trials")


# ---------------------------------------------------------------------------
# sight versus payoff

SWEEP_COLUMNS = ("seed", "depth", "branch", "horizon", "scbi_payoff", "bi_payoff")


def scbi_payoff(tree: PreferenceTree, sight: SightFunction) -> Optional[Fraction]:
    """Payoff guaranteed by SCBI: the worst member, ``None`` when SCBI is empty."""
    sc = scbi_set(tree, sight)
    return min((tree.payoff[z] for z in sc), default=None)


def bi_payoff(tree: PreferenceTree) -> Fraction:
    return max(tree.payoff[z] for z in tree.terminals)


def sweep(horizons: Iterable[int], trials: int, seed: int = 0, max_depth: int = 4, max_branching: int = 3) -> list[dict]:
    """One row per (instance, horizon) with the SCBI and BI payoffs."""
    horizons = list(horizons)
    if not horizons:
        raise ValueError("empty horizon grid")
    rows = []
    for spec, tree, _ in instances(trials, seed, max_depth, max_branching, sight="full"):
        best = bi_payoff(tree)
        for k in horizons:
            rows.append({
                "seed": spec.seed, "depth": tree.depth, "branch": spec.branching,
                "horizon": k, "scbi_payoff": scbi_payoff(tree, horizon_sight(tree, k)), "bi_payoff": best,
            })
    return rows


def sweep_custom(tree: PreferenceTree, sights: Iterable[tuple[str, SightFunction]], seed: int = 0, branch: int = 0) -> list[dict]:
    """Rows for hand-picked sights; the horizon column carries the label."""
    best = bi_payoff(tree)
    return [
        {"seed": seed, "depth": tree.depth, "branch": branch, "horizon": label,
         "scbi_payoff": scbi_payoff(tree, s), "bi_payoff": best}
        for label, s in sights
    ]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def write_csv(rows: list[dict], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_cell(r[c]) for c in SWEEP_COLUMNS])


def non_monotone(rows: list[dict]) -> list[tuple[int, object, object]]:
    """``(seed, k, k')`` where widening the horizon from ``k`` to ``k'`` lowered the SCBI payoff."""
    out = []
    by_seed: dict[int, list[dict]] = {}
    for r in rows:
        by_seed.setdefault(r["seed"], []).append(r)
    for s, rs in by_seed.items():
        rs = [r for r in rs if r["scbi_payoff"] is not None]
        for a, b in zip(rs, rs[1:]):
            if b["scbi_payoff"] < a["scbi_payoff"]:
                out.append((s, a["horizon"], b["horizon"]))
    return out
