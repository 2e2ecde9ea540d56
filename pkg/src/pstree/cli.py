"""``pst`` command line.

Exit status: 0 success or property verified, 1 property refuted (witness
printed), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .core import fmt, fmt_set, hkey
from .equivalence import equivalence_verdict, follows_local_maxima
from .errors import NotFound, ParseError, PstError
from .lab import GenSpec, hunt_fact6, hunt_schema, random_instance, schema_names, sweep, write_csv
from .logic import SuiteConfig, axiom_suite, mk_model
from .modal import FrameConfig, ModalChecker, bi_uniqueness, frame_suite
from .solve import bi_set, scbi_set
from .textio import fmt_payoff, load_pst, parse_formula, parse_path, serialize_pst
from .visible import visible_tree

OK, REFUTED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(args):
    try:
        return load_pst(args.file, repair=getattr(args, "repair", False))
    except ParseError as e:
        raise UsageError(f"{args.file}:{e}") from None
    except OSError as e:
        raise UsageError(f"{args.file}: {e.strerror}") from None


def _path(text: str, tree=None):
    h = parse_path(text)
    if h is None:
        raise UsageError(f"malformed path {text!r}")
    if tree is not None and h not in tree:
        raise UsageError(f"unknown history {text}")
    return h


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    tree, sight = _load(args)
    if args.emit:
        sys.stdout.write(serialize_pst(tree, sight))
    else:
        print(f"ok: {len(tree)} histories, {len(tree.terminals)} terminal")
    return OK


def cmd_solve(args) -> int:
    tree, sight = _load(args)
    print(f"BI: {fmt_set(bi_set(tree))}  SCBI: {fmt_set(scbi_set(tree, sight))}")
    return OK


def cmd_visible(args) -> int:
    tree, sight = _load(args)
    h = _path(args.at, tree)
    v = visible_tree(tree, sight, h)
    print(f"H_h: {fmt_set(v.histories)}")
    print(f"Z_h: {fmt_set(v.terminals)}")
    for x in sorted(v.histories, key=hkey):
        print(f"P_h({fmt(x)}) = {fmt_payoff(v.payoff[x])}")
    return OK


def cmd_check(args) -> int:
    tree, sight = _load(args)
    r = equivalence_verdict(tree, sight)
    print(f"BI: {fmt_set(r.bi)}")
    print(f"SCBI: {fmt_set(r.scbi)}")
    print(f"equal: {str(r.equal).lower()}")
    print(f"consistent: {_verdict(r.consistent)}")
    for z, c in r.per_bi_history.items():
        opt = "n/a" if c.locally_optimal is None else _verdict(c.locally_optimal)
        print(f"{fmt(z)}: sight-reachable={_verdict(c.sight_reachable)}; locally-optimal={opt}; "
              f"follows-local-maxima={_verdict(follows_local_maxima(tree, sight, z))}")
    print(f"conditions: {str(r.conditions_hold).lower()}")
    print(f"theorem: {'agrees' if r.theorem_agrees else 'disagrees'}")
    return OK if r.equal else REFUTED


def _tuple(w) -> str:
    return "(" + ", ".join("-" if x is None else fmt(x) for x in w) + ")"


def _verdict(c) -> str:
    return "true" if c else f"false {_tuple(c.witness)} {c.reason}".rstrip()


def _props(specs: Sequence[str], tree) -> dict:
    out = {}
    for spec in specs or ():
        name, sep, rest = spec.partition("=")
        if not sep or not name:
            raise UsageError(f"expected NAME=PATH,PATH,... in --prop {spec!r}")
        out[name] = frozenset(_path(p.strip(), tree) for p in rest.split(",") if p.strip())
    return out


def _strategies(specs: Sequence[str], tree) -> dict:
    out = {}
    for spec in specs or ():
        name, sep, rest = spec.partition("=")
        if not sep or not name:
            raise UsageError(f"expected NAME=PATH:ACTION,... in --strategy {spec!r}")
        sigma = {}
        for item in rest.split(","):
            if not item.strip():
                continue
            p, colon, a = item.strip().rpartition(":")
            h = _path(p, tree)
            if not colon or h + (a,) not in tree:
                raise UsageError(f"bad move {item!r} in strategy {name}")
            sigma[h] = a
        out[name] = sigma
    return out


def cmd_mc(args) -> int:
    tree, sight = _load(args)
    try:
        f = parse_formula(args.formula, tree)
    except ParseError as e:
        raise UsageError(f"formula:{e}") from None
    model = mk_model(tree, sight)
    checker = ModalChecker(_props(args.prop, tree), _strategies(args.strategy, tree))
    mask = checker.ext(model, f)
    if args.valid:
        bad = model.mask & ~mask
        if not bad:
            print("true")
            return OK
        first = model.frame.order[(bad & -bad).bit_length() - 1]
        print(f"false (fails at {fmt(first)})")
        return REFUTED
    h = _path(args.at, tree)
    ok = bool(mask >> model.frame.index[h] & 1)
    print("true" if ok else "false")
    return OK if ok else REFUTED


def cmd_axioms(args) -> int:
    tree, sight = _load(args)
    rep = axiom_suite(mk_model(tree, sight), SuiteConfig(max_instances=args.max_instances, seed=args.seed))
    for r in rep.results:
        line = f"{r.name:<20} {r.status:<9} expected={r.expected:<8} instances={r.instances}"
        if not r.verified:
            line += f"  at {fmt(r.state)}: {r.witness}"
        print(line)
    if args.report:
        _dump(args.report, [
            {"schema": r.name, "expected": r.expected, "status": r.status, "instances": r.instances,
             "witness": None if r.verified else str(r.witness), "state": None if r.verified else fmt(r.state)}
            for r in rep.results
        ])
    return OK if rep.ok else REFUTED


def cmd_frames(args) -> int:
    tree, sight = _load(args)
    rep = frame_suite(tree, sight, FrameConfig(random_valuations=args.valuations, seed=args.seed))
    for r in rep.results:
        line = f"{r.name:<36} {r.status:<9} expected={r.expected:<8} checks={r.checks}"
        if r.witness:
            w = r.witness
            line += f"  at {fmt(w.state)} with p = {fmt_set(w.valuation)}"
            if w.strategy is not None:
                line += " and s = {" + ", ".join(f"{fmt(h)}:{a}" for h, a in sorted(w.strategy.items(), key=lambda kv: hkey(kv[0]))) + "}"
        print(line)
    ok = rep.ok
    if args.uniqueness:
        u = bi_uniqueness(args.uniqueness)
        print(f"bi-unique (<= {args.uniqueness} nodes): {'verified' if u.ok else 'refuted'} over {u.trees} trees")
        ok = ok and u.ok
    return OK if ok else REFUTED


def cmd_gen(args) -> int:
    spec = GenSpec(
        depth=args.depth, branching=args.branch, high=Fraction(args.payoff_max),
        distinct=not args.ties, sight=args.sight, seed=args.seed,
    )
    tree, sight = random_instance(spec)
    text = serialize_pst(tree, sight)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_hunt(args) -> int:
    target = args.target
    try:
        if target.startswith("fact6-"):
            w = hunt_fact6(target[-1], args.trials, args.seed, shrink=not args.no_shrink)
            print(f"trial: {w.trial}")
            print(f"z1: {fmt(w.z1)} ({fmt_payoff(w.tree.payoff[w.z1])})  z2: {fmt(w.z2)} ({fmt_payoff(w.tree.payoff[w.z2])})")
            print("# tree with the narrower sight s1")
            sys.stdout.write(serialize_pst(w.tree, w.s1))
            print("# wider sight s2 (unlisted histories see their full subtree)")
            for line in serialize_pst(w.tree, w.s2).splitlines():
                if line.startswith("s "):
                    print(line)
            return OK
        if target.startswith("schema:"):
            c = hunt_schema(target[len("schema:"):], args.trials, args.seed)
            print(f"source: {c.source}")
            print(f"state: {fmt(c.state)}")
            print(f"instance: {c.instance}")
            sys.stdout.write(serialize_pst(c.tree, c.sight))
            return OK
    except NotFound as e:
        print(f"not found: {e}")
        return REFUTED
    except ValueError as e:
        raise UsageError(str(e)) from None
    raise UsageError(f"unknown target {target!r}; use fact6-a|fact6-b|fact6-c|schema:NAME ({', '.join(schema_names())})")


def _horizons(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise UsageError(f"expected K1..K2 for --horizons, got {text!r}") from None
    if a < 0 or b < a:
        raise UsageError("need 0 <= K1 <= K2")
    return list(range(a, b + 1))


def cmd_sweep(args) -> int:
    rows = sweep(_horizons(args.horizons), args.trials, args.seed, args.max_depth, args.max_branch)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return OK


def _dump(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pst", description="Preference-sight trees: solve, check and model-check.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def with_file(name, help_, fn):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file")
        sp.add_argument("--repair", action="store_true", help="close the declared sight instead of rejecting it")
        sp.set_defaults(fn=fn)
        return sp

    sp = with_file("validate", "parse and validate a .pst file", cmd_validate)
    sp.add_argument("--emit", action="store_true", help="print the canonical form")
    with_file("solve", "print the BI and SCBI sets", cmd_solve)
    sp = with_file("visible", "print the visible tree at a history", cmd_visible)
    sp.add_argument("--at", required=True, metavar="PATH")
    with_file("check", "equivalence report (exit 1 when BI != SCBI)", cmd_check)

    sp = with_file("mc", "model-check a formula", cmd_mc)
    sp.add_argument("--formula", required=True)
    where = sp.add_mutually_exclusive_group(required=True)
    where.add_argument("--at", metavar="PATH")
    where.add_argument("--valid", action="store_true")
    sp.add_argument("--prop", action="append", metavar="NAME=PATH,...", help="valuation of a proposition")
    sp.add_argument("--strategy", action="append", metavar="NAME=PATH:ACTION,...")

    sp = with_file("axioms", "run the valid-principles suite", cmd_axioms)
    sp.add_argument("--max-instances", type=int, default=SuiteConfig.max_instances)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report", metavar="JSON")

    sp = with_file("frames", "run the best-action frame suite", cmd_frames)
    sp.add_argument("--valuations", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--uniqueness", type=int, default=0, metavar="N", help="also check bi uniqueness on trees with <= N nodes")

    sp = sub.add_parser("gen", help="write a random .pst instance")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--branch", type=int, default=2)
    sp.add_argument("--payoff-max", type=int, default=10)
    sp.add_argument("--sight", default="random", help="full | horizon:K | random | random:SEED")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ties", action="store_true", help="allow equal payoffs")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("hunt", help="search for a witness or counterexample")
    sp.add_argument("--target", required=True, help="fact6-a | fact6-b | fact6-c | schema:NAME")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-shrink", action="store_true")
    sp.set_defaults(fn=cmd_hunt)

    sp = sub.add_parser("sweep", help="SCBI payoff against sight horizon (CSV)")
    sp.add_argument("--horizons", required=True, metavar="K1..K2")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-depth", type=int, default=4)
    sp.add_argument("--max-branch", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.fn(args)
    except UsageError as e:
        _err(f"pst: {e}")
        return USAGE
    except (PstError, ValueError) as e:
        _err(f"pst: {e}")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
