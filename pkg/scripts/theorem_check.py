"""Count instances where equal BI/SCBI outcomes and the two per-history conditions disagree.

Also counts disagreements for the step-wise condition (every move along the
BI history starts some best visible leaf), which matches equality exactly.
"""

import argparse
from collections import Counter

from pstree.equivalence import equivalence_verdict, follows_local_maxima
from pstree.lab import instances
from pstree.textio import serialize_pst


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-depth", type=int, default=4)
    ap.add_argument("--max-branch", type=int, default=3)
    ap.add_argument("--ties", action="store_true", help="allow equal payoffs")
    ap.add_argument("--show", type=int, default=1, help="print this many disagreeing instances")
    args = ap.parse_args()

    tally = Counter()
    shown = 0
    for spec, t, s in instances(args.trials, args.seed, args.max_depth, args.max_branch, distinct=not args.ties):
        r = equivalence_verdict(t, s)
        stepwise = all(follows_local_maxima(t, s, z) for z in r.bi)
        tally["stepwise-disagrees"] += stepwise != r.equal
        if r.theorem_agrees:
            continue
        tally["equal, conditions fail" if r.equal else "conditions hold, outcomes differ"] += 1
        if shown < args.show:
            shown += 1
            print(f"# seed {spec.seed}: equal={r.equal}")
            print(serialize_pst(t, s))
    print(f"{args.trials} instances")
    for k in ("equal, conditions fail", "conditions hold, outcomes differ", "stepwise-disagrees"):
        print(f"  {k}: {tally[k]}")


if __name__ == "__main__":
    main()
