"""Search for nested sights whose outcomes compare as better, worse and equal; save each witness."""

import argparse
from pathlib import Path

from pstree.core import fmt
from pstree.lab import hunt_fact6
from pstree.textio import serialize_pst


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="artifacts/nested")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for case in "abc":
        w = hunt_fact6(case, args.trials, args.seed)
        for tag, s in (("narrow", w.s1), ("wide", w.s2)):
            (out / f"{case}-{tag}.pst").write_text(serialize_pst(w.tree, s))
        print(f"case {case}: trial {w.trial}, outcomes {fmt(w.z1)} ({w.tree.payoff[w.z1]}) "
              f"and {fmt(w.z2)} ({w.tree.payoff[w.z2]}), {len(w.tree)} histories")


if __name__ == "__main__":
    main()
