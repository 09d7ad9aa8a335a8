"""Build the three PARTITION gadgets for one input and print their Pareto fronts.

Usage: python scripts/gadget_frontier.py 1,2,3 3
"""

import argparse
import sys

from multibudget.instance import gen_partition_gadget
from multibudget.numeric import format_rat, parse_rat
from multibudget.oracle import feasible, pareto_enumerate, partition_bruteforce


def run() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("alphas", help="comma-separated rationals")
    p.add_argument("target")
    args = p.parse_args()
    alphas = [parse_rat(a) for a in args.alphas.split(",") if a]
    target = parse_rat(args.target)
    print(f"partition: {partition_bruteforce(alphas, target)}")
    for kind in ("spanning_tree", "perfect_matching", "path"):
        inst = gen_partition_gadget(kind, alphas, target)
        print(f"\n{kind}: feasible={feasible(inst)} budgets={[format_rat(b) for b in inst.budgets]}")
        for pt in pareto_enumerate(inst):
            lengths = ", ".join(format_rat(v) for v in pt.lengths)
            print(f"  weight {format_rat(pt.weight):>6}  lengths ({lengths})  edges {sorted(pt.witness)}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
