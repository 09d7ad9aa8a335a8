"""Run every verification sweep at its default size and print a table.

Usage: python scripts/run_sweeps.py [--seeds N] [--trace-out FILE]
"""

import argparse
import sys

from multibudget.cli import main


def run() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int)
    p.add_argument("--trace-out")
    args = p.parse_args()
    argv = ["verify", "--suite", "all", "--pretty", "--timing"]
    if args.seeds is not None:
        argv += ["--seeds", str(args.seeds)]
    if args.trace_out:
        argv += ["--trace-out", args.trace_out]
    return main(argv)


if __name__ == "__main__":
    sys.exit(run())
