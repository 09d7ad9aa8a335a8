"""Command-line front end: ``gen``, ``solve`` and ``verify``.

Reports are JSON lines on stdout (``--pretty`` for a table). Exit codes:
0 success, 1 validation, 2 invariant violation, 3 resource bound.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from multibudget import instance as ins
from multibudget.errors import MultiBudgetError, ValidationError
from multibudget.numeric import format_rat, parse_rat

ALGORITHMS = ("matroid-ptas", "matching-ptas", "feasibilize", "brute")
GEN_KINDS = ins.RANDOM_KINDS + ("partition-gadget",)


class _Trace:
    """Collects trace records and writes them as sorted-key JSON lines."""

    def __init__(self, path: Optional[str]):
        self.path = path
        self.records = []

    def __call__(self, rec) -> None:
        self.records.append(rec)

    def flush(self) -> None:
        if self.path:
            Path(self.path).write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records))


@dataclass
class RunReport:
    digest: str
    algorithm: str
    eps: Optional[str]
    output: Optional[list]
    weight: Optional[str]
    lengths: Optional[list]
    budgets: list
    feasible: bool
    oracle: Optional[str] = None
    ratio: Optional[str] = None
    wall_time: Optional[float] = None

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None or k in ("output", "weight")}


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _table(rows: list, columns: list) -> str:
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()
    return "\n".join([line(columns), line(["-" * w for w in widths])] + [line(r) for r in cells]) + "\n"


# -- gen ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.kind == "partition-gadget":
        if not args.partition_alphas or args.target is None:
            raise ValidationError("partition-gadget needs --partition-alphas and --target")
        alphas = [parse_rat(a.strip()) for a in args.partition_alphas.split(",") if a.strip()]
        inst = ins.gen_partition_gadget(args.gadget_kind, alphas, parse_rat(args.target))
    else:
        if args.m is None:
            raise ValidationError(f"--m is required for kind {args.kind!r}")
        inst = ins.gen_random(args.kind, args.m, args.k, args.seed, n=args.n)
    text = ins.save(inst)
    if args.out:
        Path(args.out).write_text(text)
        _emit({"digest": inst.digest(), "out": args.out})
    else:
        sys.stdout.write(text)
    return 0


# -- solve -------------------------------------------------------------------


def _root_lp_dump(inst, alg) -> str:
    if alg == "matroid-ptas":
        from multibudget.matroid_ptas import solve_matroid_lp

        return solve_matroid_lp(inst).lp.dump()
    if alg == "matching-ptas":
        from multibudget.matching import matching_lp_vertex

        return matching_lp_vertex(inst)[0].lp.dump()
    raise ValidationError(f"--lp-dump is only available for the LP-based algorithms, not {alg!r}")


def _run_alg(inst, alg, eps, trace, jobs):
    if alg == "brute":
        from multibudget.oracle import brute_opt

        _, S = brute_opt(inst)
        return S
    if eps is None:
        raise ValidationError(f"{alg} needs --eps")
    if alg == "matroid-ptas":
        from multibudget.matroid_ptas import solve_kbudget_matroid

        return solve_kbudget_matroid(inst, eps, trace=trace, jobs=jobs)
    if alg == "matching-ptas":
        from multibudget.matching import solve_2budget_matching

        return solve_2budget_matching(inst, eps, trace=trace, jobs=jobs)
    from multibudget.feasibilize import feasibilize

    return feasibilize(inst, eps, trace=trace, jobs=jobs)


def cmd_solve(args) -> int:
    inst = ins.load(Path(args.instance).read_text())
    eps = parse_rat(args.eps) if args.eps is not None else None
    trace = _Trace(args.trace_out)
    if args.lp_dump:
        Path(args.lp_dump).write_text(_root_lp_dump(inst, args.alg))
    start = time.perf_counter()
    S = _run_alg(inst, args.alg, eps, trace, args.jobs)
    elapsed = time.perf_counter() - start
    feasible = S is not None and inst.within(S)
    report = RunReport(
        digest=inst.digest(),
        algorithm=args.alg,
        eps=None if eps is None else format_rat(eps),
        output=None if S is None else sorted(S),
        weight=None if S is None else format_rat(inst.weight(S)),
        lengths=None if S is None else [format_rat(u) for u in inst.usage(S)],
        budgets=[format_rat(b) for b in inst.budgets],
        feasible=feasible,
        wall_time=round(elapsed, 6) if args.timing else None,
    )
    if args.oracle:
        from multibudget.oracle import brute_opt

        opt, _ = brute_opt(inst)
        if opt is not None:
            report.oracle = format_rat(opt)
            if S is not None:
                report.ratio = format_rat(inst.weight(S) / opt) if opt else "1"
    trace.flush()
    doc = report.to_json()
    if args.pretty:
        cols = ["algorithm", "eps", "weight", "oracle", "ratio", "feasible", "output"]
        sys.stdout.write(_table([doc], [c for c in cols if c in doc]))
    else:
        _emit(doc)
    return 0 if feasible else 1


# -- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    from multibudget.sweeps import run_suite

    trace = _Trace(args.trace_out)
    results = run_suite(args.suite, args.seeds, trace if args.trace_out else None)
    trace.flush()
    docs = [r.summary(timing=args.timing) for r in results]
    if args.pretty:
        sys.stdout.write(_table(docs, ["suite", "cases", "passed", "failed"] + (["seconds"] if args.timing else [])))
        for d in docs:
            for f in d["failures"]:
                sys.stdout.write(f"  {d['suite']} seed {f['seed']}: {f['reason']}\n")
    else:
        for d in docs:
            _emit(d)
    return 0 if all(r.ok for r in results) else 2


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multibudget", description="Budgeted matroid and matching approximation schemes.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random or gadget instance")
    g.add_argument("--kind", required=True, choices=GEN_KINDS)
    g.add_argument("--m", type=int, help="number of elements")
    g.add_argument("--k", type=int, default=2, help="number of budgets")
    g.add_argument("--n", type=int, help="number of nodes for graph kinds")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--partition-alphas", help="comma-separated rationals, e.g. 1,2,3/2")
    g.add_argument("--target", help="PARTITION target")
    g.add_argument("--gadget-kind", default="spanning_tree", choices=("spanning_tree", "perfect_matching", "path"))
    g.add_argument("--out", help="output file (default: stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run an algorithm on an instance file")
    s.add_argument("instance")
    s.add_argument("--alg", required=True, choices=ALGORITHMS)
    s.add_argument("--eps", help="accuracy as p/q")
    s.add_argument("--oracle", action="store_true", help="compare with the brute-force optimum")
    s.add_argument("--pretty", action="store_true")
    s.add_argument("--trace-out", help="write JSON-lines trace records here")
    s.add_argument("--lp-dump", help="write the root LP in text form here")
    s.add_argument("--jobs", type=int, default=1, help="parallel guess workers")
    s.add_argument("--timing", action="store_true", help="include wall time (output no longer reproducible)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run a seeded verification sweep")
    v.add_argument("--suite", required=True, help="theorem4, corollary5, lemma7, lemma11, theorem6, theorem2, gadgets or all")
    v.add_argument("--seeds", type=int, help="number of cases (default: the suite's own)")
    v.add_argument("--pretty", action="store_true")
    v.add_argument("--trace-out", help="write per-case JSON lines here")
    v.add_argument("--timing", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags; here that is a validation error
        return 1 if exc.code == 2 else (exc.code or 0)
    try:
        return args.func(args)
    except MultiBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
