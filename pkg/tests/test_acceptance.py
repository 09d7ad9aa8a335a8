"""Acceptance criteria at their stated sizes and time limits.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected and repeated in the pytest terminal summary. Run this file directly
(``python tests/test_acceptance.py``) to get just the eight lines.
"""

import os
import subprocess
import sys
import time

import pytest

from multibudget.sweeps import run_suite

RESULTS = {}

# (criterion, suite, cases, seconds allowed, description)
SWEEPS = [
    (1, "theorem4", 200, 120, "matroid LP vertices have few fractional entries"),
    (2, "corollary5", 30, 300, "k-budget matroid scheme reaches (1-eps) OPT"),
    (3, "lemma7", 500, 60, "some curve rotation hits every target point"),
    (4, "lemma11", 100, 300, "matching patches keep lengths and lose at most 2 w_max + Gamma"),
    (5, "theorem6", 50, 600, "2-budget matching scheme reaches (1-eps) OPT"),
    (6, "theorem2", 40, 300, "feasibilization wrapper and greedy discard"),
    (7, "gadgets", 50, 120, "gadget feasibility matches PARTITION"),
]


def _report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


@pytest.mark.parametrize("n,suite,cases,limit,what", SWEEPS, ids=[s[1] for s in SWEEPS])
def test_sweep(n, suite, cases, limit, what):
    start = time.perf_counter()
    (res,) = run_suite(suite, cases)
    elapsed = time.perf_counter() - start
    ok = res.ok and res.cases >= cases and elapsed <= limit
    detail = f"{what}: {res.passed}/{res.cases} in {elapsed:.1f}s (limit {limit}s)"
    if res.failures:
        detail += f"; first failure seed {res.failures[0]['seed']}: {res.failures[0]['reason']}"
    assert _report(n, ok, detail), detail


def _cli(*args):
    env = dict(os.environ)
    env.pop("MB_BRUTE_BOUND", None)
    return subprocess.run([sys.executable, "-m", "multibudget", *args], capture_output=True, env=env)


def test_determinism(tmp_path):
    files = {}
    commands = []
    for kind, extra in [("uniform", ()), ("partition", ()), ("graphic", ()), ("linear", ()),
                        ("forest", ()), ("matching", ("--n", "6"))]:
        path = tmp_path / f"{kind}.json"
        files[kind] = path
        commands.append(("gen", "--kind", kind, "--m", "8", "--k", "2", "--seed", "4", *extra))
        _cli("gen", "--kind", kind, "--m", "8", "--k", "2", "--seed", "4", *extra, "--out", str(path))
    commands.append(("gen", "--kind", "partition-gadget", "--partition-alphas", "1,2,3", "--target", "3",
                     "--gadget-kind", "perfect_matching"))
    for kind in ("uniform", "graphic", "linear"):
        commands.append(("solve", str(files[kind]), "--alg", "matroid-ptas", "--eps", "1/2", "--oracle"))
        commands.append(("solve", str(files[kind]), "--alg", "feasibilize", "--eps", "1/2", "--oracle"))
    commands.append(("solve", str(files["forest"]), "--alg", "feasibilize", "--eps", "1/3", "--pretty"))
    commands.append(("solve", str(files["matching"]), "--alg", "matching-ptas", "--eps", "1/2", "--oracle", "--jobs", "2"))
    commands.append(("solve", str(files["partition"]), "--alg", "brute"))
    commands.append(("verify", "--suite", "all"))
    commands.append(("verify", "--suite", "gadgets", "--seeds", "10", "--pretty"))

    mismatched = []
    for cmd in commands:
        a, b = _cli(*cmd), _cli(*cmd)
        if a.returncode != b.returncode or a.stdout != b.stdout or not a.stdout:
            mismatched.append(" ".join(cmd[:2]))
    # trace files are outputs too
    traces = []
    for run in range(2):
        out = tmp_path / f"trace{run}.jsonl"
        _cli("solve", str(files["matching"]), "--alg", "matching-ptas", "--eps", "1", "--trace-out", str(out))
        traces.append(out.read_bytes())
    if traces[0] != traces[1] or not traces[0]:
        mismatched.append("trace")
    detail = f"{len(commands) + 1} commands run twice, {len(mismatched)} differ"
    if mismatched:
        detail += ": " + ", ".join(mismatched)
    assert _report(8, not mismatched, detail), detail


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
