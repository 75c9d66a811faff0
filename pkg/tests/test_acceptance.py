"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import random
import time

import pytest

from conftest import load
from setsynth import runtime as rt
from setsynth.checks import def1_case, linear_case, theorem1_choice, theorem1_ground
from setsynth.progen import GenConfig, gen_arg, gen_program, gen_value
from setsynth.session import RunOptions, Session
from setsynth.treegen import gen_tree
from setsynth.values import from_list

GOLDEN_BUDGET_S = 1.0
EQUIV_CASES = 200
EQUIV_BUDGET_S = 60.0
DEPTH_BOUND = 8
THEOREM_CASES = 100
LAZY_BUDGET_S = 1.0
TREE_CASES = 1000
TREE_DEPTH = 6
LINEAR_CASES = 50


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, text: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")
    return emit


def _sets(src, entry):
    s = Session(load(src))
    return s.eval_synth(s.parse(entry)).items


def test_criterion_1_golden_examples(report):
    i = rt.ChoiceId("i", 0)
    cases = [
        ("ndconstS 2 failed", lambda: _sets("ndconst.mc", "ndconstS 2 failed"), [[2, 1]]),
        ("ndconstS (2?4) (3?5)", lambda: _sets("ndconst.mc", "ndconstS (2?4) (3?5)"), [[2, 1], [4, 1]]),
        ("anyOfS [0?1,2,3]", lambda: _sets("anyof.mc", "anyOfS [0?1,2,3]"), [[0, 2, 3], [1, 2, 3]]),
        ("double01S", lambda: _sets("double01.mc", "double01S"), [[0, 2]]),
        ("anyOfS [failed,1]", lambda: _sets("anyof.mc", "anyOfS [failed,1]"), [[1]]),
        # the failure of notS failed is encapsulated by notfS: one result set, and it is empty
        ("notfS", lambda: _sets("notf.mc", "notfS"), [[]]),
        ("notsS failed", lambda: _sets("notf.mc", "notsS failed"), []),
        ("stValuesP 1 (Choice 1 (Fail 0) (Fail 1))",
         lambda: rt.st_values_p(1, rt.Choice(i, 1, rt.Fail(0), rt.Fail(1))), rt.Val(rt.NdCon("[]"))),
    ]
    failures = []
    for name, thunk, expected in cases:
        t0 = time.perf_counter()
        got = thunk()
        dt = time.perf_counter() - t0
        if got != expected or dt >= GOLDEN_BUDGET_S:
            failures.append(f"{name}: got {got!r} in {dt:.3f}s")
    ok = not failures
    report(1, ok, f"{len(cases) - len(failures)}/{len(cases)} golden examples exact, each < {GOLDEN_BUDGET_S}s"
           + ("" if ok else f" ({'; '.join(failures)})"))
    assert ok


def test_criterion_2_oracle_equivalence(report):
    rng = random.Random(20240601)
    cfg = GenConfig(max_choices=3, max_depth=3)
    checked = violations = skipped = several_worlds = multi_valued = 0
    t0 = time.perf_counter()
    while checked < EQUIV_CASES and checked + skipped < 4 * EQUIV_CASES:
        gp = gen_program(rng, cfg)
        f = gp.target
        # argument values at most 3 constructors deep; at most 3 choices overall
        args = [gen_arg(rng, t, depth=2) for t in f.params]
        if gp.source.count("?") + sum(a.count("?") for a in args) > 3:
            continue
        out = def1_case(gp.program, f.name, args, DEPTH_BOUND)
        if out.status == "skipped":
            skipped += 1
            continue
        checked += 1
        violations += out.status == "violation"
        several_worlds += len(out.detail["oracle"]) > 1
        multi_valued += any(len(set(s)) > 1 for s in out.detail["oracle"])
    dt = time.perf_counter() - t0
    ok = checked >= EQUIV_CASES and violations == 0 and dt < EQUIV_BUDGET_S
    report(2, ok, f"{checked} programs/argument tuples, {violations} mismatches, {skipped} truncated skipped, "
                  f"{dt:.1f}s (< {EQUIV_BUDGET_S}s); {several_worlds} with several outer alternatives, "
                  f"{multi_valued} with a result set of 2+ values")
    assert ok


def test_criterion_3_theorem1(report):
    rng = random.Random(7)
    n1 = n2 = bad = 0
    while (n1 < THEOREM_CASES or n2 < THEOREM_CASES) and n1 + n2 < 8 * THEOREM_CASES:
        gp = gen_program(rng)
        f = gp.target
        a = theorem1_ground(gp.program, f.name, [gen_value(rng, t) for t in f.params], DEPTH_BOUND)
        if a.status != "skipped":
            n1 += 1
            bad += a.status == "violation"
        alts = [gen_value(rng, f.params[0]) for _ in range(rng.randint(2, 3))]
        b = theorem1_choice(gp.program, f.name, alts, [gen_value(rng, t) for t in f.params[1:]], DEPTH_BOUND)
        if b.status != "skipped":
            n2 += 1
            bad += b.status == "violation"
    ok = n1 >= THEOREM_CASES and n2 >= THEOREM_CASES and bad == 0
    report(3, ok, f"property (1) on {n1} instances, property (2) on {n2} instances, {bad} violations")
    assert ok


def test_criterion_4_laziness(report):
    s = Session(load("nats.mc"))
    t0 = time.perf_counter()
    r = s.eval_synth(s.parse("natsS"), RunOptions(max_values=5))
    dt = time.perf_counter() - t0
    nd = Session(load("ndconst.mc"))
    t1 = time.perf_counter()
    r2 = nd.eval_synth(nd.parse("ndconstS 2 failed"))
    dt2 = time.perf_counter() - t1
    ok = r.items == [[0, 1, 2, 3, 4]] and dt < LAZY_BUDGET_S and r2.items == [[2, 1]] and dt2 < LAZY_BUDGET_S
    report(4, ok, f"natsS with max-values 5 gave {r.items} in {dt:.3f}s; ndconstS 2 failed gave {r2.items}")
    assert ok


def _bind_fn(x):
    return rt.Choice(rt.ChoiceId("g", x), 1, rt.Val(x), rt.Choice(rt.ChoiceId("h", x), 1, rt.Fail(1), rt.Val(-x)))


def test_criterion_5_pull_tab_and_nf(report):
    rng = random.Random(11)
    law = idem = 0
    for _ in range(TREE_CASES):
        t = gen_tree(rng, depth=TREE_DEPTH)
        lhs = rt.search_dfs([], rt.apply_st(_bind_fn, t))
        rhs = [y for x in rt.search_dfs([], t) for y in rt.search_dfs([], _bind_fn(x))]
        law += lhs != rhs
        d = gen_tree(rng, depth=TREE_DEPTH, data=True)
        once = rt.force_tree(rt.nf_st(d))
        idem += rt.force_tree(rt.nf_st(once)) != once
    ok = law == 0 and idem == 0
    report(5, ok, f"{TREE_CASES} trees (depth <= {TREE_DEPTH}): {law} pull-tab law violations; "
                  f"{TREE_CASES} data trees: {idem} nf_st idempotence violations")
    assert ok


def test_criterion_6_linear_rhs(report):
    rng = random.Random(3)
    cfg = GenConfig(right_linear=True, allow_set_calls=False)
    n = bad = 0
    while n < LINEAR_CASES:
        gp = gen_program(rng, cfg)
        f = gp.target
        out = linear_case(gp.program, f.name, [gen_arg(rng, t) for t in f.params])
        n += 1
        bad += not out.ok
    ok = bad == 0
    report(6, ok, f"{n} right-linear programs, {bad} differences with vs. without supply threading")
    assert ok
