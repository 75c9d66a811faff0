import random

import pytest
from hypothesis import given, strategies as st

from conftest import load
from setsynth.lang import parse_expr, parse_program, uniformize
from setsynth.oracle import (Failure, Heap, Split, Value, enumerate_values, force_hnf, set_function_oracle)
from setsynth.progen import gen_arg, gen_program
from setsynth.values import BOTTOM, Con, from_list

DOUBLE = "double x = x + x\ncoin = 0 ? 1\nhead (x:xs) = x\n"


def values(src, entry, **kw):
    p = parse_program(src)
    return enumerate_values(p, parse_expr(entry, p), **kw).values


def test_double_coin_shares_the_choice():
    assert values(DOUBLE, "double coin") == [0, 2]


def test_coin():
    assert values(DOUBLE, "coin") == [0, 1]


def test_literal():
    assert values("", "3") == [3]


def test_non_strict_argument():
    assert values("ndconst x y = x ? 1", "ndconst 2 failed") == [2, 1]


def test_failure_inside_an_unused_list_element():
    assert values("head (x:xs) = x", "head [1, failed]") == [1]


def test_run_time_choice_not_used_for_shared_arguments():
    # never an odd sum from 0 + 1
    assert all(v % 2 == 0 for v in values(DOUBLE, "double (0 ? 1) + double (2 ? 3)"))


def test_depth_bound_truncates_and_is_monotone():
    src = "nats = natsFrom 0\nnatsFrom n = n ? natsFrom (n + 1)"
    p = parse_program(src)
    e = parse_expr("nats", p)
    prev = []
    for k in range(1, 7):
        r = enumerate_values(p, e, depth_bound=k)
        assert r.truncated
        assert r.values[:len(prev)] == prev
        prev = r.values
    assert prev == [0, 1, 2, 3, 4, 5]


def test_step_budget_marks_loops_as_truncated():
    r = enumerate_values(parse_program("loop x = loop x"), parse_expr("loop 1 ? 2", parse_program("loop x = loop x")),
                         step_budget=2_000)
    assert r.truncated and r.values == [2]


def test_deterministic():
    p = load("lists.mc")
    e = parse_expr("perm [1,2,3]", p)
    assert enumerate_values(p, e).values == enumerate_values(p, e).values


def test_set_function_oracle_ndconst():
    p = parse_program("ndconst x y = x ? 1")
    res, trunc = set_function_oracle(p, "ndconst", [parse_expr("2 ? 4", p), parse_expr("failed", p)])
    assert not trunc
    assert [r.values for r in res] == [[2, 1], [4, 1]]
    assert [r.args for r in res] == [(2, BOTTOM), (4, BOTTOM)]


def test_set_function_oracle_anyof_partial_list():
    p = load("anyof.mc")
    res, _ = set_function_oracle(p, "anyOf", [parse_expr("[failed, 1]", p)])
    assert [r.values for r in res] == [[1]]


def test_set_function_oracle_double():
    p = parse_program(DOUBLE)
    res, _ = set_function_oracle(p, "double", [parse_expr("0 ? 1", p)])
    assert [r.values for r in res] == [[0], [2]]


def test_nested_set_functions():
    p = load("notf.mc")
    assert enumerate_values(p, parse_expr("notfS", p)).values == [from_list([])]
    assert enumerate_values(p, parse_expr("notsS failed", p)).values == []
    assert enumerate_values(p, parse_expr("notS (True ? False)", p)).values == [
        from_list([Con("False")]), from_list([Con("True")])]


def _pulltab(src, entry):
    p = uniformize(parse_program(src))
    h = Heap(p, "pulltab")
    return h, h.build(parse_expr(entry, p), {}, 0)


def test_force_failed():
    h, c = _pulltab("", "failed")
    assert force_hnf(h, c) == Failure(0)


def test_force_choice_splits():
    h, c = _pulltab("", "0 ? 1")
    out = force_hnf(h, c)
    assert isinstance(out, Split)
    assert force_hnf(h, out.left).hnf.value == 0
    assert force_hnf(h, out.right).hnf.value == 1


def test_force_head_of_shared_coin():
    h, c = _pulltab(DOUBLE, "head [coin, coin]")
    out = force_hnf(h, c)
    assert isinstance(out, Split)
    assert [force_hnf(h, x).hnf.value for x in (out.left, out.right)] == [0, 1]
    assert list(h.values(c)) == [0, 1]


def test_pulltab_values_keep_sharing():
    h, c = _pulltab(DOUBLE, "double coin")
    assert list(h.values(c)) == [0, 2]


def test_pulltab_split_ids_are_stable():
    h, c = _pulltab(DOUBLE, "coin")
    a = force_hnf(h, c)
    b = force_hnf(h, c)
    assert isinstance(a, Split) and a == b


def test_force_value():
    h, c = _pulltab("", "[1, 2]")
    out = force_hnf(h, c)
    assert isinstance(out, Value) and out.hnf.name == ":" and len(out.hnf.args) == 2


@given(st.integers(0, 10_000))
def test_pulltab_and_replay_agree_on_value_sets(seed):
    rng = random.Random(seed)
    gp = gen_program(rng)
    f = gp.target
    entry = " ".join([f.name] + [f"({gen_arg(rng, t)})" for t in f.params])
    if "S " in entry or any("S" in line.split("=", 1)[1] for line in gp.source.splitlines()):
        return
    p = uniformize(gp.program)
    r = enumerate_values(p, parse_expr(entry, p))
    h = Heap(p, "pulltab")
    if not r.truncated:
        assert set(h.values(h.build(parse_expr(entry, p), {}, 0))) == set(r.values)
