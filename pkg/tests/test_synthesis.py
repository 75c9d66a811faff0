import random
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import PROGRAMS, load
from setsynth import runtime as rt
from setsynth.checks import def1_case, lemma2_case, linear_case, theorem1_choice, theorem1_ground
from setsynth.lang import Choice, Failed, Lit, Var, parse_expr, parse_program, uniformize
from setsynth.progen import GenConfig, gen_arg, gen_program, gen_value
from setsynth.session import Session
from setsynth.synthesis import (ConvertOps, IChoice, ICall, IFail, IInt, IMatch, IVal, IVar, Level, Machine, Supply,
                                SynthesisError, emit_program, gen_convert, gen_nd_types, gen_nf, is_right_linear,
                                pluralize_expr, pluralize_function)
from setsynth.values import Con, from_list

GOLDEN = Path(__file__).parent / "golden"
seeds = st.integers(0, 2**32 - 1)


def sets(src_file, f, *args, mode="always"):
    s = Session(load(src_file), mode)
    return s.set_results(f, [s.parse(a) for a in args]).items


# ---------------------------------------------------------------- generated declarations


def test_nd_types_mirror_sources():
    p = parse_program("data Pair = P Int Int")
    decls = {d.source: d for d in gen_nd_types(p)}
    assert decls["List"].render() == "data ListP a = NilP | ConsP (ST a) (ST (ListP a))"
    assert decls["Bool"].render() == "data BoolP = FalseP | TrueP"
    assert decls["Pair"].render() == "data PairP = PP (ST Int) (ST Int)"


def test_nf_operation():
    nf = gen_nf(gen_nd_types(parse_program(""))[1])
    nil = rt.NdCon("[]")
    assert nf(nil) == rt.Val(nil)
    i = rt.ChoiceId("i", 0)
    t = rt.force_tree(nf(rt.NdCon(":", (rt.Choice(i, 1, rt.Val(0), rt.Val(1)), rt.Val(nil)))))
    assert isinstance(t, rt.Choice) and t.id == i and t.level == 1
    assert nf(rt.NdCon(":", (rt.Fail(1), rt.Val(nil)))) == rt.Fail(1)


def test_conversions_round_trip():
    conv = gen_convert(parse_program("").all_data[1])
    v = from_list([1, 2])
    t = conv.to_st(v)
    assert isinstance(t, rt.Uneval)
    assert ConvertOps.from_st(t) == [v]
    hnf = rt.whnf(rt.nf_st(rt.Val(conv.to_val_st(v)))).value
    assert conv.from_val_st(hnf) == v


def test_from_val_st_rejects_choices():
    i = rt.ChoiceId("i", 0)
    with pytest.raises(ValueError):
        ConvertOps.from_val_st(rt.NdCon(":", (rt.Choice(i, 1, rt.Val(0), rt.Val(1)), rt.Val(rt.NdCon("[]")))))


# ---------------------------------------------------------------- translation


def test_pluralize_choice_and_var():
    assert pluralize_expr(Choice(Lit(0), Lit(1))) == IChoice(Supply(""), Level(0), IInt(0), IInt(1))
    assert pluralize_expr(Var("x")) == IVar("x")
    assert pluralize_expr(Failed()) == IFail(Level(0))


def test_pluralize_nested_calls_get_disjoint_supplies():
    p = load("notf.mc")
    body = p.function("twiceNot").rules[0].body
    ir = pluralize_expr(body)
    assert ir == ICall("notP", Supply("L"), Level(0), (ICall("notP", Supply("R"), Level(0), (IVar("x"),)),))


def test_pluralize_not():
    d = pluralize_function(load("notf.mc").function("not"))
    assert d.body == IMatch(IVar("x1"), (("False", (), IVal("True")), ("True", (), IVal("False"))))


def test_pluralize_anyof():
    d = pluralize_function(uniformize(load("anyof.mc")).function("anyOf"))
    nil, cons = d.body.alts
    assert nil == ("[]", (), IFail(Level(0)))
    assert cons[2] == IChoice(Supply(""), Level(0), IVar("x"), ICall("anyOfP", Supply("R"), Level(0), (IVar("xs"),)))


def test_pluralize_ndconst():
    d = pluralize_function(load("ndconst.mc").function("ndconst"))
    assert d.params == ("x", "y")
    assert d.body == IChoice(Supply(""), Level(0), IVar("x"), IInt(1))


def test_non_uniform_function_rejected():
    with pytest.raises(SynthesisError):
        pluralize_function(parse_program("f [] = 0\nf x = 1").function("f"))


@pytest.mark.parametrize("name,targets", [("anyof", ["anyOf"]), ("notf", ["notf"]), ("double01", ["double01"])])
def test_golden_dumps(name, targets):
    b = emit_program(load(f"{name}.mc"), targets)
    assert b.dump() == (GOLDEN / f"{name}.ir").read_text()


def test_emit_program_contents():
    b = emit_program(load("anyof.mc"), ["anyOf"])
    assert set(b.plurals) == {"anyOfP"} and set(b.set_functions) == {"anyOfS"}
    assert emit_program(load("anyof.mc"), []).plurals == {}
    b = emit_program(load("notf.mc"), ["notf"])
    assert set(b.plurals) == {"notfP", "notP"}
    assert set(b.plural_sets) == {"notSP"} and set(b.set_functions) == {"notfS"}
    with pytest.raises(SynthesisError):
        emit_program(load("anyof.mc"), ["nope"])


# ---------------------------------------------------------------- set functions


def test_paper_set_functions():
    assert sets("ndconst.mc", "ndconst", "2", "failed") == [[2, 1]]
    assert sets("ndconst.mc", "ndconst", "2 ? 4", "3 ? 5") == [[2, 1], [4, 1]]
    assert sets("anyof.mc", "anyOf", "[0 ? 1, 2, 3]") == [[0, 2, 3], [1, 2, 3]]
    assert sets("anyof.mc", "anyOf", "[failed, 1]") == [[1]]
    assert sets("anyof.mc", "anyOf", "failed") == []
    assert sets("double01.mc", "double", "0 ? 1") == [[0], [2]]


def test_call_time_choice_needs_identifiers():
    assert sets("double01.mc", "double01") == [[0, 2]]
    assert sets("double01.mc", "double01", mode="never") == [[0, 1, 1, 2]]
    assert not is_right_linear(load("double01.mc"), ["double01"])


def test_nested_encapsulation_levels():
    assert sets("notf.mc", "notf") == [[]]
    assert sets("notf.mc", "nots", "failed") == []
    assert sets("notf.mc", "nots", "True ? False") == [[from_list([Con("False")])], [from_list([Con("True")])]]


def test_pair_values_match_oracle():
    out = def1_case(load("lists.mc"), "pairs", ["[1, 2 ? 3]"])
    assert out.ok, out.detail


def test_never_mode_rejects_nested_set_functions():
    with pytest.raises(SynthesisError):
        Machine(emit_program(load("notf.mc"), ["notf"]), "never")


@given(seeds)
def test_def1_equivalence(seed):
    rng = random.Random(seed)
    gp = gen_program(rng)
    f = gp.target
    out = def1_case(gp.program, f.name, [gen_arg(rng, t) for t in f.params])
    assert out.status != "violation", (gp.source, out.detail)


@given(seeds)
def test_theorem1_ground(seed):
    rng = random.Random(seed)
    gp = gen_program(rng)
    f = gp.target
    out = theorem1_ground(gp.program, f.name, [gen_value(rng, t) for t in f.params])
    assert out.status != "violation", (gp.source, out.detail)


@given(seeds)
def test_theorem1_choice_argument(seed):
    rng = random.Random(seed)
    gp = gen_program(rng)
    f = gp.target
    alts = [gen_value(rng, f.params[0]) for _ in range(rng.randint(2, 3))]
    out = theorem1_choice(gp.program, f.name, alts, [gen_value(rng, t) for t in f.params[1:]])
    assert out.status != "violation", (gp.source, out.detail)


@given(seeds)
def test_lemma2_composition(seed):
    rng = random.Random(seed)
    gp = gen_program(rng)
    unary = [s for s in gp.sigs if len(s.params) == 1]
    pairs = [(f, g) for f in unary for g in unary if g.result == f.params[0]]
    if not pairs:
        return
    f, g = rng.choice(pairs)
    out = lemma2_case(gp.source, f.name, g.name, gen_value(rng, g.params[0]))
    assert out.ok, (gp.source, out.detail)


@given(seeds)
def test_linear_rhs_needs_no_supply(seed):
    rng = random.Random(seed)
    gp = gen_program(rng, GenConfig(right_linear=True, allow_set_calls=False))
    f = gp.target
    assert is_right_linear(gp.program, [s.name for s in gp.sigs])
    out = linear_case(gp.program, f.name, [gen_arg(rng, t) for t in f.params])
    assert out.ok, (gp.source, out.detail)
