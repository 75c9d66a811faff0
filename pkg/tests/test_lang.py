import random

import pytest
from hypothesis import given, strategies as st

from conftest import load
from setsynth.lang import (Choice, ConApp, DuplicateDefinition, Failed, FrontendError, FunApp, Lit, NameResolutionError, ParseError,
                           PCon, PVar, SetApp, UniformityError, Var, parse_expr, parse_program, pretty_expr,
                           pretty_program, uniformize, validate_uniform)
from setsynth.oracle import enumerate_values
from setsynth.progen import GenConfig, gen_program, gen_value


def test_coin_is_a_choice():
    p = parse_program("coin = 0 ? 1")
    f = p.function("coin")
    assert f.arity == 0
    assert f.rules[0].body == Choice(Lit(0), Lit(1))


def test_empty_source():
    p = parse_program("")
    assert p.func_defs == () or list(p.func_defs) == []
    assert p.data_decls == () or list(p.data_decls) == []


def test_not_has_two_rules():
    p = parse_program("not False = True\nnot True = False")
    f = p.function("not")
    assert f.arity == 1 and len(f.rules) == 2
    assert f.rules[0].patterns == (PCon("False", ()),)


def test_choice_is_right_associative_and_loosest():
    p = parse_program("f x = x + 1 ? x : [] ? failed")
    body = p.function("f").rules[0].body
    assert isinstance(body, Choice)
    assert body.left == FunApp("+", (Var("x"), Lit(1)))
    assert isinstance(body.right, Choice) and body.right.right == Failed()


def test_set_function_names_resolve():
    p = parse_program("not False = True\nnot True = False\nnotf = notS failed")
    assert p.function("notf").rules[0].body == SetApp("not", (Failed(),))


def test_data_declaration_and_constructors():
    p = parse_program("data Pair = P Int Int\nswap (P x y) = P y x")
    assert p.function("swap").rules[0].body == ConApp("P", (Var("y"), Var("x")))


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_program("f x = (x +")
    assert exc.value.line == 1 and exc.value.col is not None


def test_unknown_identifier():
    with pytest.raises(NameResolutionError):
        parse_program("f x = g x")


def test_duplicate_definition():
    with pytest.raises(DuplicateDefinition):
        parse_program("f = 1\ng = 2\nf = 3")


def test_choice_operator_cannot_be_redefined():
    with pytest.raises(ParseError):
        parse_program("x ? y = x")


def test_partial_application_rejected():
    with pytest.raises(FrontendError):
        parse_program("f x y = x\ng = f 1")


def test_uniformize_adds_missing_constructor():
    u = uniformize(load("anyof.mc"))
    rules = u.function("anyOf").rules
    assert len(rules) == 2
    nil = [r for r in rules if r.patterns[0] == PCon("[]", ())]
    assert nil and nil[0].body == Failed()
    assert validate_uniform(u) == []


def test_uniformize_keeps_uniform_functions():
    p = parse_program("not False = True\nnot True = False")
    assert uniformize(p) == p


def test_uniformize_merges_overlapping_rules_in_textual_order():
    u = uniformize(parse_program("f [] = 0\nf x = 1\ng x = 2\ng y = 3"))
    f = u.function("f")
    assert f.rules[0].body == Choice(Lit(0), Lit(1))
    assert f.rules[1].body == Lit(1)
    g = u.function("g")
    assert len(g.rules) == 1 and g.rules[0].body == Choice(Lit(2), Lit(3))


def test_uniformize_rejects_nested_patterns():
    with pytest.raises(UniformityError):
        uniformize(parse_program("f (x : (y : ys)) = x"))


def test_uniformize_rejects_two_positions():
    with pytest.raises(UniformityError):
        uniformize(parse_program("f [] [] = 0\nf (x:xs) (y:ys) = 1"))


def test_uniformize_rejects_non_linear_rules():
    with pytest.raises(UniformityError):
        uniformize(parse_program("f x x = x"))


def test_validate_reports_duplicate_constructor_rule():
    diags = validate_uniform(parse_program("f [] = 0\nf [] = 1\nf (x:xs) = 2"))
    assert len(diags) == 1 and diags[0].function == "f"


def test_validate_reports_repeated_variable():
    diags = validate_uniform(parse_program("f x x = x"))
    assert len(diags) == 1 and diags[0].function == "f"


def test_pretty_parse_round_trip_on_samples(programs_dir):
    for path in sorted(programs_dir.glob("*.mc")):
        p = parse_program(path.read_text())
        assert parse_program(pretty_program(p)) == p
        u = uniformize(p)
        assert parse_program(pretty_program(u)) == u


@given(st.integers(0, 10_000))
def test_generated_programs_round_trip_and_uniformize_idempotent(seed):
    gp = gen_program(random.Random(seed))
    p = gp.program
    assert parse_program(pretty_program(p)) == p
    u = uniformize(p)
    assert uniformize(u) == u
    assert validate_uniform(u) == []


def test_pretty_expr_parenthesizes():
    p = parse_program("f x = x")
    e = parse_expr("f (1 ? 2) + 3 * (4 - 5)", p)
    assert parse_expr(pretty_expr(e), p) == e


def _with_overlapping_rule(gp, rng):
    """Add a catch-all rule after some function's rules (a non-uniform program)."""
    lines = gp.source.splitlines()
    sig = rng.choice(gp.sigs)
    idx = max(i for i, l in enumerate(lines) if l.split()[0] == sig.name)
    params = " ".join(f"v{i}" for i in range(len(sig.params)))
    lines.insert(idx + 1, f"{sig.name} {params} = {gen_value(rng, sig.result)}")
    return "\n".join(lines) + "\n"


@given(st.integers(0, 10_000))
def test_uniformize_preserves_oracle_value_sets(seed):
    rng = random.Random(seed)
    gp = gen_program(rng)
    raw = parse_program(_with_overlapping_rule(gp, rng))
    uni = uniformize(raw)
    assert validate_uniform(uni) == []
    f = gp.target
    entry = " ".join([f.name] + [f"({gen_value(rng, t)})" for t in f.params])
    a = enumerate_values(raw, parse_expr(entry, raw))
    b = enumerate_values(uni, parse_expr(entry, uni))
    if not (a.truncated or b.truncated):
        assert set(a.values) == set(b.values)
