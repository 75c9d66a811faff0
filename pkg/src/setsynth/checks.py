"""Executable correctness properties relating synthesized code to the oracle.

Each check returns a :class:`CheckOutcome`; ``status`` is ``"ok"``,
``"violation"`` or ``"skipped"`` (the oracle was truncated, so nothing can
be concluded).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import runtime as rt
from .lang import Expr, Program, parse_expr, parse_program
from .oracle import enumerate_values, set_function_oracle
from .session import Session
from .synthesis import ConvertOps, Machine, emit_program

_ids = itertools.count()


@dataclass
class CheckOutcome:
    status: str
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _ground(program: Program, text: str):
    r = enumerate_values(program, parse_expr(text, program))
    if len(r.values) != 1:
        raise ValueError(f"{text!r} is not a ground value")
    return r.values[0]


def _as_sets(items) -> list:
    return sorted((frozenset(s) for s in items), key=lambda s: sorted(map(repr, s)))


def def1_case(program: Program, f: str, args: list[str], depth_bound: int = 8,
              session: Session | None = None) -> CheckOutcome:
    """``fS args`` against the oracle's per-argument-value sets.

    Compared as a multiset of sets: one set per outer alternative, duplicates
    and order inside each set ignored.
    """
    session = session or Session(program)
    exprs = [session.parse(a) for a in args]
    oracle, truncated = set_function_oracle(program, f, exprs, depth_bound)
    if truncated:
        # synthesized code has no depth bound; a truncated oracle says nothing
        return CheckOutcome("skipped", {"oracle": [r.values for r in oracle]})
    synth = session.set_results(f, exprs).items
    detail = {"synth": synth, "oracle": [r.values for r in oracle], "args": [r.args for r in oracle]}
    same = _as_sets(synth) == _as_sets(detail["oracle"])
    return CheckOutcome("ok" if same else "violation", detail)


def _plural_values(machine: Machine, f: str, trees: list) -> set:
    t = machine.plural(f + "P", rt.init_supply(), 1, trees)
    return {ConvertOps.from_val_st(v) for v in rt.st_values(t)}


def theorem1_ground(program: Program, f: str, args: list[str], depth_bound: int = 8) -> CheckOutcome:
    """For ground x: fS x, fP (Val x) and the oracle's values of f x agree as sets."""
    xs = [_ground(program, a) for a in args]
    oracle = enumerate_values(program, parse_expr(" ".join([f] + [f"({a})" for a in args]), program), depth_bound)
    if oracle.truncated:
        return CheckOutcome("skipped")
    machine = Machine(emit_program(program, [f]))
    s_vals = set(machine.run(f, xs))
    p_vals = _plural_values(machine, f, [rt.Val(ConvertOps.to_val_st(x)) for x in xs])
    detail = {"set": s_vals, "plural": p_vals, "oracle": set(oracle.values)}
    return CheckOutcome("ok" if s_vals == p_vals == set(oracle.values) else "violation", detail)


def choice_tree(values: list, level: int = 0):
    """Explicit choice tree over ground values, with fresh ids."""
    trees = [rt.Val(ConvertOps.to_val_st(v)) for v in values]
    out = trees[-1]
    for t in reversed(trees[:-1]):
        out = rt.Choice(rt.ChoiceId("x", next(_ids)), level, t, out)
    return out


def theorem1_choice(program: Program, f: str, alternatives: list[str], rest: list[str],
                    depth_bound: int = 8) -> CheckOutcome:
    """fP over a choice of values X in the first argument equals the union of fS x over x in X.

    Also checked against the oracle's values of ``f (x1 ? .. ? xk) rest``.
    """
    xs = [_ground(program, a) for a in alternatives]
    others = [_ground(program, a) for a in rest]
    arg = " ? ".join(f"({a})" for a in alternatives)
    entry = " ".join([f, f"({arg})"] + [f"({r})" for r in rest])
    oracle = enumerate_values(program, parse_expr(entry, program), depth_bound)
    if oracle.truncated:
        return CheckOutcome("skipped")
    machine = Machine(emit_program(program, [f]))
    union: set = set()
    for x in xs:
        union |= set(machine.run(f, [x] + others))
    p_vals = _plural_values(machine, f, [choice_tree(xs)] + [rt.Val(ConvertOps.to_val_st(o)) for o in others])
    detail = {"union": union, "plural": p_vals, "oracle": set(oracle.values)}
    return CheckOutcome("ok" if union == p_vals == set(oracle.values) else "violation", detail)


def lemma2_case(source: str, f: str, g: str, arg: str) -> CheckOutcome:
    """The plural of ``\\x -> f (g x)`` equals ``fP`` applied to ``gP``'s tree."""
    comp = "composedFG"
    program = parse_program(source + f"\n{comp} x = {f} ({g} x)\n")
    machine = Machine(emit_program(program, [comp, f, g]))
    x = _ground(program, arg)
    direct = _plural_values(machine, comp, [rt.Val(ConvertOps.to_val_st(x))])
    inner = machine.plural(g + "P", rt.left_supply(rt.init_supply()), 1, [rt.Val(ConvertOps.to_val_st(x))])
    outer = machine.plural(f + "P", rt.right_supply(rt.init_supply()), 1, [inner])
    composed = {ConvertOps.from_val_st(v) for v in rt.st_values(outer)}
    return CheckOutcome("ok" if direct == composed else "violation", {"direct": direct, "composed": composed})


def linear_case(program: Program, f: str, args: list[str]) -> CheckOutcome:
    """Synthesis with and without supply threading yields equal multisets."""
    with_ids = Session(program, "always")
    without = Session(program, "never")
    a = with_ids.set_results(f, [with_ids.parse(x) for x in args]).items
    b = without.set_results(f, [without.parse(x) for x in args]).items
    norm = lambda items: sorted(sorted(map(repr, s)) for s in items)
    return CheckOutcome("ok" if norm(a) == norm(b) else "violation", {"always": a, "never": b})
