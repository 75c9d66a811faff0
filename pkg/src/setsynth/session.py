"""Evaluate entry expressions against a program, through synthesized code or the oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import runtime as rt
from .lang import Expr, PluralApp, Program, SetApp, parse_expr, parse_program
from .oracle import DEFAULT_STEP_BUDGET, Heap, enumerate_values
from .synthesis import ConvertOps, Machine, emit_program, to_st_cell
from .values import Con, as_list


@dataclass
class EntryResult:
    """Values of an entry expression.

    ``kind`` is ``"sets"`` when the entry is a set-function call (each item is
    a Python list, one multiset per outer alternative) and ``"values"``
    otherwise.
    """
    kind: str
    items: list
    truncated: bool = False


@dataclass
class RunOptions:
    strategy: str = "dfs"
    max_values: int | None = None
    depth_bound: int = 8
    step_budget: int = DEFAULT_STEP_BUDGET


class Session:
    def __init__(self, program: Program, thread_supply: str = "always"):
        self.program = program
        self.bundle = emit_program(program, [f.name for f in program.func_defs])
        self.machine = Machine(self.bundle, thread_supply)

    @classmethod
    def from_source(cls, text: str, thread_supply: str = "always") -> "Session":
        return cls(parse_program(text), thread_supply)

    def parse(self, text: str) -> Expr:
        return parse_expr(text, self.program)

    def new_heap(self) -> Heap:
        def hook(heap, f, cells):
            args = [to_st_cell(heap, c) for c in cells]
            return self.machine.plural_set(f + "SP", rt.init_supply(), 0, args)
        return Heap(self.bundle.program, "pulltab", set_hook=hook)

    # synthesized code

    def set_results(self, f: str, args: list[Expr], opts: RunOptions = RunOptions()) -> EntryResult:
        heap = self.new_heap()
        trees = [to_st_cell(heap, heap.build(a, {}, 0)) for a in args]
        it = self.machine.set_function(f + "S", trees, opts.strategy, opts.max_values)
        if opts.max_values is not None:
            it = itertools.islice(it, opts.max_values)
        sets = list(it)
        return EntryResult("sets", [rs.values for rs in sets], any(rs.truncated for rs in sets))

    def eval_synth(self, e: Expr, opts: RunOptions = RunOptions()) -> EntryResult:
        if isinstance(e, SetApp):
            return self.set_results(e.name, list(e.args), opts)
        heap = self.new_heap()
        if isinstance(e, PluralApp):
            trees = [to_st_cell(heap, heap.build(a, {}, 0)) for a in e.args]
            tree = rt.nf_st(self.machine.plural(e.name + "P", rt.init_supply(), 1, trees))
            search = rt.iter_dfs if opts.strategy == "dfs" else rt.iter_bfs
            vals = (ConvertOps.from_val_st(v) for v in search(tree))
        else:
            vals = heap.values(heap.build(e, {}, 0))
        return _take(vals, opts.max_values)

    # reference interpreter

    def eval_oracle(self, e: Expr, opts: RunOptions = RunOptions()) -> EntryResult:
        r = enumerate_values(self.program, e, opts.depth_bound, opts.step_budget, opts.max_values)
        if isinstance(e, SetApp):
            return EntryResult("sets", [as_list(v) for v in r.values], r.truncated)
        return EntryResult("values", r.values, r.truncated)


def _take(vals, k: int | None) -> EntryResult:
    if k is None:
        return EntryResult("values", list(vals))
    out = list(itertools.islice(vals, k + 1))
    return EntryResult("values", out[:k], len(out) > k)


def same_sets(a: EntryResult, b: EntryResult) -> bool:
    """Set-level equality of two results (order and duplicates ignored)."""
    if a.kind != b.kind:
        return False
    if a.kind == "sets":
        return {frozenset(s) for s in a.items} == {frozenset(s) for s in b.items}
    return set(a.items) == set(b.items)
