"""Reference interpreter for MiniFLP with call-time choice.

Expressions are evaluated lazily over a heap of cells.  A variable that
occurs several times in a rule body is bound to one cell, so a ``?`` it
reaches is resolved once per derivation.

Two modes:

* ``replay`` (used by :func:`enumerate_values` and
  :func:`set_function_oracle`) resolves every ``?`` from a prefix of
  decisions and re-runs the derivation from a fresh heap for each prefix,
  depth first, Left before Right.  Brute force, independent of the
  synthesized code.
* ``pulltab`` (used by :func:`force_hnf` for set-function arguments) never
  decides: a ``?`` becomes a split node whose id is fixed by its cell, and
  every redex that demands a split is copied into both alternatives.
  Splits are written back into the heap, so every reader of a cell sees
  the same choice id.

Each cell carries the encapsulation level it was created at.  A set
function applied in a level-``L`` cell enumerates its own derivations at
level ``L+1``; choices in older cells are decided by the enclosing
derivation, and a failure keeps the level of the cell where ``failed``
was created.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import runtime as rt
from .lang import (BUILTIN_OPS, Choice, ConApp, Expr, Failed, FunApp, IfThenElse, Lit, PCon, PLit,
                   PluralApp, Program, PVar, SetApp, Var)
from .values import BOTTOM, CONS, FALSE, NIL, TRUE, Con, as_list, from_list

__all__ = [
    "Heap", "Cell", "Value", "Failure", "Split", "HeadForm", "EvalError", "Enumeration", "SetResult",
    "enumerate_values", "force_hnf", "set_function_oracle", "DEFAULT_STEP_BUDGET",
]

DEFAULT_STEP_BUDGET = 200_000


class EvalError(Exception):
    """Ill-typed or unsupported computation (not a failure of the program)."""


class _Failed(Exception):
    def __init__(self, level: int):
        self.level = level


class _NeedChoice(Exception):
    def __init__(self, derivation):
        self.derivation = derivation


class _OutOfSteps(Exception):
    pass


class Cell:
    __slots__ = ("node", "level", "serial")

    def __init__(self, node, level: int, serial: int):
        self.node = node
        self.level = level
        self.serial = serial

    def __repr__(self) -> str:
        return f"<cell {self.serial}@{self.level} {self.node[0]}>"


@dataclass(frozen=True)
class HeadForm:
    """Constructor with argument cells, or an int (``name`` is None)."""
    name: str | None
    args: tuple = ()
    value: int | None = None


@dataclass(frozen=True)
class Value:
    hnf: HeadForm


@dataclass(frozen=True)
class Failure:
    level: int = 0


@dataclass(frozen=True)
class Split:
    id: rt.ChoiceId
    left: Cell
    right: Cell


_TERMINAL = frozenset({"con", "int", "failed", "split"})
_heap_ids = itertools.count(1)


class _Derivation:
    __slots__ = ("level", "prefix", "pos", "parent")

    def __init__(self, level: int, prefix: tuple, parent):
        self.level = level
        self.prefix = prefix
        self.pos = 0
        self.parent = parent

    def owner(self, level: int) -> "_Derivation":
        d = self
        while d is not None and d.level > level:
            d = d.parent
        if d is None or d.level != level:
            raise EvalError(f"no enclosing derivation at level {level}")
        return d

    def decide(self) -> rt.Decision:
        if self.pos < len(self.prefix):
            d = self.prefix[self.pos]
            self.pos += 1
            return d
        raise _NeedChoice(self)


def _plan(fd):
    """How to select a rule: one variable rule, a case on one argument, or try every rule."""
    rules = fd.rules
    positions = {i for r in rules for i, p in enumerate(r.patterns) if not isinstance(p, PVar)}
    if len(rules) == 1 and not positions:
        return ("var", rules[0])
    if len(positions) == 1:
        (k,) = positions
        table = {}
        flat = all(isinstance(r.patterns[k], PCon) and all(isinstance(a, PVar) for a in r.patterns[k].args)
                   for r in rules)
        if flat:
            for r in rules:
                table.setdefault(r.patterns[k].name, []).append(r)
            if all(len(v) == 1 for v in table.values()):
                return ("case", k, {c: v[0] for c, v in table.items()})
    return ("alts", rules)


class Heap:
    def __init__(self, program: Program, mode: str = "replay", set_hook: Callable | None = None,
                 step_budget: int = DEFAULT_STEP_BUDGET, depth_bound: int = 8):
        if mode not in ("replay", "pulltab"):
            raise ValueError(mode)
        self.program = program
        self.mode = mode
        self.set_hook = set_hook
        self.step_budget = step_budget
        self.depth_bound = depth_bound
        self.steps = 0
        self.truncated = False
        self.uid = next(_heap_ids)
        self._serial = itertools.count()
        self.funcs = program.functions()
        self.plans = {name: _plan(fd) for name, fd in self.funcs.items()}
        self.current: _Derivation | None = None

    # -- allocation

    def alloc(self, node, level: int = 0) -> Cell:
        return Cell(node, level, next(self._serial))

    def build(self, e: Expr, env: dict, level: int) -> Cell:
        if isinstance(e, Var):
            try:
                return env[e.name]
            except KeyError:
                raise EvalError(f"unbound variable {e.name!r}") from None
        if isinstance(e, Lit):
            return self.alloc(("int", e.value), level)
        if isinstance(e, ConApp):
            return self.alloc(("con", e.name, tuple(self.build(a, env, level) for a in e.args)), level)
        if isinstance(e, FunApp):
            args = tuple(self.build(a, env, level) for a in e.args)
            if e.name in BUILTIN_OPS:
                return self.alloc(("prim", e.name, args[0], args[1]), level)
            return self.alloc(("app", e.name, args), level)
        if isinstance(e, PluralApp):
            return self.alloc(("app", e.name, tuple(self.build(a, env, level) for a in e.args)), level)
        if isinstance(e, SetApp):
            return self.alloc(("set", e.name, tuple(self.build(a, env, level) for a in e.args)), level)
        if isinstance(e, Choice):
            return self.alloc(("choice", self.build(e.left, env, level), self.build(e.right, env, level)), level)
        if isinstance(e, Failed):
            return self.alloc(("fail",), level)
        if isinstance(e, IfThenElse):
            return self.alloc(("if", self.build(e.cond, env, level), self.build(e.then, env, level),
                               self.build(e.else_, env, level)), level)
        raise EvalError(f"cannot evaluate {e!r}")

    def from_value(self, v, level: int) -> Cell:
        if isinstance(v, int):
            return self.alloc(("int", v), level)
        return self.alloc(("con", v.name, tuple(self.from_value(a, level) for a in v.args)), level)

    # -- evaluation to head-normal form

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise _OutOfSteps()

    def _split_id(self, cell: Cell) -> rt.ChoiceId:
        return rt.ChoiceId("o", (self.uid, cell.serial))

    def _pulltab(self, cell: Cell, split_node, rebuild) -> Cell:
        _, cid, l, r = split_node
        cell.node = ("split", cid, self.alloc(rebuild(l), cell.level), self.alloc(rebuild(r), cell.level))
        return cell

    def whnf(self, cell: Cell) -> Cell:
        """Evaluate ``cell`` in place until its node is con, int, failed or split."""
        while True:
            node = cell.node
            kind = node[0]
            if kind in _TERMINAL:
                return cell
            self._tick()
            if kind == "ind":
                cell.node = self.whnf(node[1]).node
            elif kind == "choice":
                if self.mode == "pulltab":
                    cell.node = ("split", self._split_id(cell), node[1], node[2])
                    return cell
                d = self.current.owner(cell.level).decide()
                cell.node = ("ind", node[1] if d is rt.LEFT else node[2])
            elif kind == "fail":
                cell.node = ("failed", cell.level)
            elif kind == "app":
                self._step_app(cell, node)
            elif kind == "rule":
                self._step_rule(cell, node)
            elif kind == "if":
                c = self.whnf(node[1]).node
                if c[0] in ("failed",):
                    cell.node = c
                elif c[0] == "split":
                    return self._pulltab(cell, c, lambda x: ("if", x, node[2], node[3]))
                elif c[0] == "con" and c[1] in (TRUE, FALSE):
                    cell.node = ("ind", node[2] if c[1] == TRUE else node[3])
                else:
                    raise EvalError("if-then-else on a non-Boolean")
            elif kind == "prim":
                self._step_prim(cell, node)
            elif kind == "set":
                self._step_set(cell, node)
            elif kind == "tree":
                self._step_tree(cell, node[1])
            else:
                raise EvalError(f"bad node {kind}")

    def _step_app(self, cell: Cell, node) -> None:
        _, f, args = node
        plan = self.plans.get(f)
        if plan is None:
            raise EvalError(f"unknown function {f!r}")
        if plan[0] == "var":
            rule = plan[1]
            env = {p.name: a for p, a in zip(rule.patterns, args)}
            cell.node = ("ind", self.build(rule.body, env, cell.level))
        elif plan[0] == "case":
            _, k, table = plan
            a = self.whnf(args[k]).node
            if a[0] == "failed":
                cell.node = a
            elif a[0] == "split":
                self._pulltab(cell, a, lambda x: ("app", f, args[:k] + (x,) + args[k + 1:]))
            elif a[0] == "con":
                rule = table.get(a[1])
                if rule is None:
                    cell.node = ("failed", cell.level)
                    return
                env = {}
                for i, (p, arg) in enumerate(zip(rule.patterns, args)):
                    if i == k:
                        env.update({sp.name: sa for sp, sa in zip(p.args, a[2])})
                    else:
                        env[p.name] = arg
                cell.node = ("ind", self.build(rule.body, env, cell.level))
            else:
                raise EvalError(f"{f}: pattern match on an integer")
        else:
            rules = plan[1]
            if self.mode == "pulltab":
                raise EvalError(f"{f} is not in uniform form; uniformize the program first")
            alts = [self.alloc(("rule", f, i, args), cell.level) for i in range(len(rules))]
            out = alts[-1]
            for c in reversed(alts[:-1]):
                out = self.alloc(("choice", c, out), cell.level)
            cell.node = ("ind", out)

    def _match(self, p, c: Cell, env: dict) -> bool | tuple:
        if isinstance(p, PVar):
            env[p.name] = c
            return True
        n = self.whnf(c).node
        if n[0] == "failed":
            return ("failed", n[1])
        if isinstance(p, PLit):
            if n[0] != "int":
                raise EvalError("literal pattern against a constructor")
            return n[1] == p.value
        if n[0] != "con":
            raise EvalError("constructor pattern against an integer")
        if n[1] != p.name:
            return False
        for sp, sc in zip(p.args, n[2]):
            r = self._match(sp, sc, env)
            if r is not True:
                return r
        return True

    def _step_rule(self, cell: Cell, node) -> None:
        _, f, i, args = node
        rule = self.funcs[f].rules[i]
        env: dict = {}
        for p, a in zip(rule.patterns, args):
            r = self._match(p, a, env)
            if r is False:
                cell.node = ("failed", cell.level)
                return
            if r is not True:
                cell.node = r
                return
        cell.node = ("ind", self.build(rule.body, env, cell.level))

    def _step_prim(self, cell: Cell, node) -> None:
        _, op, a, b = node
        x = self.whnf(a).node
        if x[0] == "failed":
            cell.node = x
            return
        if x[0] == "split":
            self._pulltab(cell, x, lambda c: ("prim", op, c, b))
            return
        y = self.whnf(b).node
        if y[0] == "failed":
            cell.node = y
            return
        if y[0] == "split":
            self._pulltab(cell, y, lambda c: ("prim", op, a, c))
            return
        if x[0] != "int" or y[0] != "int":
            raise EvalError(f"({op}) applied to a non-integer")
        r = apply_prim(op, x[1], y[1])
        cell.node = ("int", r) if isinstance(r, int) and not isinstance(r, bool) else ("con", TRUE if r else FALSE, ())

    def _step_tree(self, cell: Cell, t) -> None:
        t = rt.whnf(t)
        if isinstance(t, rt.Uneval):
            cell.node = ("tree", t.susp.force())
        elif isinstance(t, rt.Fail):
            cell.node = ("failed", t.level)
        elif isinstance(t, rt.Choice):
            if t.id is None:
                raise EvalError("anonymous choice cannot be shared with the outer level")
            cell.node = ("split", t.id, self.alloc(("tree", t.left), cell.level),
                         self.alloc(("tree", t.right), cell.level))
        elif isinstance(t.value, rt.NdCon):
            cell.node = ("con", t.value.name, tuple(self.alloc(("tree", c), cell.level) for c in t.value.children))
        else:
            cell.node = ("int", t.value)

    def _step_set(self, cell: Cell, node) -> None:
        _, f, args = node
        if self.mode == "pulltab":
            if self.set_hook is None:
                raise EvalError(f"set function {f}S needs a synthesis hook in pull-tab mode")
            cell.node = ("tree", self.set_hook(self, f, args))
            return
        inner = cell.level + 1
        parent = self.current.owner(cell.level)
        saved = self.current
        values = []
        max_fail = -1
        stack = [()]
        try:
            while stack:
                prefix = stack.pop()
                d = _Derivation(inner, prefix, parent)
                self.current = d
                app = self.alloc(("app", f, args), inner)
                try:
                    values.append(self.normal_form(app))
                except _NeedChoice as need:
                    if need.derivation is not d:
                        raise
                    if len(prefix) >= self.depth_bound:
                        self.truncated = True
                    else:
                        stack.append(prefix + (rt.RIGHT,))
                        stack.append(prefix + (rt.LEFT,))
                except _Failed as fl:
                    max_fail = max(max_fail, fl.level)
        finally:
            self.current = saved
        if values or max_fail >= inner:
            cell.node = self.from_value(from_list(values), cell.level).node
        else:
            cell.node = ("failed", max_fail)

    # -- full evaluation

    def normal_form(self, cell: Cell):
        c = self.whnf(cell).node
        if c[0] == "int":
            return c[1]
        if c[0] == "con":
            return Con(c[1], tuple(self.normal_form(a) for a in c[2]))
        if c[0] == "failed":
            raise _Failed(c[1])
        raise EvalError("normal_form over a split; use values() in pull-tab mode")

    def read_partial(self, cell: Cell, depth: int = 1000):
        """The part of ``cell`` evaluated so far; unevaluated positions are ⊥."""
        node = cell.node
        while node[0] == "ind":
            node = node[1].node
        if depth <= 0:
            return BOTTOM
        if node[0] == "int":
            return node[1]
        if node[0] == "con":
            return Con(node[1], tuple(self.read_partial(a, depth - 1) for a in node[2]))
        return BOTTOM

    def values(self, cell: Cell, decisions: rt.DecisionMap | None = None) -> Iterator:
        """Pull-tab mode: all values of ``cell``, choices resolved with a decision memo."""
        m = decisions if decisions is not None else rt.DecisionMap()
        for v, _ in self._values(cell, m):
            yield v

    def _values(self, cell: Cell, m: rt.DecisionMap):
        c = self.whnf(cell).node
        kind = c[0]
        if kind == "int":
            yield c[1], m
        elif kind == "failed":
            return
        elif kind == "split":
            _, cid, l, r = c
            d = m.get(cid)
            if d is rt.LEFT:
                yield from self._values(l, m)
            elif d is rt.RIGHT:
                yield from self._values(r, m)
            else:
                yield from self._values(l, m.extend(cid, rt.LEFT))
                yield from self._values(r, m.extend(cid, rt.RIGHT))
        else:
            yield from self._args_values(c[1], c[2], 0, (), m)

    def _args_values(self, name, args, i, acc, m):
        if i == len(args):
            yield Con(name, acc), m
            return
        for v, m2 in self._values(args[i], m):
            yield from self._args_values(name, args, i + 1, acc + (v,), m2)


def apply_prim(op: str, x: int, y: int):
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    if op == "==":
        return x == y
    if op == "/=":
        return x != y
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">":
        return x > y
    if op == ">=":
        return x >= y
    raise EvalError(f"unknown operator {op}")


def force_hnf(heap: Heap, cell: Cell):
    """Evaluate ``cell`` to head-normal form in a pull-tab heap."""
    if heap.mode != "pulltab":
        raise ValueError("force_hnf needs a pull-tab heap")
    node = heap.whnf(cell).node
    if node[0] == "int":
        return Value(HeadForm(None, (), node[1]))
    if node[0] == "con":
        return Value(HeadForm(node[1], node[2]))
    if node[0] == "failed":
        return Failure(node[1])
    return Split(node[1], node[2], node[3])


# ---------------------------------------------------------------- enumeration


@dataclass
class Enumeration:
    values: list
    truncated: bool = False


@dataclass
class SetResult:
    """One value of ``fS args``: the demanded argument parts and the result set."""
    args: tuple
    values: list


def _enumerate(program: Program, setup, finish, depth_bound: int, step_budget: int,
               max_values: int | None = None) -> tuple[list, bool]:
    out = []
    truncated = False
    stack = [()]
    while stack:
        prefix = stack.pop()
        heap = Heap(program, "replay", step_budget=step_budget, depth_bound=depth_bound)
        d0 = _Derivation(0, prefix, None)
        heap.current = d0
        root, extra = setup(heap)
        try:
            v = heap.normal_form(root)
        except _NeedChoice as need:
            truncated |= heap.truncated
            if len(prefix) >= depth_bound:
                truncated = True
            else:
                stack.append(prefix + (rt.RIGHT,))
                stack.append(prefix + (rt.LEFT,))
            continue
        except _Failed:
            truncated |= heap.truncated
            continue
        except _OutOfSteps:
            truncated = True
            continue
        truncated |= heap.truncated
        out.append(finish(heap, v, extra))
        if max_values is not None and len(out) >= max_values:
            return out, True if stack else truncated
    return out, truncated


def enumerate_values(program: Program, e: Expr, depth_bound: int = 8,
                     step_budget: int = DEFAULT_STEP_BUDGET, max_values: int | None = None) -> Enumeration:
    """All values of the closed expression ``e``, in depth-first decision order."""
    vals, trunc = _enumerate(program, lambda h: (h.build(e, {}, 0), None), lambda h, v, x: v,
                             depth_bound, step_budget, max_values)
    return Enumeration(vals, trunc)


def set_function_oracle(program: Program, f: str, args: list, depth_bound: int = 8,
                        step_budget: int = DEFAULT_STEP_BUDGET) -> tuple[list[SetResult], bool]:
    """Every value of ``fS args``, each with the partial argument values it depended on.

    Returns ``(results, truncated)``.
    """
    fd = program.function(f)
    if len(args) != fd.arity:
        raise EvalError(f"{f} takes {fd.arity} arguments, got {len(args)}")

    def setup(heap):
        cells = tuple(heap.build(a, {}, 0) for a in args)
        return heap.alloc(("set", f, cells), 0), cells

    def finish(heap, v, cells):
        return SetResult(tuple(heap.read_partial(c) for c in cells), as_list(v))

    return _enumerate(program, setup, finish, depth_bound, step_budget)
