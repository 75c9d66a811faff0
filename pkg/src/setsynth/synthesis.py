"""Synthesis of plural functions and set functions.

Every function ``f`` of a uniform program is translated into a plural
function ``fP`` over search trees.  ``fP`` takes an identifier supply, an
encapsulation level and one search tree per argument:

* variables pass through;
* ``C e1 .. en`` becomes ``Val (C t1 .. tn)``;
* ``g e1 .. en`` becomes a call of ``gP`` with its own sub-supply;
* ``e1 ? e2`` becomes ``Choice (uniqueID s) e t1 t2`` with the two
  alternatives on the left/right sub-supplies;
* ``failed`` becomes ``Fail e``;
* pattern matching and ``if`` go through ``applyST``.

Bodies are kept in a small IR (``I*`` classes) that :class:`Machine`
interprets lazily with the operations of :mod:`setsynth.runtime`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import runtime as rt
from .lang import (BUILTIN_OPS, Choice, ConApp, DataDecl, Expr, Failed, FuncDef, FunApp, IfThenElse, Lit,
                   PCon, PluralApp, Program, PVar, SetApp, UniformityError, Var, uniformize,
                   validate_uniform, var_occurrences)
from .values import CONS, FALSE, NIL, TRUE, Con

__all__ = [
    "Supply", "Level", "IVar", "IInt", "IVal", "IChoice", "IFail", "ICall", "ISetCall", "IMatch", "IPrim",
    "NdDataDecl", "NfOp", "ConvertOps", "PluralDef", "PluralSetDef", "SetFunDef", "Bundle",
    "SynthesisError", "OuterNondeterminism",
    "gen_nd_types", "gen_nf", "gen_convert", "pluralize_expr", "pluralize_function",
    "synthesize_set_function", "synthesize_plural_set_function", "emit_program", "is_right_linear",
    "Machine", "to_st_cell", "from_st", "from_st_alternatives",
]


class SynthesisError(Exception):
    pass


class OuterNondeterminism(Exception):
    """``from_st`` met a choice or failure that belongs to the caller."""


# ---------------------------------------------------------------- IR


@dataclass(frozen=True)
class Supply:
    """Sub-supply of the function's supply ``s``: a path of L/R steps from it."""
    path: str = ""

    def left(self) -> "Supply":
        return Supply(self.path + "L")

    def right(self) -> "Supply":
        return Supply(self.path + "R")

    def render(self, root: str = "s") -> str:
        out = root
        for step in self.path:
            out = f"{'leftSupply' if step == 'L' else 'rightSupply'} {out if out == root else '(' + out + ')'}"
        return out

    def resolve(self, s: rt.IdSupply) -> rt.IdSupply:
        for step in self.path:
            s = rt.left_supply(s) if step == "L" else rt.right_supply(s)
        return s


@dataclass(frozen=True)
class Level:
    """Encapsulation level relative to the function's level parameter ``e``."""
    offset: int = 0

    def render(self) -> str:
        return "e" if self.offset == 0 else f"(e+{self.offset})"


@dataclass(frozen=True)
class IVar:
    name: str


@dataclass(frozen=True)
class IInt:
    value: int


@dataclass(frozen=True)
class IVal:
    con: str
    args: tuple = ()


@dataclass(frozen=True)
class IChoice:
    supply: Supply
    level: Level
    left: object
    right: object


@dataclass(frozen=True)
class IFail:
    level: Level


@dataclass(frozen=True)
class ICall:
    name: str
    supply: Supply
    level: Level
    args: tuple


@dataclass(frozen=True)
class ISetCall:
    name: str
    supply: Supply
    level: Level
    args: tuple


@dataclass(frozen=True)
class IMatch:
    scrut: object
    alts: tuple  # (constructor, vars, body)


@dataclass(frozen=True)
class IPrim:
    op: str
    left: object
    right: object


IR = object


def _display_con(name: str) -> str:
    return {NIL: "Nil", CONS: "Cons"}.get(name, name)


def render_ir(ir, indent: int = 0, prec: int = 0) -> str:
    pad = "  " * indent
    if isinstance(ir, IVar):
        return ir.name
    if isinstance(ir, IInt):
        s = f"Val {ir.value}" if ir.value >= 0 else f"Val ({ir.value})"
        return f"({s})" if prec >= 2 else s
    if isinstance(ir, IVal):
        inner = " ".join([_display_con(ir.con) + "P"] + [render_ir(a, indent, 2) for a in ir.args])
        s = f"Val ({inner})" if ir.args else f"Val {inner}"
        return f"({s})" if prec >= 2 else s
    if isinstance(ir, IFail):
        s = f"Fail {ir.level.render()}"
        return f"({s})" if prec >= 2 else s
    if isinstance(ir, IChoice):
        s = (f"Choice (uniqueID {_paren(ir.supply.render())}) {ir.level.render()} "
             f"{render_ir(ir.left, indent, 2)} {render_ir(ir.right, indent, 2)}")
        return f"({s})" if prec >= 2 else s
    if isinstance(ir, (ICall, ISetCall)):
        parts = [ir.name, _paren(ir.supply.render()), ir.level.render()] + [render_ir(a, indent, 2) for a in ir.args]
        s = " ".join(parts)
        return f"({s})" if prec >= 2 else s
    if isinstance(ir, IPrim):
        s = f"primP ({ir.op}) {render_ir(ir.left, indent, 2)} {render_ir(ir.right, indent, 2)}"
        return f"({s})" if prec >= 2 else s
    if isinstance(ir, IMatch):
        lines = [f"applyST {render_ir(ir.scrut, indent, 2)} of"]
        for con, vs, body in ir.alts:
            lhs = " ".join([_display_con(con) + "P"] + list(vs))
            lines.append(f"{pad}  {lhs} -> {render_ir(body, indent + 2, 0)}")
        s = "\n".join(lines)
        return f"({s})" if prec >= 2 else s
    raise TypeError(ir)


def _paren(s: str) -> str:
    return s if " " not in s else f"({s})"


# ---------------------------------------------------------------- ND types


@dataclass(frozen=True)
class NdDataDecl:
    """Mirror of a source type: each constructor argument becomes a search tree."""
    name: str
    source: str
    params: tuple
    constructors: tuple  # (source constructor, nd display name, child types)

    def render(self) -> str:
        alts = []
        for _, nd, tys in self.constructors:
            alts.append(" ".join([nd] + [f"(ST {_nd_type(t)})" for t in tys]))
        head = " ".join([self.name] + list(self.params))
        return f"data {head} = " + " | ".join(alts)


def _nd_type(t: str) -> str:
    t = t.strip()
    if t.startswith("[") and t.endswith("]"):
        return f"(ListP {_nd_type(t[1:-1])})"
    if t.startswith("(") and t.endswith(")"):
        return _nd_type(t[1:-1])
    head, *rest = t.split()
    if head[0].isupper() and head != "Int":
        head += "P"
    return f"({' '.join([head] + rest)})" if rest else head


def _type_text(t) -> str:
    return t if isinstance(t, str) else str(t)


def gen_nd_types(p: Program) -> list[NdDataDecl]:
    out = []
    for d in p.all_data:
        nd_name = ("List" if d.name in ("List", "[]") else d.name) + "P"
        cons = tuple((c.name, _display_con(c.name) + "P", tuple(_type_text(a) for a in c.arg_types))
                     for c in d.constructors)
        out.append(NdDataDecl(nd_name, d.name, tuple(d.params), cons))
    return out


@dataclass(frozen=True)
class NfOp:
    """Normal-form operation for one ND type: children left to right, choices hoisted."""
    type_name: str
    arities: tuple

    def __call__(self, x):
        return rt.nf_con(x, rt.generic_nf) if isinstance(x, rt.NdCon) else rt.Val(x)

    def render(self) -> str:
        lines = [f"nf :: {self.type_name} -> ST {_paren(self.type_name)}"]
        for con, n in self.arities:
            xs = [f"x{i + 1}" for i in range(n)]
            lhs = " ".join([con] + xs)
            if n == 0:
                lines.append(f"nf {con} = Val {con}")
            else:
                lines.append(f"nf ({lhs}) = nfChildren [{', '.join(xs)}] {con}")
        return "\n".join(lines)


def gen_nf(d: NdDataDecl) -> NfOp:
    head = " ".join((d.name,) + d.params)
    return NfOp(head, tuple((nd, len(tys)) for _, nd, tys in d.constructors))


@dataclass(frozen=True)
class ConvertOps:
    type_name: str
    nd_name: str
    pairs: tuple  # (source constructor, nd display name)

    @staticmethod
    def to_val_st(v):
        """Ground source value to an ND head-normal form with Uneval children."""
        if isinstance(v, int):
            return v
        return rt.NdCon(v.name, tuple(ConvertOps.to_st(a) for a in v.args))

    @staticmethod
    def from_val_st(x):
        if isinstance(x, int):
            return x
        if not isinstance(x, rt.NdCon):
            raise TypeError(f"not a head-normal form: {x!r}")
        args = []
        for c in x.children:
            c = rt.whnf(c)
            if not isinstance(c, rt.Val):
                raise ValueError(f"from_val_st on a tree that is not fully evaluated: {c!r}")
            args.append(ConvertOps.from_val_st(c.value))
        return Con(x.name, tuple(args))

    @staticmethod
    def to_st(v):
        return rt.Uneval(rt.Suspension.of(rt.Val(ConvertOps.to_val_st(v)), "ground"))

    @staticmethod
    def from_st(t, level: int = 1) -> list:
        return from_st(t, level)

    def render(self) -> str:
        body = "; ".join(f"{'(' + src + ')' if src == CONS else src} <-> {nd}" for src, nd in self.pairs)
        return f"convert {self.type_name} {self.nd_name}: {body}"


def gen_convert(d: DataDecl) -> ConvertOps:
    nd = ("List" if d.name in ("List", "[]") else d.name) + "P"
    return ConvertOps(d.name, nd, tuple((c.name, _display_con(c.name) + "P") for c in d.constructors))


def from_st_alternatives(t, level: int = 1, strategy: str = "dfs", max_values: int | None = None) \
        -> Iterator[rt.ResultSet]:
    """Result sets per outer world, values converted to source values."""
    for rs in rt.iter_result_sets(t, rt.generic_nf, level, strategy, max_values):
        yield rt.ResultSet([ConvertOps.from_val_st(v) for v in rs.values], rs.outer, rs.truncated)


def from_st(t, level: int = 1) -> list:
    """Values of a level-``level`` computation whose arguments are deterministic."""
    alts = list(from_st_alternatives(t, level))
    if len(alts) != 1 or len(alts[0].outer):
        raise OuterNondeterminism(f"{len(alts)} outer alternatives")
    return alts[0].values


# ---------------------------------------------------------------- pluralization


def _needs_supply(e: Expr) -> bool:
    if isinstance(e, (Choice, SetApp)):
        return True
    if isinstance(e, (FunApp, PluralApp)):
        return e.name not in BUILTIN_OPS or any(_needs_supply(a) for a in e.args)
    if isinstance(e, ConApp):
        return any(_needs_supply(a) for a in e.args)
    if isinstance(e, IfThenElse):
        return _needs_supply(e.cond) or _needs_supply(e.then) or _needs_supply(e.else_)
    return False


def _split(path: Supply, k: int) -> list[Supply]:
    """``k`` pairwise disjoint sub-supplies of ``path``."""
    if k <= 1:
        return [path] * k
    out = []
    cur = path
    for _ in range(k - 1):
        out.append(cur.left())
        cur = cur.right()
    out.append(cur)
    return out


def _distribute(exprs: Sequence[Expr], path: Supply, extra: int = 0) -> tuple[list, list]:
    """Sub-supplies for ``extra`` leading consumers and for the expressions that need one."""
    needy = [i for i, x in enumerate(exprs) if _needs_supply(x)]
    subs = _split(path, extra + len(needy))
    own, rest = subs[:extra], subs[extra:]
    per = [path] * len(exprs)
    for i, s in zip(needy, rest):
        per[i] = s
    return own, per


def pluralize_expr(e: Expr, supply: Supply = Supply(), level: Level = Level(),
                   rename: dict | None = None):
    """Translate a rule body into IR."""
    rename = rename or {}

    def tr(x: Expr, s: Supply):
        if isinstance(x, Var):
            return IVar(rename.get(x.name, x.name))
        if isinstance(x, Lit):
            return IInt(x.value)
        if isinstance(x, Failed):
            return IFail(level)
        if isinstance(x, Choice):
            return IChoice(s, level, tr(x.left, s.left()), tr(x.right, s.right()))
        if isinstance(x, ConApp):
            _, per = _distribute(x.args, s)
            return IVal(x.name, tuple(tr(a, ps) for a, ps in zip(x.args, per)))
        if isinstance(x, FunApp) and x.name in BUILTIN_OPS:
            _, per = _distribute(x.args, s)
            return IPrim(x.name, tr(x.args[0], per[0]), tr(x.args[1], per[1]))
        if isinstance(x, (FunApp, PluralApp)):
            (own,), per = _distribute(x.args, s, 1)
            return ICall(x.name + "P", own, level, tuple(tr(a, ps) for a, ps in zip(x.args, per)))
        if isinstance(x, SetApp):
            (own,), per = _distribute(x.args, s, 1)
            return ISetCall(x.name + "SP", own, level, tuple(tr(a, ps) for a, ps in zip(x.args, per)))
        if isinstance(x, IfThenElse):
            _, per = _distribute([x.cond, x.then, x.else_], s)
            return IMatch(tr(x.cond, per[0]), ((TRUE, (), tr(x.then, per[1])), (FALSE, (), tr(x.else_, per[2]))))
        raise SynthesisError(f"unsupported expression {x!r}")

    return tr(e, supply)


@dataclass(frozen=True)
class PluralDef:
    name: str
    source: str
    params: tuple
    body: object

    def render(self) -> str:
        head = " ".join([self.name, "s", "e"] + list(self.params))
        return f"{head} =\n  {render_ir(self.body, 1)}"


def pluralize_function(fd: FuncDef) -> PluralDef:
    """Plural function of a function in uniform form."""
    rules = fd.rules
    positions = {i for r in rules for i, p in enumerate(r.patterns) if not isinstance(p, PVar)}
    if len(rules) == 1 and not positions:
        params = tuple(p.name for p in rules[0].patterns)
        return PluralDef(fd.name + "P", fd.name, params, pluralize_expr(rules[0].body))
    if len(positions) != 1:
        raise SynthesisError(f"{fd.name} is not in uniform form")
    (k,) = positions
    taken = {v for r in rules for v in r.pattern_vars()}
    params = []
    n = 1
    for _ in range(fd.arity):
        while f"x{n}" in taken:
            n += 1
        params.append(f"x{n}")
        n += 1
    alts = []
    for r in rules:
        pat = r.patterns[k]
        if not isinstance(pat, PCon) or not all(isinstance(a, PVar) for a in pat.args):
            raise SynthesisError(f"{fd.name} is not in uniform form")
        rename = {p.name: params[i] for i, p in enumerate(r.patterns) if i != k}
        alts.append((pat.name, tuple(a.name for a in pat.args), pluralize_expr(r.body, rename=rename)))
    return PluralDef(fd.name + "P", fd.name, tuple(params), IMatch(IVar(params[k]), tuple(alts)))


@dataclass(frozen=True)
class PluralSetDef:
    """``fSP s e xs = stValuesP (e+1) (fP s (e+1) xs)``."""
    name: str
    plural: str
    arity: int

    def render(self) -> str:
        xs = [f"x{i + 1}" for i in range(self.arity)]
        return (f"{' '.join([self.name, 's', 'e'] + xs)} =\n"
                f"  stValuesP (e+1) ({' '.join([self.plural, 's', '(e+1)'] + xs)})")


@dataclass(frozen=True)
class SetFunDef:
    """``fS xs = fromST 1 (fP initSupply 1 (toST x1) ..)``."""
    name: str
    plural: str
    arity: int

    def render(self) -> str:
        xs = [f"x{i + 1}" for i in range(self.arity)]
        call = " ".join([self.plural, "initSupply", "1"] + [f"(toST {x})" for x in xs])
        return f"{' '.join([self.name] + xs)} = fromST 1 ({call})"


def synthesize_plural_set_function(fd: FuncDef) -> PluralSetDef:
    return PluralSetDef(fd.name + "SP", fd.name + "P", fd.arity)


def synthesize_set_function(fd: FuncDef) -> SetFunDef:
    return SetFunDef(fd.name + "S", fd.name + "P", fd.arity)


# ---------------------------------------------------------------- bundles


def _calls(e: Expr, funs: set, sets: set) -> None:
    if isinstance(e, SetApp):
        sets.add(e.name)
    elif isinstance(e, (FunApp, PluralApp)) and e.name not in BUILTIN_OPS:
        funs.add(e.name)
    for sub in _children(e):
        _calls(sub, funs, sets)


def _children(e: Expr) -> tuple:
    if isinstance(e, (ConApp, FunApp, SetApp, PluralApp)):
        return tuple(e.args)
    if isinstance(e, Choice):
        return (e.left, e.right)
    if isinstance(e, IfThenElse):
        return (e.cond, e.then, e.else_)
    return ()


def _closure(p: Program, roots: Sequence[str]) -> tuple[list[str], list[str]]:
    """Functions needing plurals and functions needing plural set functions, in discovery order."""
    plurals: list[str] = []
    set_uses: list[str] = []
    pending = list(roots)
    while pending:
        f = pending.pop(0)
        if f in plurals:
            continue
        plurals.append(f)
        funs: set = set()
        sets: set = set()
        for r in p.function(f).rules:
            _calls(r.body, funs, sets)
        for g in sorted(sets):
            if g not in set_uses:
                set_uses.append(g)
        pending.extend(sorted(funs | sets))
    return plurals, set_uses


def is_right_linear(p: Program, roots: Sequence[str]) -> bool:
    """No rule reachable from ``roots`` uses a variable twice in its body."""
    plurals, _ = _closure(p, roots)
    for f in plurals:
        for r in p.function(f).rules:
            occ = var_occurrences(r.body)
            if len(occ) != len(set(occ)):
                return False
    return True


@dataclass
class Bundle:
    """Everything synthesized for a set of target functions."""
    program: Program
    targets: tuple
    nd_types: list = field(default_factory=list)
    nf_ops: list = field(default_factory=list)
    converts: list = field(default_factory=list)
    plurals: dict = field(default_factory=dict)
    plural_sets: dict = field(default_factory=dict)
    set_functions: dict = field(default_factory=dict)

    def dump(self) -> str:
        out = [f"-- targets: {' '.join(self.targets) if self.targets else '(none)'}"]
        if not self.targets:
            return out[0] + "\n"
        out.append("\n-- ND types")
        out += [d.render() for d in self.nd_types]
        out.append("\n-- normal forms")
        out += [op.render() for op in self.nf_ops]
        out.append("\n-- conversions")
        out += [c.render() for c in self.converts]
        out.append("\n-- plural functions")
        out += [d.render() for d in self.plurals.values()]
        if self.plural_sets:
            out.append("\n-- plural set functions")
            out += [d.render() for d in self.plural_sets.values()]
        out.append("\n-- set functions")
        out += [d.render() for d in self.set_functions.values()]
        return "\n".join(out) + "\n"


def emit_program(p: Program, targets: Sequence[str]) -> Bundle:
    """Uniformize ``p`` and synthesize set functions for ``targets`` plus everything they reach."""
    known = p.functions()
    for t in targets:
        if t not in known:
            raise SynthesisError(f"unknown target {t!r}")
    u = uniformize(p)
    diags = validate_uniform(u)
    if diags:
        raise UniformityError(str(diags[0]))
    b = Bundle(u, tuple(targets))
    if not targets:
        return b
    b.nd_types = gen_nd_types(u)
    b.nf_ops = [gen_nf(d) for d in b.nd_types]
    b.converts = [gen_convert(d) for d in u.all_data]
    plurals, set_uses = _closure(u, targets)
    for f in plurals:
        b.plurals[f + "P"] = pluralize_function(u.function(f))
    for g in set_uses:
        b.plural_sets[g + "SP"] = synthesize_plural_set_function(u.function(g))
    for t in targets:
        b.set_functions[t + "S"] = synthesize_set_function(u.function(t))
    return b


# ---------------------------------------------------------------- execution


_PRIMS = {
    "+": lambda x, y: x + y, "-": lambda x, y: x - y, "*": lambda x, y: x * y,
    "==": lambda x, y: x == y, "/=": lambda x, y: x != y, "<": lambda x, y: x < y,
    "<=": lambda x, y: x <= y, ">": lambda x, y: x > y, ">=": lambda x, y: x >= y,
}


def _prim_val(op: str, x, y):
    if not isinstance(x, int) or not isinstance(y, int):
        raise SynthesisError(f"({op}) applied to a non-integer")
    r = _PRIMS[op](x, y)
    if isinstance(r, bool):
        return rt.Val(rt.NdCon(TRUE if r else FALSE))
    return rt.Val(r)


class Machine:
    """Runs the plural and set functions of a :class:`Bundle`.

    ``thread_supply`` is ``"always"`` (choice ids from the supply),
    ``"never"`` (anonymous choices: every copy of a choice decides on its
    own) or ``"auto"`` (ids only if some reachable rule is not right-linear).
    """

    def __init__(self, bundle: Bundle, thread_supply: str = "always"):
        if thread_supply not in ("always", "never", "auto"):
            raise ValueError(thread_supply)
        self.bundle = bundle
        if thread_supply == "auto":
            roots = [d.source for d in bundle.plurals.values()]
            thread_supply = "never" if is_right_linear(bundle.program, roots) and not bundle.plural_sets \
                else "always"
        if thread_supply == "never" and bundle.plural_sets:
            raise SynthesisError("nested set functions need choice identifiers")
        self.use_ids = thread_supply == "always"

    # plural functions

    def plural(self, name: str, s: rt.IdSupply, e: int, args: Sequence):
        d = self.bundle.plurals.get(name)
        if d is None:
            raise SynthesisError(f"no plural function {name}")
        if len(args) != len(d.params):
            raise SynthesisError(f"{name} takes {len(d.params)} arguments")
        return self._eval(d.body, dict(zip(d.params, args)), s, e)

    def plural_set(self, name: str, s: rt.IdSupply, e: int, args: Sequence):
        d = self.bundle.plural_sets.get(name)
        if d is None:
            d = PluralSetDef(name, name[:-2] + "P", len(args))
        return rt.st_values_p(e + 1, self.plural(d.plural, s, e + 1, args))

    def set_function(self, name: str, args: Sequence, strategy: str = "dfs",
                     max_values: int | None = None) -> Iterator[rt.ResultSet]:
        """Result sets of ``nameS`` over argument search trees, one per outer world."""
        d = self.bundle.set_functions.get(name)
        plural = d.plural if d else name[:-1] + "P"
        tree = self.plural(plural, rt.init_supply(), 1, args)
        return from_st_alternatives(tree, 1, strategy, max_values)

    def run(self, f: str, values: Sequence) -> list:
        """``fS`` on ground source values: the single result multiset."""
        tree = self.plural(f + "P", rt.init_supply(), 1, [ConvertOps.to_st(v) for v in values])
        return from_st(tree, 1)

    # IR interpretation

    def _lazy(self, ir, env, s, e):
        if isinstance(ir, IVar):
            return env[ir.name]
        if isinstance(ir, IInt):
            return rt.Val(ir.value)
        if isinstance(ir, IFail):
            return rt.Fail(e + ir.level.offset)
        return rt.Delay(lambda: self._eval(ir, env, s, e))

    def _eval(self, ir, env: dict, s: rt.IdSupply, e: int):
        if isinstance(ir, IVar):
            return env[ir.name]
        if isinstance(ir, IInt):
            return rt.Val(ir.value)
        if isinstance(ir, IVal):
            return rt.Val(rt.NdCon(ir.con, tuple(self._lazy(a, env, s, e) for a in ir.args)))
        if isinstance(ir, IFail):
            return rt.Fail(e + ir.level.offset)
        if isinstance(ir, IChoice):
            cid = rt.unique_id(ir.supply.resolve(s)) if self.use_ids else None
            return rt.Choice(cid, e + ir.level.offset, self._lazy(ir.left, env, s, e),
                             self._lazy(ir.right, env, s, e))
        if isinstance(ir, ICall):
            args = [self._lazy(a, env, s, e) for a in ir.args]
            return self.plural(ir.name, ir.supply.resolve(s), e + ir.level.offset, args)
        if isinstance(ir, ISetCall):
            args = [self._lazy(a, env, s, e) for a in ir.args]
            return self.plural_set(ir.name, ir.supply.resolve(s), e + ir.level.offset, args)
        if isinstance(ir, IMatch):
            alts = {con: (vs, body) for con, vs, body in ir.alts}

            def branch(h):
                if not isinstance(h, rt.NdCon):
                    raise SynthesisError("pattern match on an integer")
                vs, body = alts[h.name]
                return self._eval(body, {**env, **dict(zip(vs, h.children))}, s, e)

            return rt.apply_st(branch, self._eval(ir.scrut, env, s, e))
        if isinstance(ir, IPrim):
            a = self._eval(ir.left, env, s, e)
            b = self._lazy(ir.right, env, s, e)
            return rt.apply_st(lambda x: rt.apply_st(lambda y: _prim_val(ir.op, x, y), b), a)
        raise TypeError(ir)


# ---------------------------------------------------------------- outer arguments


def to_st_cell(heap, cell):
    """Suspension over an oracle heap cell, shared per cell.

    Forcing yields the head-normal form with suspended children, ``Fail 0``
    for an outer failure, or a level-0 choice over both residuals.
    """
    from .oracle import Failure, Split, force_hnf

    cache = heap.__dict__.setdefault("_st_cache", {})
    hit = cache.get(cell.serial)
    if hit is not None:
        return hit

    def compute():
        out = force_hnf(heap, cell)
        if isinstance(out, Failure):
            return rt.Fail(0)
        if isinstance(out, Split):
            return rt.Choice(out.id, 0, to_st_cell(heap, out.left), to_st_cell(heap, out.right))
        h = out.hnf
        if h.name is None:
            return rt.Val(h.value)
        return rt.Val(rt.NdCon(h.name, tuple(to_st_cell(heap, a) for a in h.args)))

    t = rt.Uneval(rt.Suspension(compute, f"cell{cell.serial}"))
    cache[cell.serial] = t
    return t
