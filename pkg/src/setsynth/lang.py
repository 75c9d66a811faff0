"""MiniFLP: a first-order functional-logic core language.

Grammar (one rule or declaration per logical line; a physical line that
starts with whitespace continues the previous one; ``--`` starts a comment)::

    decl    := 'data' Upper {tyvar} '=' condecl {'|' condecl}
             | lower {apat} '=' expr
    condecl := Upper {atype}
    atype   := Upper | lower | '(' type ')' | '[' type ']'
    apat    := lower | '_' | Upper | '[]' | int | '(' pat ')' | '[' pat {',' pat} ']'
    pat     := Upper {apat} | apat ':' pat | apat
    expr    := 'if' expr 'then' expr 'else' expr | choice
    choice  := cmp ['?' choice]                      -- lowest, right-assoc
    cmp     := cons [('=='|'/='|'<'|'<='|'>'|'>=') cons]
    cons    := add [':' cons]
    add     := mul {('+'|'-') mul}
    mul     := app {'*' app}
    app     := atom {atom}
    atom    := int | lower | Upper | 'failed' | '(' expr ')' | '[' [expr {',' expr}] ']'

``Bool`` (``False | True``) and lists (``[] | a : List a``) are predefined.
A name ``fS`` that is not itself defined denotes the set function of ``f``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Union

from .values import CONS, FALSE, NIL, TRUE

__all__ = [
    "Program", "DataDecl", "Constructor", "FuncDef", "Rule",
    "PVar", "PCon", "PLit", "Pattern",
    "Var", "Lit", "ConApp", "FunApp", "SetApp", "PluralApp", "Choice", "Failed", "IfThenElse", "Expr",
    "FrontendError", "ParseError", "NameResolutionError", "DuplicateDefinition", "UniformityError",
    "Diagnostic", "BUILTIN_OPS",
    "parse_program", "parse_expr", "pretty_program", "pretty_expr",
    "uniformize", "validate_uniform", "free_vars", "var_occurrences",
]


BUILTIN_OPS = {"+": 2, "-": 2, "*": 2, "==": 2, "/=": 2, "<": 2, "<=": 2, ">": 2, ">=": 2}
KEYWORDS = {"data", "if", "then", "else", "failed"}


# ---------------------------------------------------------------- errors


class FrontendError(Exception):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        loc = f"{line}:{col}: " if line is not None else ""
        super().__init__(loc + message)


class ParseError(FrontendError):
    pass


class NameResolutionError(FrontendError):
    pass


class DuplicateDefinition(FrontendError):
    pass


class UniformityError(FrontendError):
    pass


# ---------------------------------------------------------------- AST

Pos = Union[tuple, None]


@dataclass(frozen=True)
class Constructor:
    name: str
    arg_types: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.arg_types)


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: tuple
    constructors: tuple  # of Constructor
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PCon:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class PLit:
    value: int


Pattern = Union[PVar, PCon, PLit]


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lit:
    value: int
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ConApp:
    name: str
    args: tuple = ()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FunApp:
    name: str
    args: tuple = ()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SetApp:
    """Application of the set function of ``name``."""
    name: str
    args: tuple = ()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PluralApp:
    """Application of the plural function of ``name``; entry expressions only."""
    name: str
    args: tuple = ()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Choice:
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Failed:
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class IfThenElse:
    cond: "Expr"
    then: "Expr"
    else_: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


Expr = Union[Var, Lit, ConApp, FunApp, SetApp, PluralApp, Choice, Failed, IfThenElse]


@dataclass(frozen=True)
class Rule:
    patterns: tuple
    body: Expr
    pos: Pos = field(default=None, compare=False, repr=False)

    def pattern_vars(self) -> list[str]:
        out: list[str] = []
        for p in self.patterns:
            _collect_pvars(p, out)
        return out


@dataclass(frozen=True)
class FuncDef:
    name: str
    arity: int
    rules: tuple
    pos: Pos = field(default=None, compare=False, repr=False)


BOOL_DECL = DataDecl("Bool", (), (Constructor(FALSE), Constructor(TRUE)))
LIST_DECL = DataDecl("List", ("a",), (Constructor(NIL), Constructor(CONS, ("a", "(List a)"))))
BUILTIN_DATA = (BOOL_DECL, LIST_DECL)


@dataclass(frozen=True)
class Program:
    data_decls: tuple = ()
    func_defs: tuple = ()

    @property
    def all_data(self) -> tuple:
        return BUILTIN_DATA + tuple(self.data_decls)

    def constructor_table(self) -> dict[str, tuple[DataDecl, Constructor]]:
        return {c.name: (d, c) for d in self.all_data for c in d.constructors}

    def functions(self) -> dict[str, FuncDef]:
        return {f.name: f for f in self.func_defs}

    def function(self, name: str) -> FuncDef:
        for f in self.func_defs:
            if f.name == name:
                return f
        raise KeyError(name)

    def type_of_constructor(self, name: str) -> DataDecl:
        return self.constructor_table()[name][0]


def _collect_pvars(p: Pattern, out: list) -> None:
    if isinstance(p, PVar):
        out.append(p.name)
    elif isinstance(p, PCon):
        for a in p.args:
            _collect_pvars(a, out)


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t]+)"
    r"|(?P<int>\d+)"
    r"|(?P<lower>[a-z_][A-Za-z0-9_']*)"
    r"|(?P<upper>[A-Z][A-Za-z0-9_']*)"
    r"|(?P<sym>==|/=|<=|>=|->|[=|()\[\],?:+\-*<>])"
)


@dataclass(frozen=True)
class Tok:
    kind: str  # int | lower | upper | sym | kw | eol
    text: str
    line: int
    col: int


def _strip_comment(line: str) -> str:
    i = line.find("--")
    return line if i < 0 else line[:i]


def _tokenize_line(text: str, lineno: int, col0: int = 1) -> list[Tok]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", lineno, col0 + i)
        kind = m.lastgroup
        if kind != "ws":
            s = m.group()
            if kind == "lower" and s in KEYWORDS:
                kind = "kw"
            toks.append(Tok(kind, s, lineno, col0 + i))
        i = m.end()
    return toks


def _logical_lines(text: str) -> list[list[Tok]]:
    groups: list[list[Tok]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        toks = _tokenize_line(line, lineno)
        if line[0] in " \t" and groups:
            groups[-1].extend(toks)
        else:
            groups.append(toks)
    return groups


# ---------------------------------------------------------------- parser
# Raw expressions are resolved against the program's name tables afterwards.

@dataclass(frozen=True)
class _RawName:
    name: str
    upper: bool
    pos: tuple


@dataclass(frozen=True)
class _RawApp:
    head: object
    args: tuple
    pos: tuple


class _Parser:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.i = 0
        last = toks[-1] if toks else Tok("eol", "", 0, 0)
        self.eol = Tok("eol", "<end of line>", last.line, last.col + len(last.text))

    def peek(self, k: int = 0) -> Tok:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.eol

    def next(self) -> Tok:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("sym", "kw") and t.text == text

    def expect(self, text: str) -> Tok:
        t = self.next()
        if t.kind not in ("sym", "kw") or t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def fail(self, what: str):
        t = self.peek()
        raise ParseError(f"expected {what}, found {t.text!r}", t.line, t.col)

    def done(self) -> None:
        if self.i < len(self.toks):
            self.fail("end of line")

    # -- data declarations

    def data_decl(self) -> DataDecl:
        kw = self.expect("data")
        t = self.next()
        if t.kind != "upper":
            raise ParseError("expected type name", t.line, t.col)
        params = []
        while self.peek().kind == "lower":
            params.append(self.next().text)
        self.expect("=")
        cons = [self.condecl()]
        while self.at("|"):
            self.next()
            cons.append(self.condecl())
        self.done()
        return DataDecl(t.text, tuple(params), tuple(cons), pos=(kw.line, kw.col))

    def condecl(self) -> Constructor:
        t = self.next()
        if t.kind != "upper":
            raise ParseError("expected constructor name", t.line, t.col)
        args = []
        while self.peek().kind in ("upper", "lower") or self.at("(") or self.at("["):
            args.append(self.atype())
        return Constructor(t.text, tuple(args))

    def atype(self) -> str:
        t = self.next()
        if t.kind in ("upper", "lower"):
            return t.text
        if t.text == "(":
            inner = self.type_()
            self.expect(")")
            return f"({inner})"
        if t.text == "[":
            inner = self.type_()
            self.expect("]")
            return f"[{inner}]"
        raise ParseError("expected a type", t.line, t.col)

    def type_(self) -> str:
        parts = [self.atype()]
        while self.peek().kind in ("upper", "lower") or self.at("(") or self.at("["):
            parts.append(self.atype())
        if self.at("->"):
            t = self.peek()
            raise ParseError("function types are not supported (first-order language)", t.line, t.col)
        return " ".join(parts)

    # -- rules

    def rule_lhs(self) -> tuple[Tok, list]:
        name = self.next()
        if name.kind != "lower":
            raise ParseError("expected a function name or 'data'", name.line, name.col)
        pats = []
        while not self.at("="):
            if self.peek().kind == "eol":
                self.fail("'='")
            pats.append(self.apat())
        self.expect("=")
        return name, pats

    def apat(self) -> Pattern:
        t = self.next()
        if t.kind == "lower":
            return PVar(t.text)
        if t.kind == "upper":
            return PCon(t.text)
        if t.kind == "int":
            return PLit(int(t.text))
        if t.text == "(":
            p = self.pat()
            self.expect(")")
            return p
        if t.text == "[":
            if self.at("]"):
                self.next()
                return PCon(NIL)
            items = [self.pat()]
            while self.at(","):
                self.next()
                items.append(self.pat())
            self.expect("]")
            out: Pattern = PCon(NIL)
            for p in reversed(items):
                out = PCon(CONS, (p, out))
            return out
        raise ParseError(f"unexpected {t.text!r} in pattern", t.line, t.col)

    def pat(self) -> Pattern:
        if self.peek().kind == "upper":
            t = self.next()
            args = []
            while self._starts_apat():
                args.append(self.apat())
            p: Pattern = PCon(t.text, tuple(args))
        else:
            p = self.apat()
        if self.at(":"):
            self.next()
            return PCon(CONS, (p, self.pat()))
        return p

    def _starts_apat(self) -> bool:
        t = self.peek()
        return t.kind in ("lower", "upper", "int") or (t.kind == "sym" and t.text in ("(", "["))

    # -- expressions

    def expr(self):
        if self.at("if"):
            return self.if_expr()
        return self.choice()

    def if_expr(self):
        t = self.expect("if")
        c = self.expr()
        self.expect("then")
        a = self.expr()
        self.expect("else")
        b = self.expr()
        return IfThenElse(c, a, b, pos=(t.line, t.col))

    def choice(self):
        left = self.cmp()
        if self.at("?"):
            t = self.next()
            right = self.expr()
            return Choice(left, right, pos=(t.line, t.col))
        return left

    def cmp(self):
        left = self.cons()
        t = self.peek()
        if t.kind == "sym" and t.text in ("==", "/=", "<", "<=", ">", ">="):
            self.next()
            right = self.cons()
            return _RawApp(_RawName(t.text, False, (t.line, t.col)), (left, right), (t.line, t.col))
        return left

    def cons(self):
        left = self.add()
        if self.at(":"):
            t = self.next()
            right = self.cons()
            return ConApp(CONS, (left, right), pos=(t.line, t.col))
        return left

    def add(self):
        left = self.mul()
        while self.at("+") or self.at("-"):
            t = self.next()
            right = self.mul()
            left = _RawApp(_RawName(t.text, False, (t.line, t.col)), (left, right), (t.line, t.col))
        return left

    def mul(self):
        left = self.app()
        while self.at("*"):
            t = self.next()
            right = self.app()
            left = _RawApp(_RawName(t.text, False, (t.line, t.col)), (left, right), (t.line, t.col))
        return left

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("int", "lower", "upper"):
            return True
        if t.kind == "kw":
            return t.text in ("failed", "if")
        return t.kind == "sym" and t.text in ("(", "[")

    def app(self):
        head = self.atom()
        args = []
        while self._starts_atom():
            if self.at("if"):
                args.append(self.if_expr())
                break
            args.append(self.atom())
        if not args:
            return head
        return _RawApp(head, tuple(args), getattr(head, "pos", None))

    def atom(self):
        t = self.next()
        pos = (t.line, t.col)
        if t.kind == "int":
            return Lit(int(t.text), pos=pos)
        if t.kind in ("lower", "upper"):
            return _RawName(t.text, t.kind == "upper", pos)
        if t.kind == "kw" and t.text == "failed":
            return Failed(pos=pos)
        if t.kind == "kw" and t.text == "if":
            self.i -= 1
            return self.if_expr()
        if t.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.text == "[":
            if self.at("]"):
                self.next()
                return ConApp(NIL, (), pos=pos)
            items = [self.expr()]
            while self.at(","):
                self.next()
                items.append(self.expr())
            self.expect("]")
            out = ConApp(NIL, (), pos=pos)
            for it in reversed(items):
                out = ConApp(CONS, (it, out), pos=pos)
            return out
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col)


class _Resolver:
    def __init__(self, constructors: dict[str, int], functions: dict[str, int], allow_plural: bool = False):
        self.constructors = constructors
        self.functions = functions
        self.allow_plural = allow_plural

    def resolve(self, raw, scope: set[str]) -> Expr:
        if isinstance(raw, _RawName):
            return self._apply(raw, (), raw.pos, scope)
        if isinstance(raw, _RawApp):
            if not isinstance(raw.head, _RawName):
                line, col = raw.pos or (None, None)
                raise FrontendError("higher-order application is not supported", line, col)
            return self._apply(raw.head, raw.args, raw.pos, scope)
        if isinstance(raw, (Lit, Failed)):
            return raw
        if isinstance(raw, Choice):
            return Choice(self.resolve(raw.left, scope), self.resolve(raw.right, scope), pos=raw.pos)
        if isinstance(raw, IfThenElse):
            return IfThenElse(self.resolve(raw.cond, scope), self.resolve(raw.then, scope),
                              self.resolve(raw.else_, scope), pos=raw.pos)
        if isinstance(raw, ConApp):
            args = tuple(self.resolve(a, scope) for a in raw.args)
            return ConApp(raw.name, args, pos=raw.pos)
        raise TypeError(raw)

    def _apply(self, head: _RawName, raw_args: tuple, pos, scope: set[str]) -> Expr:
        name = head.name
        line, col = head.pos
        args = tuple(self.resolve(a, scope) for a in raw_args)
        if head.upper:
            if name not in self.constructors:
                raise NameResolutionError(f"unknown constructor {name!r}", line, col)
            self._arity(name, self.constructors[name], len(args), line, col)
            return ConApp(name, args, pos=head.pos)
        if name in BUILTIN_OPS:
            return FunApp(name, args, pos=head.pos)
        if name in scope:
            if args:
                raise FrontendError(f"higher-order application of variable {name!r} is not supported", line, col)
            return Var(name, pos=head.pos)
        if name in self.functions:
            self._arity(name, self.functions[name], len(args), line, col)
            return FunApp(name, args, pos=head.pos)
        base = name[:-1]
        if name.endswith("S") and base in self.functions:
            self._arity(name, self.functions[base], len(args), line, col)
            return SetApp(base, args, pos=head.pos)
        if self.allow_plural and name.endswith("P") and base in self.functions:
            self._arity(name, self.functions[base], len(args), line, col)
            return PluralApp(base, args, pos=head.pos)
        raise NameResolutionError(f"unknown identifier {name!r}", line, col)

    @staticmethod
    def _arity(name, expected, got, line, col):
        if got < expected:
            raise FrontendError(f"partial application of {name!r} ({got} of {expected} arguments) is not supported", line, col)
        if got > expected:
            raise FrontendError(f"{name!r} applied to {got} arguments but takes {expected}", line, col)


def _check_pattern(p: Pattern, constructors: dict[str, int], pos) -> None:
    if isinstance(p, PCon):
        if p.name not in constructors:
            raise NameResolutionError(f"unknown constructor {p.name!r} in pattern", *pos)
        if constructors[p.name] != len(p.args):
            raise FrontendError(f"constructor {p.name!r} in pattern expects {constructors[p.name]} arguments", *pos)
        for a in p.args:
            _check_pattern(a, constructors, pos)


def parse_program(text: str) -> Program:
    """Parse and name-resolve MiniFLP source text."""
    data: list[DataDecl] = []
    raw_rules: list[tuple[Tok, list, object]] = []
    for toks in _logical_lines(text):
        p = _Parser(toks)
        if p.at("data"):
            data.append(p.data_decl())
        else:
            name, pats = p.rule_lhs()
            body = p.expr()
            p.done()
            raw_rules.append((name, pats, body))

    constructors: dict[str, int] = {}
    seen_types = {d.name for d in BUILTIN_DATA}
    for d in BUILTIN_DATA:
        for c in d.constructors:
            constructors[c.name] = c.arity
    for d in data:
        if d.name in seen_types:
            raise DuplicateDefinition(f"type {d.name!r} defined twice", *d.pos)
        seen_types.add(d.name)
        for c in d.constructors:
            if c.name in constructors:
                raise DuplicateDefinition(f"constructor {c.name!r} defined twice", *d.pos)
            constructors[c.name] = c.arity

    # group rules; a function's rules must be contiguous
    groups: list[tuple[Tok, list]] = []
    arities: dict[str, int] = {}
    for name, pats, body in raw_rules:
        if groups and groups[-1][0].text == name.text:
            if len(pats) != arities[name.text]:
                raise FrontendError(f"rules for {name.text!r} have different numbers of arguments", name.line, name.col)
            groups[-1][1].append((name, pats, body))
            continue
        if name.text in arities:
            raise DuplicateDefinition(f"function {name.text!r} defined twice (rules must be contiguous)", name.line, name.col)
        arities[name.text] = len(pats)
        groups.append((name, [(name, pats, body)]))

    resolver = _Resolver(constructors, arities)
    funcs = []
    for name, rules in groups:
        out_rules = []
        for tok, pats, body in rules:
            pats = _fresh_wildcards(pats)
            for pt in pats:
                _check_pattern(pt, constructors, (tok.line, tok.col))
            rule = Rule(tuple(pats), None, pos=(tok.line, tok.col))
            scope = set(rule.pattern_vars())
            out_rules.append(replace(rule, body=resolver.resolve(body, scope)))
        funcs.append(FuncDef(name.text, arities[name.text], tuple(out_rules), pos=(name.line, name.col)))
    return Program(tuple(data), tuple(funcs))


def _fresh_wildcards(pats: list) -> list:
    used = []
    for p in pats:
        _collect_pvars(p, used)
    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            n = f"_w{counter[0]}"
            if n not in used:
                return n

    def walk(p):
        if isinstance(p, PVar) and p.name == "_":
            return PVar(fresh())
        if isinstance(p, PCon):
            return PCon(p.name, tuple(walk(a) for a in p.args))
        return p

    return [walk(p) for p in pats]


def parse_expr(text: str, program: Program, allow_plural: bool = True) -> Expr:
    """Parse a closed expression (e.g. a CLI entry) against ``program``'s names."""
    toks = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        toks.extend(_tokenize_line(_strip_comment(line), lineno))
    p = _Parser(toks)
    if not toks:
        raise ParseError("empty expression", 1, 1)
    raw = p.expr()
    p.done()
    constructors = {c.name: c.arity for d in program.all_data for c in d.constructors}
    functions = {f.name: f.arity for f in program.func_defs}
    return _Resolver(constructors, functions, allow_plural).resolve(raw, set())


# ---------------------------------------------------------------- pretty printer

_CMP = {"==", "/=", "<", "<=", ">", ">="}


def _paren(s: str, cond: bool) -> str:
    return f"({s})" if cond else s


def pretty_expr(e: Expr, prec: int = 0) -> str:
    """Source text for ``e``; ``prec`` is the binding context (0 loosest, 6 atom)."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return _paren(str(e.value), e.value < 0)
    if isinstance(e, Failed):
        return "failed"
    if isinstance(e, Choice):
        return _paren(f"{pretty_expr(e.left, 1)} ? {pretty_expr(e.right, 0)}", prec > 0)
    if isinstance(e, IfThenElse):
        s = f"if {pretty_expr(e.cond)} then {pretty_expr(e.then)} else {pretty_expr(e.else_)}"
        return _paren(s, prec > 0)
    if isinstance(e, ConApp) and e.name == CONS:
        return _paren(f"{pretty_expr(e.args[0], 3)} : {pretty_expr(e.args[1], 2)}", prec > 2)
    if isinstance(e, FunApp) and e.name in BUILTIN_OPS:
        a, b = e.args
        if e.name in _CMP:
            return _paren(f"{pretty_expr(a, 2)} {e.name} {pretty_expr(b, 2)}", prec > 1)
        if e.name == "*":
            return _paren(f"{pretty_expr(a, 4)} * {pretty_expr(b, 5)}", prec > 4)
        return _paren(f"{pretty_expr(a, 3)} {e.name} {pretty_expr(b, 4)}", prec > 3)
    suffix = {SetApp: "S", PluralApp: "P"}.get(type(e), "")
    head = e.name + suffix
    if not e.args:
        return head
    return _paren(head + " " + " ".join(pretty_expr(a, 6) for a in e.args), prec > 5)


def pretty_pattern(p: Pattern, nested: bool = True) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PLit):
        return str(p.value)
    if p.name == CONS:
        return f"({pretty_pattern(p.args[0])} : {pretty_pattern(p.args[1], False)})"
    if not p.args:
        return p.name
    s = p.name + " " + " ".join(pretty_pattern(a) for a in p.args)
    return f"({s})" if nested else s


def pretty_program(p: Program) -> str:
    lines = []
    for d in p.data_decls:
        head = " ".join(("data", d.name) + tuple(d.params))
        cons = " | ".join(" ".join((c.name,) + tuple(c.arg_types)) for c in d.constructors)
        lines.append(f"{head} = {cons}")
    for f in p.func_defs:
        for r in f.rules:
            lhs = " ".join([f.name] + [pretty_pattern(pt) for pt in r.patterns])
            lines.append(f"{lhs} = {pretty_expr(r.body)}")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------- uniform form


@dataclass(frozen=True)
class Diagnostic:
    function: str
    rule: int | None
    message: str

    def __str__(self) -> str:
        where = self.function if self.rule is None else f"{self.function} (rule {self.rule + 1})"
        return f"{where}: {self.message}"


def _match_positions(rule: Rule) -> list[int]:
    return [i for i, p in enumerate(rule.patterns) if not isinstance(p, PVar)]


def _rule_problems(f: FuncDef, idx: int, rule: Rule) -> list[Diagnostic]:
    out = []
    names = rule.pattern_vars()
    dups = sorted({n for n in names if names.count(n) > 1})
    if dups:
        out.append(Diagnostic(f.name, idx, f"non-linear left-hand side (repeated {', '.join(dups)})"))
    for p in rule.patterns:
        if isinstance(p, PLit):
            out.append(Diagnostic(f.name, idx, "literal patterns are not supported; use if-then-else"))
        elif isinstance(p, PCon) and any(not isinstance(a, PVar) for a in p.args):
            out.append(Diagnostic(f.name, idx, "nested patterns are not supported"))
    if len(_match_positions(rule)) > 1:
        out.append(Diagnostic(f.name, idx, "patterns on more than one argument position"))
    return out


def validate_uniform(p: Program) -> list[Diagnostic]:
    """Every way in which ``p`` departs from uniform form; empty iff uniform."""
    diags: list[Diagnostic] = []
    ctab = p.constructor_table()
    for f in p.func_defs:
        local = []
        for i, r in enumerate(f.rules):
            local.extend(_rule_problems(f, i, r))
        diags.extend(local)
        if local:
            continue
        positions = {pos for r in f.rules for pos in _match_positions(r)}
        var_rules = [i for i, r in enumerate(f.rules) if not _match_positions(r)]
        if len(positions) > 1:
            diags.append(Diagnostic(f.name, None, f"rules match on different argument positions {sorted(positions)}"))
            continue
        if not positions:
            if len(var_rules) > 1:
                diags.append(Diagnostic(f.name, var_rules[1], "several variable-only rules (overlapping)"))
            continue
        if var_rules:
            diags.append(Diagnostic(f.name, var_rules[0], "variable-only rule overlaps constructor rules"))
            continue
        (k,) = positions
        seen: dict[str, int] = {}
        types = set()
        for i, r in enumerate(f.rules):
            c = r.patterns[k].name
            types.add(ctab[c][0].name)
            if c in seen:
                diags.append(Diagnostic(f.name, i, f"second rule for constructor {c}"))
            seen.setdefault(c, i)
        if len(types) > 1:
            diags.append(Diagnostic(f.name, None, f"constructors of different types {sorted(types)}"))
            continue
        decl = ctab[f.rules[0].patterns[k].name][0]
        missing = [c.name for c in decl.constructors if c.name not in seen]
        if missing:
            diags.append(Diagnostic(f.name, None, f"no rule for constructor(s) {', '.join(missing)}"))
    return diags


def free_vars(e: Expr) -> set[str]:
    return set(var_occurrences(e))


def var_occurrences(e: Expr) -> list[str]:
    """Variable names in ``e``, one entry per syntactic occurrence."""
    out: list[str] = []

    def walk(x):
        if isinstance(x, Var):
            out.append(x.name)
        elif isinstance(x, (ConApp, FunApp, SetApp, PluralApp)):
            for a in x.args:
                walk(a)
        elif isinstance(x, Choice):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, IfThenElse):
            walk(x.cond)
            walk(x.then)
            walk(x.else_)

    walk(e)
    return out


def substitute(e: Expr, sub: dict) -> Expr:
    if isinstance(e, Var):
        return sub.get(e.name, e)
    if isinstance(e, (ConApp, FunApp, SetApp, PluralApp)):
        return replace(e, args=tuple(substitute(a, sub) for a in e.args))
    if isinstance(e, Choice):
        return replace(e, left=substitute(e.left, sub), right=substitute(e.right, sub))
    if isinstance(e, IfThenElse):
        return replace(e, cond=substitute(e.cond, sub), then=substitute(e.then, sub),
                       else_=substitute(e.else_, sub))
    return e


def _choice_chain(bodies: list[Expr]) -> Expr:
    out = bodies[-1]
    for b in reversed(bodies[:-1]):
        out = Choice(b, out)
    return out


class _Names:
    def __init__(self, reserved: Iterable[str]):
        self.used = set(reserved)

    def take(self, preferred: str | None) -> str:
        if preferred and not preferred.startswith("_w") and preferred not in self.used:
            self.used.add(preferred)
            return preferred
        i = 1
        while f"x{i}" in self.used:
            i += 1
        self.used.add(f"x{i}")
        return f"x{i}"


def _uniformize_function(f: FuncDef, p: Program, reserved: set[str]) -> FuncDef:
    for i, r in enumerate(f.rules):
        probs = _rule_problems(f, i, r)
        if probs:
            raise UniformityError(str(probs[0]), *(r.pos or (None, None)))
    positions = {pos for r in f.rules for pos in _match_positions(r)}
    if len(positions) > 1:
        raise UniformityError(f"{f.name}: rules match on different argument positions {sorted(positions)}", *(f.pos or (None, None)))
    ctab = p.constructor_table()

    if not positions:
        if len(f.rules) == 1:
            return f
        names = _Names(reserved)
        params = [names.take(f.rules[0].patterns[i].name) for i in range(f.arity)]
        bodies = []
        for r in f.rules:
            sub = {pt.name: Var(params[i]) for i, pt in enumerate(r.patterns)}
            bodies.append(substitute(r.body, sub))
        return replace(f, rules=(Rule(tuple(PVar(x) for x in params), _choice_chain(bodies), pos=f.rules[0].pos),))

    (k,) = positions
    con_rules = [r for r in f.rules if _match_positions(r)]
    types = {ctab[r.patterns[k].name][0].name for r in con_rules}
    if len(types) > 1:
        raise UniformityError(f"{f.name}: constructors of different types {sorted(types)}", *(f.pos or (None, None)))
    decl = ctab[con_rules[0].patterns[k].name][0]
    if not validate_uniform(Program(p.data_decls, (f,))):
        return f

    names = _Names(reserved)
    first = f.rules[0]
    params = [names.take(first.patterns[i].name if isinstance(first.patterns[i], PVar) else None)
              if i != k else None for i in range(f.arity)]
    new_rules = []
    for c in decl.constructors:
        contributing = [r for r in f.rules if not isinstance(r.patterns[k], PCon) or r.patterns[k].name == c.name]
        sample = next((r for r in contributing if isinstance(r.patterns[k], PCon)), None)
        local = _Names(names.used)
        subs = [local.take(sample.patterns[k].args[j].name if sample else None) for j in range(c.arity)]
        pats = tuple(PCon(c.name, tuple(PVar(x) for x in subs)) if i == k else PVar(params[i]) for i in range(f.arity))
        bodies = []
        for r in contributing:
            sub = {pt.name: Var(params[i]) for i, pt in enumerate(r.patterns) if i != k}
            pk = r.patterns[k]
            if isinstance(pk, PCon):
                sub.update({a.name: Var(subs[j]) for j, a in enumerate(pk.args)})
            else:
                sub[pk.name] = ConApp(c.name, tuple(Var(x) for x in subs))
            bodies.append(substitute(r.body, sub))
        body = _choice_chain(bodies) if bodies else Failed()
        new_rules.append(Rule(pats, body, pos=sample.pos if sample else f.pos))
    return replace(f, rules=tuple(new_rules))


def uniformize(p: Program) -> Program:
    """Rewrite every function into uniform form.

    Missing constructor cases fail; overlapping rules are merged with ``?`` in
    textual order.  A variable-only rule that overlaps constructor rules is
    merged into every constructor case with the variable bound to the
    rebuilt constructor term.
    """
    reserved = {f.name for f in p.func_defs}
    return replace(p, func_defs=tuple(_uniformize_function(f, p, reserved) for f in p.func_defs))
