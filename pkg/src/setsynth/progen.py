"""Random well-typed MiniFLP programs for property tests.

Programs use the types Int, Bool and [Int].  Functions are generated in
order; a body may call earlier functions, their set functions (Int-valued
only, giving [Int]) and itself on the tail of a matched list, so every
generated program terminates on finite arguments.  Every function is
already uniform (one variable rule, or a case on one argument with at most
one rule per constructor), which keeps the source and the uniformized
program equivalent also on failing arguments.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .lang import Program, parse_program

INT, BOOL, LIST = "Int", "Bool", "[Int]"
TYPES = (INT, BOOL, LIST)


@dataclass
class GenConfig:
    max_functions: int = 3
    max_params: int = 2
    max_choices: int = 3
    max_depth: int = 3
    p_failed: float = 0.08
    allow_set_calls: bool = True
    right_linear: bool = False


@dataclass
class FunSig:
    name: str
    params: tuple
    result: str


@dataclass
class GenProgram:
    source: str
    program: Program
    sigs: list
    choices: int

    @property
    def target(self) -> FunSig:
        return self.sigs[-1]


def gen_value(rng: random.Random, ty: str, depth: int = 3) -> str:
    """Source text of a ground value of type ``ty``."""
    if ty == INT:
        return str(rng.randint(0, 3))
    if ty == BOOL:
        return rng.choice(["True", "False"])
    n = rng.randint(0, min(depth, 3))
    return "[" + ",".join(str(rng.randint(0, 3)) for _ in range(n)) + "]"


def gen_arg(rng: random.Random, ty: str, ground_only: bool = False, depth: int = 3) -> str:
    """A ground argument, or (unless ``ground_only``) a failing or non-deterministic one.

    ``depth`` bounds list lengths, so a list argument has at most ``depth + 1``
    nested constructors.
    """
    r = rng.random()
    if ground_only or r < 0.6:
        return gen_value(rng, ty, depth)
    if r < 0.7:
        return "failed"
    if r < 0.9:
        return f"({gen_value(rng, ty, depth)} ? {gen_value(rng, ty, depth)})"
    if ty == LIST:
        elems = [rng.choice(["0", "1", "2", "failed", "(0 ? 1)"]) for _ in range(rng.randint(1, max(depth, 1)))]
        return "[" + ",".join(elems) + "]"
    return f"({gen_value(rng, ty)} ? failed)"


class _BodyGen:
    def __init__(self, rng: random.Random, cfg: GenConfig, sigs: list, me: FunSig, budget: list):
        self.rng = rng
        self.cfg = cfg
        self.sigs = sigs
        self.me = me
        self.budget = budget  # remaining choices, shared across the program
        self.used: set = set()
        self.rec_arg: tuple | None = None  # (position, tail variable) for structural recursion
        self.in_rec = False  # no recursive call inside the arguments of another one

    def expr(self, ty: str, env: dict, depth: int) -> str:
        rng = self.rng
        opts = []
        vars_ = [v for v, t in env.items() if t == ty and not (self.cfg.right_linear and v in self.used)]
        if vars_:
            opts += ["var"] * 3
        if depth < self.cfg.max_depth or not (vars_ or self.sigs or self.rec_arg):
            opts.append("lit")
        if depth > 0:
            if self.budget[0] > 0:
                opts += ["choice"] * 2
            if [s for s in self.sigs if s.result == ty]:
                opts += ["call"] * 3
            if self.rec_arg is not None and self.me.result == ty and not self.in_rec:
                opts += ["rec"] * 2
            if ty == INT:
                opts += ["plus"]
            if ty == BOOL:
                opts += ["cmp"]
            if ty == LIST:
                opts += ["cons"] * 2
                if self.cfg.allow_set_calls and [s for s in self.sigs if s.result == INT]:
                    opts += ["set"] * 2
            opts.append("if")
        kind = rng.choice(opts)
        if rng.random() < self.cfg.p_failed:
            kind = "failed"
        if kind == "var":
            v = rng.choice(vars_)
            self.used.add(v)
            return v
        if kind == "lit":
            return gen_value(rng, ty, 2)
        if kind == "failed":
            return "failed"
        d = depth - 1
        if kind == "choice":
            self.budget[0] -= 1
            return f"({self.expr(ty, env, d)} ? {self.expr(ty, env, d)})"
        if kind == "plus":
            return f"({self.expr(INT, env, d)} + {self.expr(INT, env, d)})"
        if kind == "cmp":
            op = rng.choice(["==", "<"])
            return f"({self.expr(INT, env, d)} {op} {self.expr(INT, env, d)})"
        if kind == "cons":
            return f"({self.expr(INT, env, d)} : {self.expr(LIST, env, d)})"
        if kind == "if":
            return f"(if {self.expr(BOOL, env, d)} then {self.expr(ty, env, d)} else {self.expr(ty, env, d)})"
        if kind == "call":
            g = rng.choice([s for s in self.sigs if s.result == ty])
            return self._app(g.name, g.params, env, d)
        if kind == "set":
            g = rng.choice([s for s in self.sigs if s.result == INT])
            return self._app(g.name + "S", g.params, env, d)
        pos, tail = self.rec_arg
        args = []
        self.in_rec = True
        for i, t in enumerate(self.me.params):
            if i == pos and not (self.cfg.right_linear and tail in self.used):
                self.used.add(tail)
                args.append(tail)
            elif i == pos:
                args.append("[]")
            else:
                args.append(self.expr(t, env, min(d, 1)))
        self.in_rec = False
        return "(" + " ".join([self.me.name] + args) + ")" if args else self.me.name

    def _app(self, name: str, params: tuple, env: dict, depth: int) -> str:
        if not params:
            return name
        return "(" + " ".join([name] + [self.expr(t, env, depth) for t in params]) + ")"


def gen_program(rng: random.Random, cfg: GenConfig = GenConfig()) -> GenProgram:
    sigs: list[FunSig] = []
    lines: list[str] = []
    budget = [cfg.max_choices]
    n_funs = rng.randint(1, cfg.max_functions)
    for k in range(n_funs):
        name = f"f{k}"
        params = tuple(rng.choice(TYPES) for _ in range(rng.randint(0 if k < n_funs - 1 else 1, cfg.max_params)))
        sig = FunSig(name, params, rng.choice(TYPES))
        pnames = [f"a{i}" for i in range(len(params))]
        match_pos = [i for i, t in enumerate(params) if t in (LIST, BOOL)]
        if match_pos and rng.random() < 0.6:
            pos = rng.choice(match_pos)
            ty = params[pos]
            cases = [("[]", {}), ("(y : ys)", {"y": INT, "ys": LIST})] if ty == LIST \
                else [("False", {}), ("True", {})]
            if rng.random() < 0.25:
                cases = [rng.choice(cases)]
            for pat, extra in cases:
                gen = _BodyGen(rng, cfg, sigs, sig, budget)
                env = {p: t for i, (p, t) in enumerate(zip(pnames, params)) if i != pos}
                env.update(extra)
                if "ys" in extra:
                    gen.rec_arg = (pos, "ys")
                lhs = [pat if i == pos else p for i, p in enumerate(pnames)]
                lines.append(f"{name} {' '.join(lhs)} = {gen.expr(sig.result, env, cfg.max_depth)}")
        else:
            gen = _BodyGen(rng, cfg, sigs, sig, budget)
            env = dict(zip(pnames, params))
            lhs = " ".join([name] + pnames)
            lines.append(f"{lhs} = {gen.expr(sig.result, env, cfg.max_depth)}")
        sigs.append(sig)
    source = "\n".join(lines) + "\n"
    return GenProgram(source, parse_program(source), sigs, cfg.max_choices - budget[0])


def unary_functions(gp: GenProgram) -> list[FunSig]:
    return [s for s in gp.sigs if len(s.params) == 1]
