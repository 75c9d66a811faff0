"""Search trees and the operations the synthesized code runs on.

A search tree is one of ``Val`` (a head-normal form), ``Uneval`` (an
outer-level suspension), ``Fail(level)`` or ``Choice(id, level, l, r)``.
Children may be :class:`Delay` thunks; every consumer goes through
:func:`whnf` first, so trees can be infinite.

Levels: 0 is outside any set function; a set function running at level
``e`` owns the failures and choices tagged ``e``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Union

__all__ = [
    "ChoiceId", "fresh_id", "IdSupply", "init_supply", "unique_id", "left_supply", "right_supply",
    "Decision", "LEFT", "RIGHT", "DecisionMap",
    "NdCon", "Val", "Uneval", "Fail", "Choice", "Delay", "SearchTree", "Suspension", "whnf",
    "apply_st", "nf_st", "nf_con", "generic_nf", "search_dfs", "search_bfs", "iter_dfs", "iter_bfs",
    "st_values", "st_values_p", "iter_result_sets", "ResultSet", "nd_list", "nd_list_items",
    "force_tree", "dump_tree",
]


# ---------------------------------------------------------------- identifiers


@dataclass(frozen=True)
class ChoiceId:
    space: str
    key: object

    def __repr__(self) -> str:
        k = ".".join(map(str, self.key)) if isinstance(self.key, tuple) else self.key
        return f"#{self.space}{k}"


_fresh = itertools.count(1)


def fresh_id(space: str = "f") -> ChoiceId:
    return ChoiceId(space, next(_fresh))


@dataclass(frozen=True)
class IdSupply:
    """A node of the infinite binary tree of identifiers (heap numbering).

    ``unique_id`` names the node itself; the two sub-supplies are the
    disjoint subtrees below it.
    """
    path: int = 1

    def __repr__(self) -> str:
        return f"IdSupply({self.path:b})"


def init_supply() -> IdSupply:
    return IdSupply(1)


def unique_id(s: IdSupply) -> ChoiceId:
    return ChoiceId("s", s.path)


def left_supply(s: IdSupply) -> IdSupply:
    return IdSupply(2 * s.path)


def right_supply(s: IdSupply) -> IdSupply:
    return IdSupply(2 * s.path + 1)


class Decision(Enum):
    LEFT = "L"
    RIGHT = "R"


LEFT = Decision.LEFT
RIGHT = Decision.RIGHT


class DecisionMap:
    """Persistent map from choice ids to decisions."""
    __slots__ = ("_d",)

    def __init__(self, items=()):
        self._d = dict(items)

    def get(self, cid: ChoiceId):
        return self._d.get(cid)

    def extend(self, cid: ChoiceId, d: Decision) -> "DecisionMap":
        if cid in self._d:
            raise ValueError(f"{cid} already decided")
        out = DecisionMap()
        out._d = {**self._d, cid: d}
        return out

    def __contains__(self, cid) -> bool:
        return cid in self._d

    def __len__(self) -> int:
        return len(self._d)

    def items(self):
        return self._d.items()

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}:{v.value}" for k, v in self._d.items()) + "}"


def _as_map(m) -> DecisionMap:
    if m is None:
        return DecisionMap()
    if isinstance(m, DecisionMap):
        return m
    return DecisionMap(m)


# ---------------------------------------------------------------- trees


@dataclass(frozen=True)
class NdCon:
    """Head-normal form of a non-deterministic data value: constructor plus search-tree children."""
    name: str
    children: tuple = ()


HNF = Union[int, NdCon]


class SearchTree:
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Val(SearchTree):
    value: object


@dataclass(frozen=True, eq=False)
class Uneval(SearchTree):
    susp: "Suspension"


@dataclass(frozen=True)
class Fail(SearchTree):
    level: int = 0


@dataclass(frozen=True)
class Choice(SearchTree):
    id: object  # ChoiceId, or None for an anonymous choice that is never memoized
    level: int
    left: object
    right: object


_UNSET = object()


class Delay(SearchTree):
    """A memoized thunk producing a search tree."""
    __slots__ = ("_fn", "_val")

    def __init__(self, fn: Callable[[], object]):
        self._fn = fn
        self._val = _UNSET

    def force(self):
        if self._val is _UNSET:
            fn, self._fn = self._fn, None
            self._val = fn()
        return self._val

    def __eq__(self, other):
        return whnf(self) == whnf(other)

    __hash__ = None

    def __repr__(self) -> str:
        if self._val is _UNSET:
            return "Delay(<unforced>)"
        return repr(self._val)


def whnf(t):
    """Strip :class:`Delay` wrappers."""
    while isinstance(t, Delay):
        t = t.force()
    return t


def _delay(fn) -> Delay:
    return Delay(fn)


class Suspension:
    """An outer-level computation, forced at most once.

    ``compute`` returns ``Val(hnf)``, ``Fail(0)`` for an outer failure, or a
    ``Choice`` at level 0 whose children are further ``Uneval`` nodes when the
    outer computation is non-deterministic.
    """
    __slots__ = ("_compute", "_tree", "label")

    def __init__(self, compute: Callable[[], SearchTree], label: str = "?"):
        self._compute = compute
        self._tree = _UNSET
        self.label = label

    @classmethod
    def of(cls, tree: SearchTree, label: str = "const") -> "Suspension":
        s = cls(lambda: tree, label)
        return s

    @property
    def forced(self) -> bool:
        return self._tree is not _UNSET

    def force(self) -> SearchTree:
        if self._tree is _UNSET:
            compute, self._compute = self._compute, None
            self._tree = compute()
        return self._tree

    def __repr__(self) -> str:
        return f"<susp {self.label}>"


# ---------------------------------------------------------------- pull-tabbing


def apply_st(f: Callable[[HNF], object], t, outer_level: int = 0):
    """Apply ``f`` to every head-normal form in ``t``; choices are pulled up.

    Forcing an ``Uneval`` argument that fails outside yields ``Fail(outer_level)``.
    """
    t = whnf(t)
    if isinstance(t, Val):
        return f(t.value)
    if isinstance(t, Fail):
        return t
    if isinstance(t, Choice):
        l, r = t.left, t.right
        return Choice(t.id, t.level, _delay(lambda: apply_st(f, l, outer_level)),
                      _delay(lambda: apply_st(f, r, outer_level)))
    if isinstance(t, Uneval):
        forced = whnf(t.susp.force())
        if isinstance(forced, Fail):
            return Fail(outer_level)
        return apply_st(f, forced, outer_level)
    raise TypeError(f"not a search tree: {t!r}")


def generic_nf(x: HNF):
    """Normal form of a head-normal form of any type (ints and ND constructors)."""
    if isinstance(x, NdCon):
        return nf_con(x, generic_nf)
    return Val(x)


def nf_st(t, nf_hnf: Callable[[HNF], object] = generic_nf):
    """Normalize every value in ``t``; choices and failures inside values move to the root."""
    t = whnf(t)
    if isinstance(t, Val):
        return nf_hnf(t.value)
    if isinstance(t, Fail):
        return t
    if isinstance(t, Choice):
        l, r = t.left, t.right
        return Choice(t.id, t.level, _delay(lambda: nf_st(l, nf_hnf)), _delay(lambda: nf_st(r, nf_hnf)))
    if isinstance(t, Uneval):
        forced = whnf(t.susp.force())
        if isinstance(forced, Fail):
            return Fail(0)
        return nf_st(forced, nf_hnf)
    raise TypeError(f"not a search tree: {t!r}")


def nf_con(x: NdCon, nf_hnf: Callable[[HNF], object] = generic_nf):
    """Normalize the children of ``x`` left to right."""
    children = list(x.children)
    for i, c in enumerate(children):
        t = whnf(nf_st(c, nf_hnf))
        if isinstance(t, Choice):
            def rebuild(sub, i=i):
                kids = children[:i] + [sub] + children[i + 1:]
                return nf_con(NdCon(x.name, tuple(kids)), nf_hnf)
            l, r = t.left, t.right
            return Choice(t.id, t.level, _delay(lambda: rebuild(l)), _delay(lambda: rebuild(r)))
        if isinstance(t, Fail):
            return t
        children[i] = t
    return Val(NdCon(x.name, tuple(children)))


# ---------------------------------------------------------------- search


def _step(t, m: DecisionMap, push):
    """Shared DFS/BFS step; returns the value for a leaf, else None after pushing."""
    t = whnf(t)
    if isinstance(t, Val):
        return (t.value,)
    if isinstance(t, Fail):
        return None
    if isinstance(t, Choice):
        d = m.get(t.id) if t.id is not None else None
        if d is LEFT:
            push(t.left, m)
        elif d is RIGHT:
            push(t.right, m)
        elif t.id is None:
            push(t.left, m)
            push(t.right, m)
        else:
            push(t.left, m.extend(t.id, LEFT))
            push(t.right, m.extend(t.id, RIGHT))
        return None
    if isinstance(t, Uneval):
        raise ValueError("search over a tree with Uneval nodes; normalize it with nf_st first")
    raise TypeError(f"not a search tree: {t!r}")


def iter_dfs(t, m=None) -> Iterator:
    stack = [(t, _as_map(m))]
    pending: list = []

    def push(x, mm):
        pending.append((x, mm))

    while stack:
        node, mm = stack.pop()
        out = _step(node, mm, push)
        if out is not None:
            yield out[0]
        if pending:
            stack.extend(reversed(pending))
            pending.clear()


def iter_bfs(t, m=None) -> Iterator:
    queue = deque([(t, _as_map(m))])

    def push(x, mm):
        queue.append((x, mm))

    while queue:
        node, mm = queue.popleft()
        out = _step(node, mm, push)
        if out is not None:
            yield out[0]


def search_dfs(m, t) -> list:
    """Values of an Uneval-free tree, depth-first, memoizing decisions per choice id."""
    return list(iter_dfs(t, m))


def search_bfs(m, t) -> list:
    return list(iter_bfs(t, m))


_STRATEGIES = {"dfs": iter_dfs, "bfs": iter_bfs}


def st_values(t, nf_hnf=generic_nf) -> list:
    return search_dfs(None, nf_st(t, nf_hnf))


# ---------------------------------------------------------------- level-aware extraction


class _NeedOuter(Exception):
    def __init__(self, cid, level):
        self.cid = cid
        self.level = level


class _FailLog:
    __slots__ = ("max_level",)

    def __init__(self):
        self.max_level = -1


def _collect(t, level: int, outer: DecisionMap, log: _FailLog, strategy: str = "dfs") -> Iterator:
    """Values owned by ``level`` in the world fixed by ``outer``.

    Raises _NeedOuter when an undecided choice below ``level`` is reached.
    """
    frontier = deque([(t, DecisionMap())])
    pop = frontier.pop if strategy == "dfs" else frontier.popleft
    while frontier:
        node, m = pop()
        node = whnf(node)
        if isinstance(node, Val):
            yield node.value
        elif isinstance(node, Fail):
            log.max_level = max(log.max_level, node.level)
        elif isinstance(node, Choice):
            if node.level < level:
                if node.id is None:
                    raise ValueError("anonymous choice below the encapsulation level")
                d = outer.get(node.id)
                if d is None:
                    raise _NeedOuter(node.id, node.level)
                frontier.append((node.left if d is LEFT else node.right, m))
                continue
            d = m.get(node.id) if node.id is not None else None
            if d is LEFT:
                frontier.append((node.left, m))
            elif d is RIGHT:
                frontier.append((node.right, m))
            else:
                ml = m if node.id is None else m.extend(node.id, LEFT)
                mr = m if node.id is None else m.extend(node.id, RIGHT)
                if strategy == "dfs":
                    frontier.append((node.right, mr))
                    frontier.append((node.left, ml))
                else:
                    frontier.append((node.left, ml))
                    frontier.append((node.right, mr))
        elif isinstance(node, Uneval):
            raise ValueError("Uneval node in a normalized tree")
        else:
            raise TypeError(f"not a search tree: {node!r}")


@dataclass
class ResultSet:
    """One outcome of a set function: its values, plus the outer decisions it assumed."""
    values: list
    outer: DecisionMap
    truncated: bool = False


def iter_result_sets(t, nf_hnf=generic_nf, level: int = 1, strategy: str = "dfs",
                     max_values: int | None = None) -> Iterator[ResultSet]:
    """Result sets of a level-``level`` computation, one per outer world.

    A world whose computation has no values and whose failures all come from
    below ``level`` fails (yields nothing); otherwise it yields its multiset,
    possibly empty.  With ``max_values`` each set is cut after that many values.
    """
    t = nf_st(t, nf_hnf)
    worlds = [DecisionMap()]
    while worlds:
        outer = worlds.pop()
        log = _FailLog()
        vals = []
        truncated = False
        try:
            for v in _collect(t, level, outer, log, strategy):
                vals.append(v)
                if max_values is not None and len(vals) >= max_values:
                    truncated = True
                    break
        except _NeedOuter as need:
            worlds.append(outer.extend(need.cid, RIGHT))
            worlds.append(outer.extend(need.cid, LEFT))
            continue
        if vals or log.max_level >= level:
            yield ResultSet(vals, outer, truncated)


def nd_list(values: list):
    """``Val`` of an ND list holding fully evaluated head-normal forms."""
    out = Val(NdCon("[]"))
    for v in reversed(values):
        out = Val(NdCon(":", (Val(v), out)))
    return out


def nd_list_items(t) -> list:
    """Elements of a fully evaluated ND list tree."""
    out = []
    t = whnf(t)
    while isinstance(t, Val) and isinstance(t.value, NdCon) and t.value.name == ":":
        head, t = t.value.children
        out.append(whnf(head).value)
        t = whnf(t)
    if not (isinstance(t, Val) and isinstance(t.value, NdCon) and t.value.name == "[]"):
        raise ValueError(f"not a fully evaluated list: {t!r}")
    return out


def st_values_p(e: int, t, nf_hnf=generic_nf):
    """Collect the level-``e`` values of ``t`` into a search tree of ND lists.

    Level-``e`` failures become the empty list when nothing else is found;
    choices below ``e`` stay above the collected lists; failures below ``e``
    propagate when there are no values (sibling failures merge to the
    maximum level).
    """
    t = nf_st(t, nf_hnf)

    def build(outer: DecisionMap):
        log = _FailLog()
        try:
            vals = list(_collect(t, e, outer, log))
        except _NeedOuter as need:
            cid, lvl = need.cid, need.level
            return Choice(cid, lvl, _delay(lambda: build(outer.extend(cid, LEFT))),
                          _delay(lambda: build(outer.extend(cid, RIGHT))))
        if vals or log.max_level >= e:
            return nd_list(vals)
        return Fail(log.max_level)

    return build(DecisionMap())


# ---------------------------------------------------------------- debugging


def force_tree(t, depth: int = 10_000):
    """Fully evaluated copy of a finite tree (no Delay nodes, Uneval left as is)."""
    if depth < 0:
        raise RecursionError("tree too deep to force")
    t = whnf(t)
    if isinstance(t, Choice):
        return Choice(t.id, t.level, force_tree(t.left, depth - 1), force_tree(t.right, depth - 1))
    if isinstance(t, Val) and isinstance(t.value, NdCon):
        return Val(NdCon(t.value.name, tuple(force_tree(c, depth - 1) for c in t.value.children)))
    return t


def dump_tree(t, indent: int = 0, max_depth: int = 50) -> str:
    """Indented text rendering with choice ids and levels."""
    pad = "  " * indent
    if max_depth < 0:
        return pad + "..."
    t = whnf(t)
    if isinstance(t, Fail):
        return f"{pad}Fail @{t.level}"
    if isinstance(t, Uneval):
        return f"{pad}Uneval {t.susp!r}"
    if isinstance(t, Choice):
        return "\n".join([f"{pad}Choice {t.id!r} @{t.level}",
                          dump_tree(t.left, indent + 1, max_depth - 1),
                          dump_tree(t.right, indent + 1, max_depth - 1)])
    v = t.value
    if isinstance(v, NdCon):
        if not v.children:
            return f"{pad}Val {v.name}"
        lines = [f"{pad}Val {v.name}"]
        lines += [dump_tree(c, indent + 1, max_depth - 1) for c in v.children]
        return "\n".join(lines)
    return f"{pad}Val {v}"
