"""Random finite search trees for runtime property tests."""

from __future__ import annotations

import itertools
import random

from . import runtime as rt


def gen_tree(rng: random.Random, depth: int = 6, max_level: int = 1, id_pool: list | None = None,
             data: bool = False, p_leaf: float = 0.3):
    """A random Uneval-free tree of height at most ``depth``.

    With ``id_pool`` choice ids are drawn from the pool (so they may repeat);
    otherwise every choice gets a fresh id.  With ``data`` values may be list
    constructors whose children are trees again.
    """
    counter = itertools.count()

    def fresh():
        if id_pool is not None:
            return rng.choice(id_pool)
        return rt.ChoiceId("t", next(counter))

    def value(d: int):
        if data and d > 0 and rng.random() < 0.4:
            return rt.NdCon(":", (go(d - 1), go(d - 1) if rng.random() < 0.5 else rt.Val(rt.NdCon("[]"))))
        return rng.randint(0, 9)

    def go(d: int):
        if d <= 0 or rng.random() < p_leaf:
            if rng.random() < 0.2:
                return rt.Fail(rng.randint(0, max_level))
            return rt.Val(value(d))
        return rt.Choice(fresh(), rng.randint(0, max_level), go(d - 1), go(d - 1))

    return go(depth)


def tree_ids(t) -> list:
    """Choice ids of a forced tree, in preorder, with repetitions."""
    out = []

    def walk(x):
        x = rt.whnf(x)
        if isinstance(x, rt.Choice):
            out.append(x.id)
            walk(x.left)
            walk(x.right)
        elif isinstance(x, rt.Val) and isinstance(x.value, rt.NdCon):
            for c in x.value.children:
                walk(c)

    walk(t)
    return out


def naive_values(t) -> set:
    """Values reachable under some global Left/Right assignment of all choice ids."""
    ids = sorted(set(tree_ids(t)), key=repr)
    out = set()
    for bits in itertools.product((rt.LEFT, rt.RIGHT), repeat=len(ids)):
        a = dict(zip(ids, bits))
        x = rt.whnf(t)
        while isinstance(x, rt.Choice):
            x = rt.whnf(x.left if a[x.id] is rt.LEFT else x.right)
        if isinstance(x, rt.Val):
            out.add(x.value)
    return out


def contains_fail(t, level: int) -> bool:
    t = rt.whnf(t)
    if isinstance(t, rt.Fail):
        return t.level == level
    if isinstance(t, rt.Choice):
        return contains_fail(t.left, level) or contains_fail(t.right, level)
    if isinstance(t, rt.Val) and isinstance(t.value, rt.NdCon):
        return any(contains_fail(c, level) for c in t.value.children)
    return False
