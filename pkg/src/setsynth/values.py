"""Source-level values: constructor terms over ints, possibly partial.

A value is an ``int``, a :class:`Con`, or :data:`BOTTOM` (an undemanded
position).  Lists use the builtin constructors ``[]`` and ``:``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Union


NIL = "[]"
CONS = ":"
TRUE = "True"
FALSE = "False"


class _Bottom:
    __slots__ = ()

    def __repr__(self) -> str:
        return "BOTTOM"

    def __reduce__(self):
        return "BOTTOM"


BOTTOM = _Bottom()


@dataclass(frozen=True)
class Con:
    name: str
    args: tuple = ()

    def __repr__(self) -> str:
        return render_value(self)


Value = Union[int, Con, _Bottom]


def from_list(items: Iterable[Value]) -> Con:
    items = list(items)
    out = Con(NIL)
    for item in reversed(items):
        out = Con(CONS, (item, out))
    return out


def from_bool(b: bool) -> Con:
    return Con(TRUE if b else FALSE)


def as_list(v: Value) -> list | None:
    """Python list of the elements if ``v`` is a complete list, else None."""
    out = []
    while isinstance(v, Con) and v.name == CONS:
        out.append(v.args[0])
        v = v.args[1]
    if isinstance(v, Con) and v.name == NIL:
        return out
    return None


def is_partial(v: Value) -> bool:
    if v is BOTTOM:
        return True
    if isinstance(v, Con):
        return any(is_partial(a) for a in v.args)
    return False


def render_value(v: Value, nested: bool = False) -> str:
    """Render in source syntax: ``[1,2]``, ``Just 3``, ``(P 1 [])``, ``⊥``."""
    if v is BOTTOM:
        return "⊥"
    if isinstance(v, bool):
        raise TypeError("booleans are constructor terms, not Python bools")
    if isinstance(v, int):
        return str(v) if v >= 0 or not nested else f"({v})"
    elems = as_list(v)
    if elems is not None:
        return "[" + ",".join(render_value(e) for e in elems) + "]"
    if v.name == CONS:
        s = f"{render_value(v.args[0], True)} : {render_value(v.args[1])}"
        return f"({s})" if nested else s
    if not v.args:
        return v.name
    s = v.name + " " + " ".join(render_value(a, True) for a in v.args)
    return f"({s})" if nested else s


def render_multiset(vals: Iterable[Value]) -> str:
    return "[" + ",".join(render_value(v) for v in vals) + "]"


def render_set(vals: Iterable[Value]) -> str:
    """Deduplicated rendering in first-occurrence order, e.g. ``{0,2}``."""
    seen = []
    for v in vals:
        if v not in seen:
            seen.append(v)
    return "{" + ",".join(render_value(v) for v in seen) + "}"


# JSON: ints are numbers, complete lists are arrays, True/False are JSON
# booleans, ⊥ is null, any other constructor is {"con": name, "args": [...]}.
JSON_SCHEMA_DOC = (
    'value := int | [value, ...] | true | false | null | {"con": str, "args": [value, ...]}'
)


def value_to_json(v: Any) -> Any:
    if v is BOTTOM:
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, list):
        return [value_to_json(x) for x in v]
    elems = as_list(v)
    if elems is not None:
        return [value_to_json(e) for e in elems]
    if v.name == TRUE and not v.args:
        return True
    if v.name == FALSE and not v.args:
        return False
    return {"con": v.name, "args": [value_to_json(a) for a in v.args]}


def value_from_json(j: Any) -> Value:
    if j is None:
        return BOTTOM
    if isinstance(j, bool):
        return from_bool(j)
    if isinstance(j, int):
        return j
    if isinstance(j, list):
        return from_list(value_from_json(x) for x in j)
    if isinstance(j, dict):
        return Con(j["con"], tuple(value_from_json(a) for a in j["args"]))
    raise ValueError(f"not a value: {j!r}")


def dumps(obj: Any) -> str:
    return json.dumps(value_to_json(obj), separators=(",", ":"), ensure_ascii=False)
