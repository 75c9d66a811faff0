"""Set functions for a small functional-logic language, synthesized as plural functions over search trees."""

from .lang import parse_expr, parse_program, pretty_program, uniformize, validate_uniform
from .oracle import enumerate_values, set_function_oracle
from .session import EntryResult, RunOptions, Session
from .synthesis import Machine, emit_program

__all__ = [
    "parse_program", "parse_expr", "pretty_program", "uniformize", "validate_uniform",
    "enumerate_values", "set_function_oracle", "Session", "RunOptions", "EntryResult",
    "Machine", "emit_program",
]
