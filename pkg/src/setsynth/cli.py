"""Command-line driver: ``setsynth run`` and ``setsynth synthesize``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .lang import FrontendError, parse_program
from .oracle import EvalError
from .session import EntryResult, RunOptions, Session, same_sets
from .synthesis import SynthesisError, emit_program
from .values import JSON_SCHEMA_DOC, dumps, render_multiset, render_set, render_value

EXIT_OK = 0
EXIT_DIAGNOSTIC = 1
EXIT_MISMATCH = 2


@dataclass
class RunConfig:
    source: str
    entry: str
    strategy: str = "dfs"
    max_values: int | None = None
    format: str = "text"
    mode: str = "synth"
    depth_bound: int = 8

    def __post_init__(self):
        if self.max_values is not None and self.max_values < 1:
            raise ValueError("--max-values must be at least 1")
        if self.depth_bound < 1:
            raise ValueError("--depth-bound must be positive")

    def options(self) -> RunOptions:
        return RunOptions(self.strategy, self.max_values, self.depth_bound)


def render_result(r: EntryResult, fmt: str) -> str:
    items = [list(x) for x in r.items] if r.kind == "sets" else r.items
    if fmt == "json":
        return dumps(items)
    if r.kind == "sets":
        return "[" + ",".join(render_multiset(s) for s in items) + "]"
    return render_multiset(items)


def _set_summary(r: EntryResult) -> str:
    if r.kind == "sets":
        seen = []
        for s in r.items:
            if frozenset(s) not in [frozenset(x) for x in seen]:
                seen.append(s)
        return " ".join(render_set(s) for s in seen) or "(no value)"
    return render_set(r.items)


def _load(path: str):
    return parse_program(Path(path).read_text(encoding="utf-8"))


def cmd_run(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    try:
        program = _load(cfg.source) if cfg.source else parse_program("")
        session = Session(program)
        entry = session.parse(cfg.entry)
        opts = cfg.options()
        if cfg.mode == "oracle":
            result = session.eval_oracle(entry, opts)
        elif cfg.mode == "synth":
            result = session.eval_synth(entry, opts)
        else:
            synth = session.eval_synth(entry, opts)
            oracle = session.eval_oracle(entry, opts)
            if oracle.truncated:
                print("warning: oracle enumeration was truncated", file=err)
            if same_sets(synth, oracle):
                print(f"MATCH {_set_summary(synth)}", file=out)
                return EXIT_OK
            print(f"MISMATCH synth={_set_summary(synth)} oracle={_set_summary(oracle)}", file=out)
            return EXIT_MISMATCH
    except (OSError, FrontendError, SynthesisError, EvalError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DIAGNOSTIC
    print(render_result(result, cfg.format), file=out)
    if result.truncated:
        print("note: output truncated", file=err)
    return EXIT_OK


def cmd_synthesize(source: str, targets: list[str], out_path: str | None, out=sys.stdout, err=sys.stderr) -> int:
    try:
        bundle = emit_program(_load(source), targets)
    except (OSError, FrontendError, SynthesisError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DIAGNOSTIC
    if not targets:
        print("warning: no targets given; the bundle is empty", file=err)
    text = bundle.dump()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="setsynth", description="Synthesize and run set functions of MiniFLP programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate an entry expression",
                         epilog=f"JSON values: {JSON_SCHEMA_DOC}")
    run.add_argument("source", nargs="?", default="", help="MiniFLP source file")
    run.add_argument("-e", "--entry", required=True, help="closed expression; fS names the set function of f")
    run.add_argument("--mode", choices=["synth", "oracle", "diff"], default="synth")
    run.add_argument("--strategy", choices=["dfs", "bfs"], default="dfs")
    run.add_argument("--max-values", type=int, default=None)
    run.add_argument("--depth-bound", type=int, default=8)
    run.add_argument("--format", choices=["text", "json"], default="text")

    syn = sub.add_parser("synthesize", help="write the synthesized IR bundle")
    syn.add_argument("source")
    syn.add_argument("targets", nargs="*")
    syn.add_argument("--out", default=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    args = build_parser().parse_args(argv)
    if args.command == "synthesize":
        return cmd_synthesize(args.source, args.targets, args.out)
    try:
        cfg = RunConfig(args.source, args.entry, args.strategy, args.max_values, args.format, args.mode,
                        args.depth_bound)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return cmd_run(cfg)


if __name__ == "__main__":
    sys.exit(main())
