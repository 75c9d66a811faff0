"""Run the worked examples through both the synthesized code and the oracle."""

import sys
from pathlib import Path

from setsynth.lang import parse_program
from setsynth.session import Session, same_sets

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

CASES = [
    ("ndconst.mc", "ndconstS 2 failed"),
    ("ndconst.mc", "ndconstS (2?4) (3?5)"),
    ("anyof.mc", "anyOfS [0?1,2,3]"),
    ("anyof.mc", "anyOfS [failed,1]"),
    ("double01.mc", "double01S"),
    ("notf.mc", "notfS"),
    ("notf.mc", "notsS failed"),
    ("lists.mc", "permS [1,2,3]"),
]


def main() -> int:
    sys.setrecursionlimit(20_000)
    bad = 0
    for fname, entry in CASES:
        session = Session(parse_program((PROGRAMS / fname).read_text()))
        e = session.parse(entry)
        synth = session.eval_synth(e)
        oracle = session.eval_oracle(e)
        agree = same_sets(synth, oracle)
        bad += not agree
        print(f"{fname:12} {entry:24} synth={synth.items}  {'agrees' if agree else 'DIFFERS'} with oracle")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
