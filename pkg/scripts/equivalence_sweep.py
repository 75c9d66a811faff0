"""Random-program sweep comparing synthesized set functions with the oracle."""

import argparse
import random
import sys
import time

from setsynth.checks import def1_case
from setsynth.progen import GenConfig, gen_arg, gen_program


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-choices", type=int, default=3)
    ap.add_argument("--depth-bound", type=int, default=8)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    sys.setrecursionlimit(20_000)

    rng = random.Random(args.seed)
    cfg = GenConfig(max_choices=args.max_choices)
    counts = {"ok": 0, "violation": 0, "skipped": 0}
    t0 = time.perf_counter()
    for _ in range(args.cases):
        gp = gen_program(rng, cfg)
        f = gp.target
        fargs = [gen_arg(rng, t, depth=2) for t in f.params]
        out = def1_case(gp.program, f.name, fargs, args.depth_bound)
        counts[out.status] += 1
        if out.status == "violation" or args.verbose:
            print(f"--- {out.status}: {f.name}S {' '.join(fargs)}\n{gp.source}{out.detail}")
    print(f"{counts} in {time.perf_counter() - t0:.1f}s")
    return 1 if counts["violation"] else 0


if __name__ == "__main__":
    sys.exit(main())
