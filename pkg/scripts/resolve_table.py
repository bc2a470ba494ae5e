"""Re-solve every NB phase-table entry from random starts and compare.

Continuation seeds are switched off, so each solve starts from random phases
only.  Prints one row per entry and the full-precision phases as JSON with
``--json``.
"""
import argparse
import json
import math
import time

from cp_synth.solver import (NbProblem, SolverOptions, load_reference_table, match_table, solve_analytic,
                             solve_nb)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=256)
    ap.add_argument("--seed", type=int, default=SolverOptions.seed)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    opts = SolverOptions(n_starts=args.starts, seed=args.seed, continuation=False)
    table = load_reference_table()
    rows = []
    for (n, p), ref_pi in sorted(table.items()):
        t0 = time.perf_counter()
        problem = NbProblem(n, p)
        sols = [solve_analytic(problem)] if n == 2 else solve_nb(problem, opts)
        best, dist = match_table(sols, [math.pi * f for f in ref_pi])
        rows.append({**best.to_dict(), "branches": len(sols), "table_gap_pi": dist / math.pi,
                     "seconds": time.perf_counter() - t0})
        if not args.json:
            r = rows[-1]
            print(f"N={n} p={p:4.2f} branches={r['branches']:2d} gap={r['table_gap_pi']:.1e} pi "
                  f"residual={r['residual_norm']:.1e} {r['seconds']:.2f}s")
    if args.json:
        print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
