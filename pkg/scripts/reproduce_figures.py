"""Write excitation-profile CSVs for the NB, PB and Wimperis families.

Usage: python3 scripts/reproduce_figures.py [--out DIR] [--points 1001]

Files written
-------------
nb_profiles_N{n}.csv     NB profiles for p = 0.1 ... 1.0
pb_profiles_N{n}.csv     PB profiles built from the N-pulse half-pi solution
wimperis_profiles.csv    Wimperis NB and PB profiles at p = 0.5 and p = 1
"""
import argparse
from pathlib import Path

from cp_synth.analysis import default_grid, excitation_profile, profile_csv
from cp_synth.sequences import pb_sequence, wimperis_nb, wimperis_pb
from cp_synth.solver import NbProblem, solve_matched

LEVELS = [round(0.1 * k, 1) for k in range(1, 11)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--points", type=int, default=1001)
    ap.add_argument("--lengths", type=int, nargs="+", default=[2, 4, 6, 8])
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    grid = default_grid(args.points)

    for n in args.lengths:
        nb = {f"p={p:g}": excitation_profile(solve_matched(NbProblem(n, p)).sequence(), grid).probabilities
              for p in LEVELS}
        (args.out / f"nb_profiles_N{n}.csv").write_text(profile_csv(grid, nb))
        half = solve_matched(NbProblem(n, 0.5)).phases
        pb = {f"p={p:g}": excitation_profile(pb_sequence(half, p), grid).probabilities for p in LEVELS}
        (args.out / f"pb_profiles_N{n}.csv").write_text(profile_csv(grid, pb))
        print(f"N={n}: wrote NB and PB profiles")

    cols = {}
    for p in (0.5, 1.0):
        cols[f"wimperis-nb p={p:g}"] = excitation_profile(wimperis_nb(p), grid).probabilities
        cols[f"wimperis-pb p={p:g}"] = excitation_profile(wimperis_pb(p), grid).probabilities
    (args.out / "wimperis_profiles.csv").write_text(profile_csv(grid, cols))
    print(f"wrote {args.out / 'wimperis_profiles.csv'}")


if __name__ == "__main__":
    main()
