"""Sweep the hashing Monte Carlo over m and render the failure curve.

Writes bell_mc_sweep.csv and bell_mc_sweep.svg next to the working directory.
"""

import argparse

from distqc.cli import _plot_failure_curve
from distqc.hashing import MODES, McConfig, McReport, run_monte_carlo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--p", type=float, nargs=4, default=[0.5, 0.5, 0.0, 0.0])
    ap.add_argument("--delta", type=float, default=0.15)
    ap.add_argument("--m-grid", type=int, nargs="+", default=[13, 14, 15, 16, 17, 18])
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--parallelism", type=int, default=1)
    ap.add_argument("--prefix", default="bell_mc_sweep")
    args = ap.parse_args()

    rows = [McReport.CSV_HEADER]
    for mode in MODES:
        for m in args.m_grid:
            rep = run_monte_carlo(McConfig(
                p=tuple(args.p), n=args.n, m=m, trials=args.trials,
                delta=args.delta, mode=mode, seed=args.seed,
                parallelism=args.parallelism,
            ))
            rows.append(rep.csv_row())
            print(f"mode={mode:8s} m={m:3d} failures={rep.failures:4d}/{rep.trials}"
                  f"  empirical={rep.empirical_failure_rate:.4f}  bound={rep.paper_bound:.4f}")

    csv_path = f"{args.prefix}.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write("\n".join(rows) + "\n")
    svg_path = f"{args.prefix}.svg"
    with open(svg_path, "w", newline="") as fh:
        fh.write(_plot_failure_curve(csv_path))
    print(f"wrote {csv_path} and {svg_path}")


if __name__ == "__main__":
    main()
