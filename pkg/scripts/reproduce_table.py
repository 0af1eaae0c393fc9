"""Run both arms of the two-slice experiment and print a per-run table.

    python scripts/reproduce_table.py [--runs 10] [--seed 1] [--sigma 0.03] [--out results/]
"""
import argparse

from ricsim.export import LabeledRun, export_csv
from ricsim.scenario import compare, two_slice_scenario
from ricsim.stats import category_stats, run_stats, sd_reduction


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--sigma", type=float, default=0.03)
    ap.add_argument("--out")
    args = ap.parse_args()

    arms = compare(two_slice_scenario(seed=args.seed, noise_sigma=args.sigma), args.runs)
    print(f"{'Category':8s} {'Run':>7s} {'Mean':>8s} {'SD':>7s}")
    cats = {}
    for label, runs in arms.items():
        for i, r in enumerate(runs, 1):
            mean, sd = run_stats(r)
            print(f"{label:8s} {'#' + str(i):>7s} {mean:8.3f} {sd:7.3f}")
        cats[label] = cs = category_stats(runs, label)
        print(f"{label:8s} {'Average':>7s} {cs.avg_mean:8.3f} {cs.avg_sd:7.3f}")
    no_cm, cmf = cats["No CM"], cats["CMF"]
    print(f"\nSD reduction {sd_reduction(no_cm, cmf):.1f}%  "
          f"(No CM / CMF = {no_cm.avg_sd / cmf.avg_sd:.2f}x)")
    if args.out:
        export_csv([LabeledRun(l, i + 1, r) for l, rs in arms.items() for i, r in enumerate(rs)],
                   args.out)


if __name__ == "__main__":
    main()
