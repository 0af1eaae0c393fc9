"""Plot per-UE throughput over time from a samples.csv written by `ricsim`.

    python scripts/plot_runs.py results/samples.csv --run 1 -o throughput.png
"""
import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("samples")
    ap.add_argument("--run", default="1")
    ap.add_argument("-o", "--output", default="throughput.png")
    args = ap.parse_args()

    series = defaultdict(lambda: defaultdict(list))
    with open(args.samples, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["run_id"] != args.run:
                continue
            s = series[row["category"]][row["ue_id"]]
            s.append((int(row["time_ms"]) / 1000, float(row["throughput_mbps"])))

    fig, axes = plt.subplots(len(series), 1, figsize=(9, 3 * len(series)), sharex=True, squeeze=False)
    for ax, (cat, ues) in zip(axes[:, 0], series.items()):
        for ue, pts in sorted(ues.items()):
            ax.plot(*zip(*pts), label=ue, lw=1)
        ax.set_title(f"{cat}, run {args.run}")
        ax.set_ylabel("DL throughput [Mbps]")
        ax.legend(loc="upper right")
    axes[-1, 0].set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
