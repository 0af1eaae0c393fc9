"""Command line entry point.

    ricsim run --config FILE [--seed N] [--cm on|off] [--out DIR] [--audit]
    ricsim compare --config FILE [--runs N] --out DIR
    ricsim validate --config FILE

Exit codes: 0 success, 1 scenario error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .domain import ScenarioError
from .export import LabeledRun, export_csv
from .scenario import category_label, compare, load_config, run
from .stats import category_stats, run_stats, sd_reduction

EXIT_OK, EXIT_SCENARIO, EXIT_IO = 0, 1, 2


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ricsim",
                                description="Near-RT RIC xApp conflict mitigation simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one run")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--cm", type=_on_off, help="override run.cm (on|off)")
    r.add_argument("--out", help="directory for CSV output")
    r.add_argument("--audit", action="store_true", help="also write envelopes.csv")

    c = sub.add_parser("compare", help="run both arms and report the SD reduction")
    c.add_argument("--config", required=True)
    c.add_argument("--runs", type=int, help="runs per arm (default: run.replications)")
    c.add_argument("--out", required=True)

    v = sub.add_parser("validate", help="check a config file")
    v.add_argument("--config", required=True)
    return p


def _cmd_run(args) -> int:
    sc = load_config(args.config)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    if args.cm is not None:
        sc = replace(sc, cm_enabled=args.cm)
    result = run(sc)
    label = category_label(sc.cm_enabled)
    for ue, (mean, sd) in result.per_ue_stats.items():
        print(f"{ue}: mean {mean:.3f} Mbps, sd {sd:.3f} Mbps")
    mean, sd = run_stats(result)
    rejected = sum(1 for d in result.dispositions if d.disposition.value == "Rejected")
    print(f"{label} seed={sc.seed}: run mean {mean:.3f} Mbps, run sd {sd:.3f} Mbps, "
          f"{len(result.conflicts)} conflicts, {rejected} rejected decisions")
    if args.out:
        export_csv([LabeledRun(label, 1, result)], args.out, audit=args.audit)
    return EXIT_OK


def _cmd_compare(args) -> int:
    sc = load_config(args.config)
    arms = compare(sc, args.runs)
    labeled = [LabeledRun(label, i + 1, r) for label, runs in arms.items()
               for i, r in enumerate(runs)]
    export_csv(labeled, args.out)
    cats = {label: category_stats(runs, label) for label, runs in arms.items()}
    for cs in cats.values():
        print(f"{cs.category:6s} average mean {cs.avg_mean:.3f} Mbps, average sd {cs.avg_sd:.3f} Mbps")
    red = sd_reduction(cats["No CM"], cats["CMF"])
    print("sd reduction: " + ("n/a" if red is None else f"{red:.1f}%"))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            sc = load_config(args.config)
            print(f"ok: {len(sc.xapps)} xApps, {len(sc.events)} events, "
                  f"{sc.duration_ms} ms, cm={'on' if sc.cm_enabled else 'off'}")
            return EXIT_OK
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_compare(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
