"""CSV export. Floats are written with 3 decimals and records end in '\\n'."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .scenario import RunResult
from .stats import category_stats, run_stats

SAMPLE_COLUMNS = ["run_id", "category", "time_ms", "ue_id", "slice", "throughput_mbps"]
DISPOSITION_COLUMNS = ["run_id", "category", "time_ms", "xapp_id", "cell", "slice", "value",
                       "disposition", "conflict_id", "winner"]
SUMMARY_COLUMNS = ["category", "run_id", "run_mean", "run_sd"]
AUDIT_COLUMNS = ["run_id", "category", "delivered_at", "sent_at", "kind", "sender", "to",
                 "original_to", "seq"]


@dataclass(frozen=True)
class LabeledRun:
    category: str
    run_id: int
    result: RunResult


def _f(x: float) -> str:
    return f"{x:.3f}"


def _ordered(runs: Iterable[LabeledRun]) -> list[LabeledRun]:
    # categories keep first-appearance order, runs sorted by id within each
    order = {}
    for r in runs:
        order.setdefault(r.category, []).append(r)
    return [r for group in order.values() for r in sorted(group, key=lambda r: r.run_id)]


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_samples(path: Path, runs: Sequence[LabeledRun]) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(SAMPLE_COLUMNS)
        for r in runs:
            for s in r.result.samples:
                w.writerow([r.run_id, r.category, s.time, s.ue_id, s.slice, _f(s.throughput_mbps)])


def write_dispositions(path: Path, runs: Sequence[LabeledRun]) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(DISPOSITION_COLUMNS)
        for r in runs:
            for rec in r.result.dispositions:
                d = rec.decision
                w.writerow([r.run_id, r.category, rec.time_ms, d.xapp_id, d.target.cell_id,
                            d.target.slice_id, d.value, rec.disposition.value,
                            "" if rec.conflict_id is None else rec.conflict_id,
                            rec.winner or ""])


def write_summary(path: Path, runs: Sequence[LabeledRun]) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        by_cat: dict[str, list[LabeledRun]] = {}
        for r in runs:
            by_cat.setdefault(r.category, []).append(r)
        for cat, group in by_cat.items():
            for r in group:
                mean, sd = run_stats(r.result)
                w.writerow([cat, r.run_id, _f(mean), _f(sd)])
            cs = category_stats([g.result for g in group], cat)
            w.writerow([cat, "Average", _f(cs.avg_mean), _f(cs.avg_sd)])


def write_envelope_audit(path: Path, runs: Sequence[LabeledRun]) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(AUDIT_COLUMNS)
        for r in runs:
            for rec in r.result.envelope_audit:
                e = rec.envelope
                w.writerow([r.run_id, r.category, e.delivered_at, e.sent_at, e.kind.value,
                            e.sender, e.to, e.original_to or "", e.seq])


def export_csv(runs: Iterable[LabeledRun], out_dir: str | Path, audit: bool = False) -> list[Path]:
    """Write samples.csv, dispositions.csv and summary.csv (plus envelopes.csv if ``audit``)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = _ordered(runs)
    paths = [out / "samples.csv", out / "dispositions.csv", out / "summary.csv"]
    write_samples(paths[0], runs)
    write_dispositions(paths[1], runs)
    write_summary(paths[2], runs)
    if audit:
        paths.append(out / "envelopes.csv")
        write_envelope_audit(paths[3], runs)
    return paths
