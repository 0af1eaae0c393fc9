"""Throughput statistics: per UE, then per run (mean over UEs), then per
category (mean over runs)."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class StatisticsError(ValueError):
    pass


def per_ue_stats(series: Iterable[tuple[int, float]], warmup_cutoff: int = 0) -> tuple[float, float]:
    """Mean and sample SD (n-1) of the values whose time is >= ``warmup_cutoff``."""
    values = [v for t, v in series if t >= warmup_cutoff]
    if len(values) < 2:
        raise StatisticsError(f"need at least 2 post-cutoff samples, got {len(values)}")
    return statistics.fmean(values), statistics.stdev(values)


def run_stats(result) -> tuple[float, float]:
    stats = list(result.per_ue_stats.values())
    if not stats:
        raise StatisticsError("run has no UE statistics")
    return (statistics.fmean(m for m, _ in stats), statistics.fmean(s for _, s in stats))


@dataclass(frozen=True)
class CategoryStats:
    category: str
    run_means: tuple[float, ...]
    run_sds: tuple[float, ...]

    @property
    def avg_mean(self) -> float:
        return statistics.fmean(self.run_means)

    @property
    def avg_sd(self) -> float:
        return statistics.fmean(self.run_sds)


def category_stats(runs: Sequence, label: str) -> CategoryStats:
    """Aggregate runs into a category.

    Items may be RunResult objects or ready-made (run_mean, run_sd) pairs.
    """
    if not runs:
        raise StatisticsError("category needs at least one run")
    pairs = [r if isinstance(r, tuple) else run_stats(r) for r in runs]
    return CategoryStats(label, tuple(m for m, _ in pairs), tuple(s for _, s in pairs))


def sd_reduction(no_cm: CategoryStats, cmf: CategoryStats) -> Optional[float]:
    """Percent drop in average SD from ``no_cm`` to ``cmf``, one decimal; None if undefined."""
    if no_cm.avg_sd <= 0 or math.isnan(no_cm.avg_sd):
        return None
    return round(100.0 * (1.0 - cmf.avg_sd / no_cm.avg_sd), 1)
