"""Slice PRB allocation xApps.

Two policies are provided. ``PRIORITY_SLICE`` gives the prioritized slice a
quota that averages its UE share with the fair share 1/S; the remaining
slices split what is left the same way. ``EQUAL_SPLIT`` gives every slice P/S.
Quotas are computed as exact fractions and rounded by largest remainder so
that they always sum to P.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .domain import (CellConfig, ControlDecision, ControlTarget, E2ControlMessage,
                     PrbAllocation, RanSnapshot, SliceId)
from .fabric import Endpoint, Envelope, Kind

log = logging.getLogger(__name__)

DEFAULT_PERIOD_MS = 10_000


class XappKind(enum.Enum):
    PRIORITY_SLICE = "priority_slice"
    EQUAL_SPLIT = "equal_split"


class DegenerateInput(ValueError):
    """Ratios are undefined (no UEs, or a single slice)."""


class StaleSnapshot(RuntimeError):
    pass


@dataclass(frozen=True)
class XappConfig:
    xapp_id: str
    kind: XappKind
    priority: int
    period: int = DEFAULT_PERIOD_MS
    phase_offset: int = 0
    prioritized_slice: Optional[SliceId] = None
    decision_ttl: Optional[int] = None  # None -> 2 * period

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        if not 0 <= self.phase_offset < self.period:
            raise ValueError("phase_offset must lie in [0, period)")
        if self.priority < 0:
            raise ValueError("priority must be non-negative")
        if self.kind is XappKind.PRIORITY_SLICE and not self.prioritized_slice:
            raise ValueError(f"{self.xapp_id}: priority_slice xApp needs a prioritized_slice")
        if self.decision_ttl is not None and self.decision_ttl <= 0:
            raise ValueError("decision_ttl must be positive")

    @property
    def ttl(self) -> int:
        return self.decision_ttl if self.decision_ttl is not None else 2 * self.period

    def is_tick(self, now: int) -> bool:
        return now >= self.phase_offset and (now - self.phase_offset) % self.period == 0


@dataclass(frozen=True)
class PriorityRatios:
    prioritized: Fraction  # U_A / U
    other: Fraction        # (1 - U_A/U) / (S - 1), per non-prioritized slice
    slice_count: int


def priority_ratios(total_ues: int, prioritized_ues: int, slice_count: int) -> PriorityRatios:
    if total_ues < 1:
        raise DegenerateInput("no UEs attached")
    if slice_count < 2:
        raise DegenerateInput("need at least two slices")
    if not 0 <= prioritized_ues <= total_ues:
        raise ValueError(f"prioritized UEs {prioritized_ues} outside [0, {total_ues}]")
    r_a = Fraction(prioritized_ues, total_ues)
    return PriorityRatios(r_a, (1 - r_a) / (slice_count - 1), slice_count)


def largest_remainder(quotas: Mapping[SliceId, Fraction], total: int) -> dict[SliceId, int]:
    """Round ``quotas`` to integers summing to ``total``.

    Leftover units go to the largest fractional parts; ties go to the
    earlier key in iteration order.
    """
    floors = {k: int(q // 1) for k, q in quotas.items()}
    left = total - sum(floors.values())
    if not 0 <= left <= len(quotas):
        raise ValueError(f"quotas do not sum to {total}")
    # sorted() is stable, so equal remainders keep declaration order
    for k in sorted(quotas, key=lambda k: -(quotas[k] % 1))[:left]:
        floors[k] += 1
    return floors


def priority_quotas(cell: CellConfig, ratios: PriorityRatios,
                    prioritized: SliceId) -> dict[SliceId, Fraction]:
    if prioritized not in cell.slices:
        raise ValueError(f"unknown slice {prioritized!r}")
    if ratios.slice_count != cell.slice_count:
        raise ValueError("ratios were computed for a different slice count")
    fair = Fraction(1, cell.slice_count)
    P = cell.total_prbs
    return {s: P * ((ratios.prioritized if s == prioritized else ratios.other) + fair) / 2
            for s in cell.slices}


def equal_quotas(cell: CellConfig) -> dict[SliceId, Fraction]:
    return {s: Fraction(cell.total_prbs, cell.slice_count) for s in cell.slices}


def compute_priority_allocation(cell: CellConfig, ratios: PriorityRatios,
                                prioritized: SliceId) -> PrbAllocation:
    return PrbAllocation(largest_remainder(priority_quotas(cell, ratios, prioritized),
                                           cell.total_prbs))


def compute_equal_allocation(cell: CellConfig) -> PrbAllocation:
    return PrbAllocation(largest_remainder(equal_quotas(cell), cell.total_prbs))


def target_allocation(xapp: XappConfig, snapshot: RanSnapshot) -> PrbAllocation:
    cell = snapshot.cell
    if xapp.kind is XappKind.EQUAL_SPLIT:
        return compute_equal_allocation(cell)
    if cell.slice_count == 1:
        return PrbAllocation({cell.slices[0]: cell.total_prbs})
    try:
        ratios = priority_ratios(snapshot.total_ues,
                                 snapshot.ues_per_slice.get(xapp.prioritized_slice, 0),
                                 cell.slice_count)
    except DegenerateInput:
        return compute_equal_allocation(cell)
    return compute_priority_allocation(cell, ratios, xapp.prioritized_slice)


def on_tick(xapp: XappConfig, snapshot: Optional[RanSnapshot], now: int,
            sequence_no: int = 0) -> E2ControlMessage:
    """Compose the CONTROL message an xApp sends at one of its tick times."""
    if not xapp.is_tick(now):
        raise ValueError(f"{xapp.xapp_id}: {now} ms is not a tick time")
    if snapshot is None or not 0 <= now - snapshot.timestamp < xapp.period:
        raise StaleSnapshot(f"{xapp.xapp_id}: no fresh snapshot at {now} ms")
    alloc = target_allocation(xapp, snapshot)
    cell = snapshot.cell
    decisions = [ControlDecision(xapp.xapp_id, ControlTarget(cell.cell_id, s), alloc[s],
                                 now, now + xapp.ttl)
                 for s in cell.slices]
    return E2ControlMessage(xapp.xapp_id, tuple(decisions), sequence_no, now)


class XappHost:
    """Runs one xApp from the event loop; keeps the latest REPORT it received."""

    def __init__(self, config: XappConfig, e2_node: str = "gnb-0"):
        self.config = config
        self.e2_node = e2_node
        self.snapshot: Optional[RanSnapshot] = None
        self.sequence_no = 0
        self.skipped_ticks: list[int] = []
        self.rejections = 0

    def receive(self, env: Envelope) -> None:
        if env.kind is Kind.REPORT:
            self.snapshot = env.payload
        elif env.kind is Kind.REJECT:
            # Built-in xApps do not react to rejections.
            self.rejections += 1

    def tick(self, endpoint: Endpoint, now: int) -> Optional[E2ControlMessage]:
        try:
            msg = on_tick(self.config, self.snapshot, now, self.sequence_no)
        except StaleSnapshot as exc:
            log.info("tick skipped: %s", exc)
            self.skipped_ticks.append(now)
            return None
        self.sequence_no += 1
        endpoint.send(Kind.CONTROL, self.e2_node, msg)
        return msg
