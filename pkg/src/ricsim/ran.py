"""Simulated gNB: applies slice PRB controls, tracks UEs, reports and samples throughput."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .domain import (CellConfig, ControlDecision, ControlTarget, PrbAllocation, RanSnapshot,
                     ScenarioError, SliceId, validate_allocation)
from .xapps import compute_equal_allocation


@dataclass(frozen=True)
class UeState:
    ue_id: str
    slice: SliceId
    attached_at: int


@dataclass(frozen=True)
class ThroughputModelParams:
    rate_per_prb: float = 0.45   # Mbps per PRB
    noise_sigma: float = 0.03    # relative SD of multiplicative noise
    sample_interval: int = 1000  # ms

    def __post_init__(self):
        if self.rate_per_prb <= 0:
            raise ScenarioError("rate_per_prb must be positive")
        if self.noise_sigma < 0:
            raise ScenarioError("noise_sigma must be non-negative")
        if self.sample_interval <= 0:
            raise ScenarioError("sample_interval must be positive")


@dataclass(frozen=True)
class ThroughputSample:
    time: int
    ue_id: str
    slice: SliceId
    throughput_mbps: float


@dataclass(frozen=True)
class AppliedDecision:
    decision: ControlDecision
    applied_at: int


@dataclass(frozen=True)
class ControlAck:
    ok: bool
    violation: Optional[str] = None


class GnbState:
    def __init__(self, cell: CellConfig, allocation: Optional[PrbAllocation] = None):
        if allocation is None:
            allocation = compute_equal_allocation(cell)
        problem = validate_allocation(allocation, cell)
        if problem:
            raise ScenarioError(f"initial allocation invalid: {problem}")
        self.cell = cell
        self.allocation = allocation
        self.ues: list[UeState] = []
        self.last_writer: Optional[str] = None
        self.applied: list[AppliedDecision] = []
        self.revocations: dict[ControlDecision, int] = {}

    def ue_counts(self) -> dict[SliceId, int]:
        c = Counter(u.slice for u in self.ues)
        return {s: c.get(s, 0) for s in self.cell.slices}


def apply_control(gnb: GnbState, decisions: Iterable[ControlDecision], now: int) -> ControlAck:
    decisions = list(decisions)
    per_slice = gnb.allocation.as_dict()
    for d in decisions:
        if d.target.cell_id != gnb.cell.cell_id:
            return ControlAck(False, f"decision targets cell {d.target.cell_id}")
        if d.target.slice_id not in per_slice:
            return ControlAck(False, f"unknown slice {d.target.slice_id}")
        per_slice[d.target.slice_id] = d.value
    candidate = PrbAllocation(per_slice)
    problem = validate_allocation(candidate, gnb.cell)
    if problem:
        return ControlAck(False, problem)
    gnb.allocation = candidate
    if decisions:
        gnb.last_writer = decisions[-1].xapp_id
    gnb.applied.extend(AppliedDecision(d, now) for d in decisions)
    return ControlAck(True)


def record_revocations(gnb: GnbState, decisions: Iterable[ControlDecision], now: int) -> None:
    for d in decisions:
        gnb.revocations.setdefault(d, now)


def attach_ue(gnb: GnbState, ue_id: str, slice_id: SliceId, now: int) -> GnbState:
    if any(u.ue_id == ue_id for u in gnb.ues):
        raise ScenarioError(f"UE {ue_id} is already attached")
    if slice_id not in gnb.cell.slices:
        raise ScenarioError(f"UE {ue_id}: unknown slice {slice_id}")
    gnb.ues.append(UeState(ue_id, slice_id, now))
    return gnb


def detach_ue(gnb: GnbState, ue_id: str, now: int) -> GnbState:
    remaining = [u for u in gnb.ues if u.ue_id != ue_id]
    if len(remaining) == len(gnb.ues):
        raise ScenarioError(f"UE {ue_id} is not attached")
    gnb.ues = remaining
    return gnb


def snapshot(gnb: GnbState, now: int) -> RanSnapshot:
    return RanSnapshot(gnb.cell, gnb.ue_counts(), gnb.allocation, now)


def sample_throughput(gnb: GnbState, params: ThroughputModelParams, rng: random.Random,
                      now: int) -> list[ThroughputSample]:
    """One DL throughput sample per attached UE, in attach order.

    A UE gets an equal share of its slice's PRBs at ``rate_per_prb`` Mbps each,
    scaled by (1 + eps), eps ~ N(0, noise_sigma^2), floored at zero.
    """
    counts = gnb.ue_counts()
    out = []
    for ue in gnb.ues:
        base = params.rate_per_prb * gnb.allocation[ue.slice] / counts[ue.slice]
        eps = rng.gauss(0.0, params.noise_sigma) if params.noise_sigma > 0 else 0.0
        out.append(ThroughputSample(now, ue.ue_id, ue.slice, max(0.0, base * (1.0 + eps))))
    return out


def effective_windows(gnb: GnbState) -> list[tuple[ControlDecision, int, int]]:
    """(decision, start, end) for every applied decision, both ends inclusive.

    A decision stops being in force when it expires, when the controller
    revokes it, or when the same xApp replaces it on the same target.
    """
    out = []
    applied = gnb.applied
    for i, a in enumerate(applied):
        d = a.decision
        end = d.valid_until
        if d in gnb.revocations:
            end = min(end, gnb.revocations[d] - 1)
        for later in applied[i + 1:]:
            ld = later.decision
            if ld.xapp_id == d.xapp_id and ld.target == d.target:
                end = min(end, later.applied_at - 1)
                break
        out.append((d, a.applied_at, end))
    return out


def find_direct_overlaps(gnb: GnbState) -> list[tuple[ControlDecision, ControlDecision]]:
    """Pairs of applied decisions from different xApps that clash while both in force."""
    by_target: dict[ControlTarget, list] = {}
    for w in effective_windows(gnb):
        by_target.setdefault(w[0].target, []).append(w)
    clashes = []
    for windows in by_target.values():
        for i, (d1, s1, e1) in enumerate(windows):
            for d2, s2, e2 in windows[i + 1:]:
                if (d1.xapp_id != d2.xapp_id and d1.value != d2.value
                        and max(s1, s2) <= min(e1, e2)):
                    clashes.append((d1, d2))
    return clashes
