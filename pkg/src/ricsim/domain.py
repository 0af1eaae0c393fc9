"""Value types shared by the RIC, the xApps and the simulated gNB.

Simulated time is integer milliseconds everywhere.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

SliceId = str


class ScenarioError(ValueError):
    """Invalid configuration or scenario state. Maps to CLI exit code 1."""


class ConfigurationError(ScenarioError):
    pass


@dataclass(frozen=True)
class CellConfig:
    total_prbs: int
    slices: tuple[SliceId, ...]
    min_prbs_per_slice: int = 0
    cell_id: str = "cell-0"

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        if self.total_prbs < 1:
            raise ScenarioError(f"total_prbs must be >= 1, got {self.total_prbs}")
        if not self.slices:
            raise ScenarioError("a cell needs at least one slice")
        if any(not s for s in self.slices):
            raise ScenarioError("slice ids must be non-empty")
        if len(set(self.slices)) != len(self.slices):
            raise ScenarioError(f"duplicate slice ids in {self.slices}")
        if self.min_prbs_per_slice < 0:
            raise ScenarioError("min_prbs_per_slice must be non-negative")
        if len(self.slices) * self.min_prbs_per_slice > self.total_prbs:
            raise ScenarioError("slice PRB floor exceeds the cell total")

    @property
    def slice_count(self) -> int:
        return len(self.slices)


@dataclass(frozen=True, eq=False)
class PrbAllocation:
    """Per-slice PRB quotas. Read-only after construction."""

    per_slice: Mapping[SliceId, int]

    def __post_init__(self):
        object.__setattr__(self, "per_slice", MappingProxyType(dict(self.per_slice)))

    def __getitem__(self, slice_id: SliceId) -> int:
        return self.per_slice[slice_id]

    def __eq__(self, other):
        if not isinstance(other, PrbAllocation):
            return NotImplemented
        return dict(self.per_slice) == dict(other.per_slice)

    def __hash__(self):
        return hash(tuple(sorted(self.per_slice.items())))

    def __repr__(self):
        inner = ", ".join(f"{k}:{v}" for k, v in self.per_slice.items())
        return f"PrbAllocation({{{inner}}})"

    @property
    def total(self) -> int:
        return sum(self.per_slice.values())

    def as_dict(self) -> dict[SliceId, int]:
        return dict(self.per_slice)


def validate_allocation(alloc: PrbAllocation, cell: CellConfig) -> Optional[str]:
    """Return None if ``alloc`` is admissible for ``cell``, else a short violation text."""
    if set(alloc.per_slice) != set(cell.slices):
        missing = sorted(set(cell.slices) - set(alloc.per_slice))
        extra = sorted(set(alloc.per_slice) - set(cell.slices))
        return f"slice set mismatch (missing {missing}, unknown {extra})"
    for s in cell.slices:
        if alloc[s] < 0:
            return f"negative count for slice {s}"
        if alloc[s] < cell.min_prbs_per_slice:
            return f"below minimum for slice {s} ({alloc[s]} < {cell.min_prbs_per_slice})"
    total = alloc.total
    if total > cell.total_prbs:
        return f"sum exceeds P ({total} > {cell.total_prbs})"
    if total < cell.total_prbs:
        return f"sum below P ({total} < {cell.total_prbs})"
    return None


class ControlParameter(enum.Enum):
    MAX_SLICE_PRB_QUOTA = "MaxSlicePrbQuota"


@dataclass(frozen=True)
class ControlTarget:
    cell_id: str
    slice_id: SliceId
    parameter: ControlParameter = ControlParameter.MAX_SLICE_PRB_QUOTA


@dataclass(frozen=True)
class ControlDecision:
    xapp_id: str
    target: ControlTarget
    value: int
    issued_at: int
    valid_until: int

    def __post_init__(self):
        if self.valid_until <= self.issued_at:
            raise ValueError("valid_until must be later than issued_at")
        if self.value < 0:
            raise ValueError("decision value must be non-negative")

    def active_at(self, now: int) -> bool:
        return self.issued_at <= now <= self.valid_until


@dataclass(frozen=True)
class E2ControlMessage:
    sender: str
    decisions: tuple[ControlDecision, ...]
    sequence_no: int
    sent_at: int

    def __post_init__(self):
        object.__setattr__(self, "decisions", tuple(self.decisions))
        if not self.decisions:
            raise ValueError("a control message carries at least one decision")
        if len({d.target.cell_id for d in self.decisions}) != 1:
            raise ValueError("all decisions in a message must share one cell")
        if any(d.issued_at != self.sent_at for d in self.decisions):
            raise ValueError("decision issue times must equal the message send time")

    @property
    def cell_id(self) -> str:
        return self.decisions[0].target.cell_id


@dataclass(frozen=True)
class RanSnapshot:
    cell: CellConfig
    ues_per_slice: Mapping[SliceId, int]
    current_allocation: PrbAllocation
    timestamp: int
    total_ues: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "ues_per_slice", MappingProxyType(dict(self.ues_per_slice)))
        total = sum(self.ues_per_slice.values())
        if self.total_ues == -1:
            object.__setattr__(self, "total_ues", total)
        elif self.total_ues != total:
            raise ValueError(f"total_ues={self.total_ues} but slices hold {total}")

    @property
    def slice_count(self) -> int:
        return self.cell.slice_count
