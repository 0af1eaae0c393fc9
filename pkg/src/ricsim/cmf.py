"""Central Controller: direct-conflict detection and priority-based resolution.

Every CONTROL message from an xApp lands here first. Each decision is checked
against the ledger of currently active decisions; a clash on the same control
target with a different value is resolved in favour of the higher-priority
xApp. Losing decisions are either rejected (when they are the newcomer) or
revoked (when they were already forwarded to the E2 node).
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .domain import ConfigurationError, ControlDecision, ControlTarget, E2ControlMessage
from .fabric import Endpoint, Envelope, Kind

log = logging.getLogger(__name__)


class Disposition(enum.Enum):
    FORWARDED = "Forwarded"
    REJECTED = "Rejected"
    REVOKED = "Revoked"


@dataclass(frozen=True)
class DispositionRecord:
    time_ms: int
    decision: ControlDecision
    disposition: Disposition
    conflict_id: Optional[int] = None
    winner: Optional[str] = None


@dataclass(frozen=True)
class Conflict:
    target: ControlTarget
    contenders: tuple[ControlDecision, ...]
    detected_at: int
    conflict_id: Optional[int] = None

    def __post_init__(self):
        if len(self.contenders) < 2:
            raise ValueError("a conflict needs at least two contenders")
        if any(c.target != self.target for c in self.contenders):
            raise ValueError("contenders must share the conflict target")
        ids = [c.xapp_id for c in self.contenders]
        if len(set(ids)) != len(ids):
            raise ValueError("contenders must come from distinct xApps")
        if len({c.value for c in self.contenders}) < 2:
            raise ValueError("same-value decisions do not conflict")


class ResolutionPolicy(enum.Enum):
    PRIORITY_REJECT = "PriorityReject"


@dataclass(frozen=True)
class Resolution:
    conflict: Conflict
    winner: str
    rejected: tuple[ControlDecision, ...]
    policy: ResolutionPolicy = ResolutionPolicy.PRIORITY_REJECT


class DecisionLedger:
    """Active decisions per control target plus an append-only audit."""

    def __init__(self):
        self.entries: dict[ControlTarget, list[ControlDecision]] = {}
        self.audit: list[DispositionRecord] = []

    def active(self, target: ControlTarget) -> list[ControlDecision]:
        return list(self.entries.get(target, ()))

    def record(self, decision: ControlDecision) -> None:
        """Store ``decision``, superseding the same xApp's older entry for its target."""
        bucket = self.entries.setdefault(decision.target, [])
        bucket[:] = [d for d in bucket if d.xapp_id != decision.xapp_id]
        bucket.append(decision)

    def remove(self, decision: ControlDecision) -> bool:
        bucket = self.entries.get(decision.target, [])
        if decision in bucket:
            bucket.remove(decision)
            if not bucket:
                del self.entries[decision.target]
            return True
        return False

    def __len__(self):
        return sum(len(v) for v in self.entries.values())


def expire(ledger: DecisionLedger, now: int) -> int:
    removed = 0
    for target in list(ledger.entries):
        keep = [d for d in ledger.entries[target] if d.valid_until >= now]
        removed += len(ledger.entries[target]) - len(keep)
        if keep:
            ledger.entries[target] = keep
        else:
            del ledger.entries[target]
    return removed


def detect_direct(ledger: DecisionLedger, decision: ControlDecision, now: int) -> list[Conflict]:
    others = [d for d in ledger.active(decision.target)
              if d.xapp_id != decision.xapp_id and d.active_at(now) and decision.active_at(now)]
    if not any(d.value != decision.value for d in others):
        return []
    return [Conflict(decision.target, tuple(others) + (decision,), now)]


def resolve(conflict: Conflict, priorities: Mapping[str, int]) -> Resolution:
    missing = [c.xapp_id for c in conflict.contenders if c.xapp_id not in priorities]
    if missing:
        raise ConfigurationError(f"no priority configured for {missing}")
    top = max(priorities[c.xapp_id] for c in conflict.contenders)
    leaders = sorted(c.xapp_id for c in conflict.contenders if priorities[c.xapp_id] == top)
    if len(leaders) > 1:
        log.warning("priority tie between %s on %s; picking %s",
                    leaders, conflict.target, leaders[0])
    winner = leaders[0]
    return Resolution(conflict, winner,
                      tuple(c for c in conflict.contenders if c.xapp_id != winner))


@dataclass(frozen=True)
class ForwardedControl:
    """What the controller sends to the E2 node: surviving decisions and withdrawals."""

    message: Optional[E2ControlMessage]
    revoked: tuple[ControlDecision, ...] = ()

    @property
    def decisions(self) -> tuple[ControlDecision, ...]:
        return self.message.decisions if self.message is not None else ()


@dataclass(frozen=True)
class RejectNotice:
    decisions: tuple[ControlDecision, ...]
    reason: str
    conflict_id: Optional[int] = None
    winner: Optional[str] = None


@dataclass
class CentralController:
    priorities: Mapping[str, int]
    enabled: bool = True
    ledger: DecisionLedger = field(default_factory=DecisionLedger)
    conflicts: list[Conflict] = field(default_factory=list)
    resolutions: list[Resolution] = field(default_factory=list)
    _pending_revocations: list[ControlDecision] = field(default_factory=list)

    @property
    def audit(self) -> list[DispositionRecord]:
        return self.ledger.audit

    def _log(self, rec: DispositionRecord) -> DispositionRecord:
        self.ledger.audit.append(rec)
        return rec

    def submit_control(self, msg: E2ControlMessage, now: int) -> list[DispositionRecord]:
        """Run CD and CR over every decision of ``msg``; returns one record per decision."""
        unknown = {d.xapp_id for d in msg.decisions} - set(self.priorities)
        if msg.sender not in self.priorities or unknown:
            raise ConfigurationError(f"unknown xApp {msg.sender!r}")
        if not self.enabled:
            return [self._log(DispositionRecord(now, d, Disposition.FORWARDED))
                    for d in msg.decisions]

        expire(self.ledger, now)
        out = []
        for decision in msg.decisions:
            if decision in self.ledger.active(decision.target):
                out.append(self._log(DispositionRecord(now, decision, Disposition.FORWARDED)))
                continue
            found = detect_direct(self.ledger, decision, now)
            if not found:
                self.ledger.record(decision)
                out.append(self._log(DispositionRecord(now, decision, Disposition.FORWARDED)))
                continue
            for conflict in found:
                conflict = Conflict(conflict.target, conflict.contenders, now, len(self.conflicts) + 1)
                self.conflicts.append(conflict)
                res = resolve(conflict, self.priorities)
                self.resolutions.append(res)
                for loser in res.rejected:
                    if loser is decision:
                        continue
                    self.ledger.remove(loser)
                    self._pending_revocations.append(loser)
                    self._log(DispositionRecord(now, loser, Disposition.REVOKED,
                                                conflict.conflict_id, res.winner))
                if res.winner == decision.xapp_id:
                    self.ledger.record(decision)
                    out.append(self._log(DispositionRecord(
                        now, decision, Disposition.FORWARDED, conflict.conflict_id, res.winner)))
                else:
                    out.append(self._log(DispositionRecord(
                        now, decision, Disposition.REJECTED, conflict.conflict_id, res.winner)))
        return out

    def take_revocations(self) -> tuple[ControlDecision, ...]:
        out = tuple(self._pending_revocations)
        self._pending_revocations.clear()
        return out

    def handle(self, endpoint: Endpoint, env: Envelope) -> None:
        """Fabric glue: process a diverted CONTROL envelope."""
        if env.kind is not Kind.CONTROL:
            return
        msg: E2ControlMessage = env.payload
        now = endpoint.fabric.queue.now
        try:
            records = self.submit_control(msg, now)
        except ConfigurationError as exc:
            log.error("rejecting message from %s: %s", env.sender, exc)
            endpoint.send(Kind.REJECT, env.sender, RejectNotice(msg.decisions, str(exc)))
            return
        forwarded = tuple(r.decision for r in records if r.disposition is Disposition.FORWARDED)
        revoked = self.take_revocations()
        if forwarded or revoked:
            out = (E2ControlMessage(msg.sender, forwarded, msg.sequence_no, msg.sent_at)
                   if forwarded else None)
            endpoint.send(Kind.CONTROL, env.original_to or env.to, ForwardedControl(out, revoked))
        rejected = [r for r in records if r.disposition is Disposition.REJECTED]
        if rejected:
            endpoint.send(Kind.REJECT, env.sender,
                          RejectNotice(tuple(r.decision for r in rejected), "direct conflict",
                                       rejected[0].conflict_id, rejected[0].winner))
