"""Message routing between RIC components, standing in for the RIC Message Router.

Everything runs on a single heap-ordered event queue. Control envelopes
addressed to an E2 node are always diverted to the Central Controller.
"""
from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional

# Ordering of work that shares a timestamp. Deliveries pushed while handling a
# later phase still pop before the next SAMPLE, since the heap only compares keys.
PHASE_SCENARIO = 0
PHASE_REPORT = 1
PHASE_DELIVERY = 2
PHASE_TICK = 3
PHASE_SAMPLE = 4


class EventQueue:
    def __init__(self):
        self._heap: list = []
        self._counter = itertools.count()
        self.now = 0

    def push(self, time: int, phase: int, key: tuple, action: Callable[[], None]) -> None:
        if time < self.now:
            raise ValueError(f"cannot schedule at {time} before now={self.now}")
        heapq.heappush(self._heap, (time, phase, key, next(self._counter), action))

    def __len__(self):
        return len(self._heap)

    def run(self, until: int) -> None:
        """Pop and execute events with time < until."""
        while self._heap and self._heap[0][0] < until:
            time, _, _, _, action = heapq.heappop(self._heap)
            self.now = time
            action()
        self.now = max(self.now, until)


class Kind(enum.Enum):
    REPORT = "Report"
    CONTROL = "Control"
    ACK = "Ack"
    REJECT = "Reject"


@dataclass(frozen=True)
class Envelope:
    kind: Kind
    payload: Any
    sender: str
    to: str
    seq: int
    sent_at: int
    delivered_at: int = -1
    original_to: Optional[str] = None


class RoutingError(LookupError):
    pass


@dataclass
class Endpoint:
    """Handle returned by :meth:`MessageFabric.register_endpoint`."""

    id: str
    fabric: "MessageFabric"
    handler: Optional[Callable[[Envelope], None]] = None
    _next_seq: int = 0

    def send(self, kind: Kind, to: str, payload: Any) -> Envelope:
        env = Envelope(kind, payload, self.id, to, self._next_seq, self.fabric.queue.now)
        self._next_seq += 1
        return self.fabric.route(env)


@dataclass(frozen=True)
class AuditRecord:
    envelope: Envelope
    delivered_to: str


class MessageFabric:
    def __init__(self, queue: EventQueue, controller_id: str = "cc-0",
                 e2_nodes: tuple[str, ...] = ("gnb-0",), latency_ms: int = 0):
        if latency_ms < 0:
            raise ValueError("latency must be non-negative")
        self.queue = queue
        self.controller_id = controller_id
        self.e2_nodes = frozenset(e2_nodes)
        self.latency_ms = latency_ms
        self.endpoints: dict[str, Endpoint] = {}
        self.audit: list[AuditRecord] = []

    def register_endpoint(self, id: str, handler: Optional[Callable[[Envelope], None]] = None) -> Endpoint:
        if id in self.endpoints:
            raise ValueError(f"endpoint {id!r} already registered")
        ep = Endpoint(id, self, handler)
        self.endpoints[id] = ep
        return ep

    def route(self, env: Envelope) -> Envelope:
        """Enqueue delivery of ``env``; returns the envelope as it will be delivered."""
        for name in (env.sender, env.to):
            if name not in self.endpoints:
                raise RoutingError(f"unknown endpoint {name!r}")
        dest = env.to
        if (env.kind is Kind.CONTROL and env.to in self.e2_nodes
                and env.sender != self.controller_id):
            if self.controller_id not in self.endpoints:
                raise RoutingError("control interception requires a registered controller")
            dest = self.controller_id
        env = replace(env, to=dest, delivered_at=env.sent_at + self.latency_ms,
                      original_to=env.to if dest != env.to else None)
        self.queue.push(env.delivered_at, PHASE_DELIVERY, (env.sender, env.seq),
                        lambda: self._deliver(env))
        return env

    def _deliver(self, env: Envelope) -> None:
        self.audit.append(AuditRecord(env, env.to))
        handler = self.endpoints[env.to].handler
        if handler is not None:
            handler(env)

    def uncontrolled_e2_deliveries(self) -> list[AuditRecord]:
        """Control envelopes that reached an E2 node without coming from the controller."""
        return [r for r in self.audit
                if r.envelope.kind is Kind.CONTROL and r.delivered_to in self.e2_nodes
                and r.envelope.sender != self.controller_id]
