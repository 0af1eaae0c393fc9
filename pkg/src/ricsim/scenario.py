"""Scenario definition, config loading and the simulation event loop."""
from __future__ import annotations

import configparser
import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .cmf import CentralController, Conflict, DispositionRecord, ForwardedControl
from .domain import CellConfig, E2ControlMessage, ScenarioError
from .fabric import (PHASE_REPORT, PHASE_SAMPLE, PHASE_SCENARIO, PHASE_TICK, AuditRecord,
                     Envelope, EventQueue, Kind, MessageFabric)
from .ran import (AppliedDecision, GnbState, ThroughputModelParams, ThroughputSample,
                  apply_control, attach_ue, detach_ue, find_direct_overlaps, record_revocations,
                  sample_throughput, snapshot)
from .stats import StatisticsError, per_ue_stats
from .xapps import XappConfig, XappHost, XappKind

log = logging.getLogger(__name__)

GNB_ID = "gnb-0"
CONTROLLER_ID = "cc-0"
NO_CM = "No CM"
CMF = "CMF"


@dataclass(frozen=True)
class UeEvent:
    time: int
    action: str  # "attach" | "detach"
    ue_id: str
    slice: Optional[str] = None


@dataclass(frozen=True)
class Scenario:
    cell: CellConfig
    xapps: tuple[XappConfig, ...]
    model: ThroughputModelParams = ThroughputModelParams()
    initial_ues: tuple[tuple[str, str], ...] = ()
    events: tuple[UeEvent, ...] = ()
    duration_ms: int = 420_000
    warmup_cutoff_ms: int = 120_000
    cm_enabled: bool = True
    seed: int = 0
    replications: int = 10
    latency_ms: int = 0

    def validate(self) -> None:
        if self.duration_ms <= 0:
            raise ScenarioError("duration must be positive")
        if not 0 <= self.warmup_cutoff_ms < self.duration_ms:
            raise ScenarioError("warmup cutoff must lie in [0, duration)")
        if self.latency_ms < 0:
            raise ScenarioError("latency must be non-negative")
        if self.replications < 1:
            raise ScenarioError("replications must be >= 1")
        ids = [x.xapp_id for x in self.xapps]
        if len(set(ids)) != len(ids):
            raise ScenarioError(f"duplicate xApp ids {ids}")
        if {GNB_ID, CONTROLLER_ID} & set(ids):
            raise ScenarioError("xApp ids clash with reserved endpoint names")
        for x in self.xapps:
            if x.kind is XappKind.PRIORITY_SLICE and x.prioritized_slice not in self.cell.slices:
                raise ScenarioError(f"{x.xapp_id}: unknown prioritized slice {x.prioritized_slice}")
        for prev, ev in zip(self.events, self.events[1:]):
            if ev.time <= prev.time:
                raise ScenarioError("events must be strictly time-ordered")
        present = {ue for ue, _ in self.initial_ues}
        if len(present) != len(self.initial_ues):
            raise ScenarioError("duplicate initial UE")
        for ue, s in self.initial_ues:
            if s not in self.cell.slices:
                raise ScenarioError(f"UE {ue}: unknown slice {s}")
        for ev in self.events:
            if not 0 <= ev.time < self.duration_ms:
                raise ScenarioError(f"event at {ev.time} ms lies outside the run")
            if ev.action == "attach":
                if ev.ue_id in present or ev.slice not in self.cell.slices:
                    raise ScenarioError(f"bad attach of {ev.ue_id} at {ev.time} ms")
                present.add(ev.ue_id)
            elif ev.action == "detach":
                if ev.ue_id not in present:
                    raise ScenarioError(f"detach of unknown UE {ev.ue_id} at {ev.time} ms")
                present.discard(ev.ue_id)
            else:
                raise ScenarioError(f"unknown event action {ev.action!r}")


def two_slice_scenario(cm_enabled: bool = True, seed: int = 0, noise_sigma: float = 0.03,
                   **overrides) -> Scenario:
    """Two slices, ue-0/ue-1 from the start, ue-2 joins slice A after one minute."""
    xapps = (
        XappConfig("xapp-1", XappKind.PRIORITY_SLICE, priority=10, phase_offset=0,
                   prioritized_slice="A"),
        XappConfig("xapp-2", XappKind.EQUAL_SPLIT, priority=5, phase_offset=5000),
    )
    sc = Scenario(
        cell=CellConfig(100, ("A", "B")),
        xapps=xapps,
        model=ThroughputModelParams(noise_sigma=noise_sigma),
        initial_ues=(("ue-0", "A"), ("ue-1", "B")),
        events=(UeEvent(60_000, "attach", "ue-2", "A"),),
        cm_enabled=cm_enabled,
        seed=seed,
    )
    return replace(sc, **overrides)


# -- config files -----------------------------------------------------------

def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ScenarioError(f"not a boolean: {text!r}")


def parse_config(text: str) -> Scenario:
    """Build a Scenario from INI-style text (see configs/two_slice.ini for the keys)."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
        return _scenario_from(cp)
    except (configparser.Error, ValueError, KeyError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"bad config: {exc}") from exc


def _scenario_from(cp: configparser.ConfigParser) -> Scenario:
    cell_sec = cp["cell"]
    cell = CellConfig(
        total_prbs=cell_sec.getint("total_prbs"),
        slices=tuple(s.strip() for s in cell_sec.get("slices", "A, B").split(",") if s.strip()),
        min_prbs_per_slice=cell_sec.getint("min_prbs_per_slice", 0),
        cell_id=cell_sec.get("id", "cell-0"),
    )
    xapps = []
    for name in cp.sections():
        if not name.startswith("xapp."):
            continue
        sec = cp[name]
        ttl = sec.get("ttl")
        xapps.append(XappConfig(
            xapp_id=sec.get("id", "xapp-" + name.split(".", 1)[1]),
            kind=XappKind(sec.get("kind")),
            priority=sec.getint("priority", 0),
            period=sec.getint("period", 10_000),
            phase_offset=sec.getint("phase", 0),
            prioritized_slice=sec.get("prioritized_slice"),
            decision_ttl=int(ttl) if ttl else None,
        ))
    model = ThroughputModelParams()
    if cp.has_section("model"):
        m = cp["model"]
        model = ThroughputModelParams(m.getfloat("kappa", model.rate_per_prb),
                                      m.getfloat("sigma", model.noise_sigma),
                                      m.getint("sample_interval", model.sample_interval))
    initial = tuple((ue, s.strip()) for ue, s in cp["ues"].items()) if cp.has_section("ues") else ()
    events = []
    if cp.has_section("events"):
        for line in cp["events"].get("list", "").splitlines():
            parts = line.split()
            if not parts:
                continue
            if len(parts) not in (3, 4):
                raise ScenarioError(f"bad event line {line!r}")
            events.append(UeEvent(int(parts[0]), parts[1], parts[2],
                                  parts[3] if len(parts) == 4 else None))
    run = cp["run"] if cp.has_section("run") else {}
    sc = Scenario(
        cell=cell, xapps=tuple(xapps), model=model, initial_ues=initial, events=tuple(events),
        duration_ms=int(run.get("duration", 420_000)),
        warmup_cutoff_ms=int(run.get("cutoff", 120_000)),
        cm_enabled=_bool(run.get("cm", "on")),
        seed=int(run.get("seed", 0)),
        replications=int(run.get("replications", 10)),
        latency_ms=cp.getint("fabric", "latency", fallback=0),
    )
    sc.validate()
    return sc


def load_config(path: str | Path) -> Scenario:
    return parse_config(Path(path).read_text())


# -- event loop -------------------------------------------------------------

@dataclass
class RunResult:
    scenario: Scenario
    samples: list[ThroughputSample]
    dispositions: list[DispositionRecord]
    per_ue_stats: dict[str, tuple[float, float]]
    gnb: GnbState
    envelope_audit: list[AuditRecord] = field(default_factory=list)
    conflicts: list[Conflict] = field(default_factory=list)
    skipped_ticks: dict[str, list[int]] = field(default_factory=dict)
    nacks: list[str] = field(default_factory=list)
    uncontrolled_deliveries: list[AuditRecord] = field(default_factory=list)

    def series(self, ue_id: str) -> list[tuple[int, float]]:
        return [(s.time, s.throughput_mbps) for s in self.samples if s.ue_id == ue_id]

    @property
    def applied(self) -> list[AppliedDecision]:
        return self.gnb.applied

    def direct_overlaps(self):
        return find_direct_overlaps(self.gnb)


class Simulation:
    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.scenario = scenario
        self.queue = EventQueue()
        self.fabric = MessageFabric(self.queue, CONTROLLER_ID, (GNB_ID,), scenario.latency_ms)
        self.gnb = GnbState(scenario.cell)
        self.controller = CentralController({x.xapp_id: x.priority for x in scenario.xapps},
                                            enabled=scenario.cm_enabled)
        self.rng = random.Random(scenario.seed)
        self.samples: list[ThroughputSample] = []
        self.nacks: list[str] = []

        self.gnb_ep = self.fabric.register_endpoint(GNB_ID, self._on_gnb)
        cc_ep = self.fabric.register_endpoint(CONTROLLER_ID)
        cc_ep.handler = lambda env: self.controller.handle(cc_ep, env)
        self.hosts: dict[str, XappHost] = {}
        self.xapp_eps = {}
        for x in scenario.xapps:
            host = XappHost(x, GNB_ID)
            self.hosts[x.xapp_id] = host
            self.xapp_eps[x.xapp_id] = self.fabric.register_endpoint(x.xapp_id, host.receive)

    def _on_gnb(self, env: Envelope) -> None:
        if env.kind is not Kind.CONTROL:
            return
        payload = env.payload
        now = self.queue.now
        if isinstance(payload, ForwardedControl):
            record_revocations(self.gnb, payload.revoked, now)
            decisions = payload.decisions
        elif isinstance(payload, E2ControlMessage):
            decisions = payload.decisions
        else:
            raise TypeError(f"unexpected control payload {type(payload).__name__}")
        if not decisions:
            return
        ack = apply_control(self.gnb, decisions, now)
        if not ack.ok:
            log.warning("gNB nack at %d ms: %s", now, ack.violation)
            self.nacks.append(ack.violation)
        self.gnb_ep.send(Kind.ACK if ack.ok else Kind.REJECT, env.sender, ack)

    def _schedule(self) -> None:
        sc = self.scenario
        for i, ev in enumerate(sc.events):
            self.queue.push(ev.time, PHASE_SCENARIO, (i,), lambda ev=ev: self._apply_event(ev))
        for x in sc.xapps:
            for t in range(x.phase_offset, sc.duration_ms, x.period):
                report_at = max(t - sc.latency_ms, 0)
                self.queue.push(report_at, PHASE_REPORT, (x.xapp_id,),
                                lambda x=x: self.gnb_ep.send(
                                    Kind.REPORT, x.xapp_id, snapshot(self.gnb, self.queue.now)))
                self.queue.push(t, PHASE_TICK, (x.xapp_id,),
                                lambda x=x: self.hosts[x.xapp_id].tick(
                                    self.xapp_eps[x.xapp_id], self.queue.now))
        for t in range(0, sc.duration_ms, sc.model.sample_interval):
            self.queue.push(t, PHASE_SAMPLE, (), self._sample)

    def _apply_event(self, ev: UeEvent) -> None:
        if ev.action == "attach":
            attach_ue(self.gnb, ev.ue_id, ev.slice, ev.time)
        else:
            detach_ue(self.gnb, ev.ue_id, ev.time)

    def _sample(self) -> None:
        self.samples.extend(sample_throughput(self.gnb, self.scenario.model, self.rng,
                                              self.queue.now))

    def run(self) -> RunResult:
        sc = self.scenario
        for ue, s in sc.initial_ues:
            attach_ue(self.gnb, ue, s, 0)
        self._schedule()
        self.queue.run(until=sc.duration_ms)

        stats = {}
        ue_ids = list(dict.fromkeys(s.ue_id for s in self.samples))
        for ue in ue_ids:
            series = [(s.time, s.throughput_mbps) for s in self.samples if s.ue_id == ue]
            try:
                stats[ue] = per_ue_stats(series, sc.warmup_cutoff_ms)
            except StatisticsError:
                log.info("UE %s has too few post-warmup samples; left out of statistics", ue)
        return RunResult(
            scenario=sc,
            samples=self.samples,
            dispositions=list(self.controller.audit),
            per_ue_stats=stats,
            gnb=self.gnb,
            envelope_audit=list(self.fabric.audit),
            conflicts=list(self.controller.conflicts),
            skipped_ticks={k: h.skipped_ticks for k, h in self.hosts.items()},
            nacks=self.nacks,
            uncontrolled_deliveries=self.fabric.uncontrolled_e2_deliveries(),
        )


def run(scenario: Scenario) -> RunResult:
    return Simulation(scenario).run()


def run_replications(scenario: Scenario, n: Optional[int] = None) -> list[RunResult]:
    """Runs with seeds seed, seed+1, ..., seed+n-1."""
    n = scenario.replications if n is None else n
    return [run(replace(scenario, seed=scenario.seed + i)) for i in range(n)]


def category_label(cm_enabled: bool) -> str:
    return CMF if cm_enabled else NO_CM


def compare(scenario: Scenario, n: Optional[int] = None) -> dict[str, list[RunResult]]:
    """Run both experiment arms with identical seeds."""
    return {label: run_replications(replace(scenario, cm_enabled=cm), n)
            for label, cm in ((NO_CM, False), (CMF, True))}
