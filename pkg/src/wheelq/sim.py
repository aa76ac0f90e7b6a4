"""Deterministic fail-stop simulation of a replicated wheel store.

Events run strictly in order on one thread.  Failures land between
operations, never inside one.  ``crash``/``recover`` name a physical site by
the index it had when the wheel was built (site ``sites[node]``), because
elections keep rebinding logical IDs while a run is in progress.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import ElectionFailed, QuorumUnavailable, ScenarioError
from .quorum import Rng, election_quorum
from .store import INITIAL_PAYLOAD, StoreState, oracle_for, read_with_quorum, write_with_quorum
from .topology import HUB, MIN_NODES, Wheel, default_sites

log = logging.getLogger(__name__)

READ, WRITE, CRASH, RECOVER, OVERLOAD = "read", "write", "crash", "recover", "overload_check"
KINDS = (READ, WRITE, CRASH, RECOVER, OVERLOAD)

DEFAULT_LOAD_THRESHOLD = 100
SCENARIO_FORMAT = "wheelq-scenario"
TRACE_FORMAT = "wheelq-trace"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: Any = None
    node: int | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"seq": self.seq, "kind": self.kind}
        if self.kind == WRITE:
            d["payload"] = self.payload
        if self.kind in (CRASH, RECOVER):
            d["node"] = self.node
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Event:
        try:
            return cls(int(d["seq"]), d["kind"], d.get("payload"), d.get("node"))
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"bad event record {d!r}") from e


@dataclass
class Scenario:
    n: int
    seed: int
    events: list[Event]
    load_threshold: int = DEFAULT_LOAD_THRESHOLD
    fallback_reads: bool = False
    sites: list[str] | None = None
    suc: list[int | None] | None = None

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < MIN_NODES:
            raise ScenarioError(f"n must be an integer >= {MIN_NODES}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be a 64-bit unsigned integer")
        if not isinstance(self.load_threshold, int) or self.load_threshold < 1:
            raise ScenarioError("load_threshold must be >= 1")
        last = None
        for ev in self.events:
            if ev.kind not in KINDS:
                raise ScenarioError(f"unknown event kind {ev.kind!r}")
            if last is not None and ev.seq <= last:
                raise ScenarioError(f"event seq {ev.seq} does not increase")
            last = ev.seq
            if ev.kind in (CRASH, RECOVER) and not (isinstance(ev.node, int) and 0 <= ev.node < self.n):
                raise ScenarioError(f"event {ev.seq}: node {ev.node!r} outside 0..{self.n - 1}")

    def build_wheel(self) -> Wheel:
        return Wheel(self.n, self.sites or default_sites(self.n), self.suc)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "format": SCENARIO_FORMAT, "version": FORMAT_VERSION,
            "n": self.n, "seed": self.seed, "load_threshold": self.load_threshold,
            "fallback_reads": self.fallback_reads,
        }
        if self.sites is not None:
            d["sites"] = self.sites
        if self.suc is not None:
            d["suc"] = self.suc
        d["events"] = [e.to_dict() for e in self.events]
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Scenario:
        """Load a scenario document; a ``generator`` block stands in for ``events``."""
        if d.get("format", SCENARIO_FORMAT) != SCENARIO_FORMAT:
            raise ScenarioError(f"unexpected format {d.get('format')!r}")
        if d.get("version", FORMAT_VERSION) != FORMAT_VERSION:
            raise ScenarioError(f"unsupported scenario version {d.get('version')!r}")
        try:
            n, seed = d["n"], d.get("seed", 0)
            threshold = d.get("load_threshold", DEFAULT_LOAD_THRESHOLD)
            if "generator" in d:
                g = d["generator"]
                sc = random_scenario(n, seed, int(g["steps"]), float(g.get("p_crash", 0.0)),
                                     float(g.get("p_recover", 0.0)), float(g.get("read_fraction", 0.5)),
                                     load_threshold=threshold)
                events = sc.events
            else:
                events = []
                for k, e in enumerate(d["events"]):
                    e = dict(e)
                    e.setdefault("seq", k)
                    events.append(Event.from_dict(e))
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"malformed scenario: {e}") from e
        sc = cls(n, seed, events, threshold, bool(d.get("fallback_reads", False)),
                 d.get("sites"), d.get("suc"))
        sc.validate()
        return sc


@dataclass
class TraceRecord:
    event: Event
    ok: bool
    hub_site: Any
    elections: int
    value: Any = None
    version: int | None = None
    quorum: list[int] | None = None
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        d = self.event.to_dict()
        d.update(ok=self.ok, value=self.value, version=self.version, quorum=self.quorum,
                 hub_site=self.hub_site, elections=self.elections, error=self.error)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> TraceRecord:
        try:
            return cls(Event.from_dict(d), bool(d["ok"]), d["hub_site"], int(d["elections"]),
                       d.get("value"), d.get("version"), d.get("quorum"), d.get("error"))
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"bad trace record {d!r}") from e


@dataclass
class Metrics:
    reads_ok: int = 0
    reads_failed: int = 0
    writes_ok: int = 0
    writes_failed: int = 0
    elections: int = 0
    elections_failed: int = 0
    read_quorum_size_histogram: Counter = field(default_factory=Counter)
    write_quorum_size_histogram: Counter = field(default_factory=Counter)
    hub_tenure_distribution: Counter = field(default_factory=Counter)

    def to_dict(self) -> dict[str, Any]:
        def hist(c: Counter) -> dict[str, int]:
            return {str(k): c[k] for k in sorted(c, key=str)}

        return {
            "reads_ok": self.reads_ok, "reads_failed": self.reads_failed,
            "writes_ok": self.writes_ok, "writes_failed": self.writes_failed,
            "elections": self.elections, "elections_failed": self.elections_failed,
            "read_quorum_size_histogram": hist(self.read_quorum_size_histogram),
            "write_quorum_size_histogram": hist(self.write_quorum_size_histogram),
            "hub_tenure_distribution": hist(self.hub_tenure_distribution),
        }


def _run_rng(seed: int) -> Rng:
    return Rng(f"wheelq-run/{seed}")


def _gen_rng(seed: int) -> Rng:
    return Rng(f"wheelq-gen/{seed}")


class Simulation:
    """Owns the store, rng and counters for one scenario run."""

    def __init__(self, sc: Scenario):
        sc.validate()
        self.sc = sc
        self.wheel = sc.build_wheel()
        self.site_of_node = [self.wheel.resolve(i) for i in range(sc.n)]
        self.store = StoreState(self.wheel, fallback_reads=sc.fallback_reads)
        self.rng = _run_rng(sc.seed)
        self.metrics = Metrics()
        self.hub_reads = 0

    def _elect(self) -> bool:
        before = self.wheel.resolve(HUB)
        try:
            election_quorum(self.wheel, oracle_for(self.store), HUB, self.rng)
        except QuorumUnavailable:
            self.metrics.elections_failed += 1
            return False
        assert self.wheel.resolve(HUB) != before
        self.metrics.elections += 1
        self.hub_reads = 0
        return True

    def _note_hub_change(self, before: Any) -> None:
        # an election inside a read/write always moves logical 0 to a new site
        if self.wheel.resolve(HUB) != before:
            self.metrics.elections += 1
            self.hub_reads = 0

    def step(self, ev: Event) -> TraceRecord:
        m = self.metrics
        rec = dict(ok=True)
        hub_before = self.wheel.resolve(HUB)
        if ev.kind == CRASH:
            self.store.crash(self.site_of_node[ev.node])
        elif ev.kind == RECOVER:
            self.store.recover(self.site_of_node[ev.node])
        elif ev.kind == OVERLOAD:
            rec["ok"] = self._elect()
        elif ev.kind == WRITE:
            try:
                version, q = write_with_quorum(self.store, ev.payload, self.rng, HUB)
            except QuorumUnavailable as e:
                m.writes_failed += 1
                rec.update(ok=False, error=type(e).__name__)
                m.elections_failed += isinstance(e, ElectionFailed)
            else:
                m.writes_ok += 1
                m.write_quorum_size_histogram[len(q)] += 1
                rec.update(value=ev.payload, version=version, quorum=list(q.members))
            self._note_hub_change(hub_before)
        elif ev.kind == READ:
            try:
                value, version, q = read_with_quorum(self.store, self.rng)
            except QuorumUnavailable as e:
                m.reads_failed += 1
                rec.update(ok=False, error=type(e).__name__)
                m.elections_failed += isinstance(e, ElectionFailed)
                self._note_hub_change(hub_before)
            else:
                m.reads_ok += 1
                m.read_quorum_size_histogram[len(q)] += 1
                rec.update(value=value, version=version, quorum=list(q.members))
                self._note_hub_change(hub_before)
                if HUB in q:
                    self.hub_reads += 1
                    if self.hub_reads >= self.sc.load_threshold:
                        log.debug("seq %d: HUB %s hit load threshold", ev.seq, self.wheel.resolve(HUB))
                        self._elect()
        hub = self.wheel.resolve(HUB)
        m.hub_tenure_distribution[hub] += 1
        return TraceRecord(ev, hub_site=hub, elections=m.elections, **rec)

    def run(self) -> list[TraceRecord]:
        return [self.step(ev) for ev in self.sc.events]


def run_scenario(sc: Scenario) -> tuple[list[TraceRecord], Metrics]:
    sim = Simulation(sc)
    return sim.run(), sim.metrics


def check_one_copy(trace: Iterable[TraceRecord]) -> bool:
    """Replay a shadow register; every successful read must match it exactly."""
    return first_violation(trace) is None


def first_violation(trace: Iterable[TraceRecord]) -> TraceRecord | None:
    shadow_value, shadow_version = INITIAL_PAYLOAD, 0
    for rec in trace:
        if not rec.ok:
            continue
        if rec.event.kind == WRITE:
            if rec.version is None or rec.version <= shadow_version or rec.value != rec.event.payload:
                return rec
            shadow_value, shadow_version = rec.value, rec.version
        elif rec.event.kind == READ:
            if (rec.value, rec.version) != (shadow_value, shadow_version):
                return rec
    return None


def random_scenario(n: int, seed: int, steps: int, p_crash: float, p_recover: float,
                    read_fraction: float, load_threshold: int = DEFAULT_LOAD_THRESHOLD) -> Scenario:
    """Generate a scenario of ``steps`` operations with interleaved failures.

    Each step may crash one live site (probability ``p_crash``; dropped when
    only one site is up), may recover one crashed site (``p_recover``), and
    then issues one read or write.
    """
    for name, p in (("p_crash", p_crash), ("p_recover", p_recover), ("read_fraction", read_fraction)):
        if not 0.0 <= p <= 1.0:
            raise ScenarioError(f"{name}={p} is not a probability")
    if n < MIN_NODES:
        raise ScenarioError(f"n must be >= {MIN_NODES}")
    if steps < 0:
        raise ScenarioError("steps must be non-negative")
    rng = _gen_rng(seed)
    up = set(range(n))
    events: list[Event] = []

    def emit(kind, **kw):
        events.append(Event(len(events), kind, **kw))

    for step in range(steps):
        if rng.random() < p_crash and len(up) > 1:
            node = rng.choice(sorted(up))
            up.discard(node)
            emit(CRASH, node=node)
        if rng.random() < p_recover and len(up) < n:
            node = rng.choice(sorted(set(range(n)) - up))
            up.add(node)
            emit(RECOVER, node=node)
        if rng.random() < read_fraction:
            emit(READ)
        else:
            emit(WRITE, payload=step)
    sc = Scenario(n, seed, events, load_threshold)
    sc.validate()
    return sc


def trace_header(sc: Scenario) -> dict[str, Any]:
    return {"format": TRACE_FORMAT, "version": FORMAT_VERSION, "n": sc.n, "seed": sc.seed,
            "load_threshold": sc.load_threshold, "fallback_reads": sc.fallback_reads}


def dump_trace(sc: Scenario, trace: list[TraceRecord], fp) -> None:
    fp.write(json.dumps(trace_header(sc)) + "\n")
    for rec in trace:
        fp.write(json.dumps(rec.to_dict()) + "\n")
    fp.write(json.dumps({"end": True, "records": len(trace)}) + "\n")


def load_trace(lines: Iterable[str]) -> tuple[dict[str, Any], list[TraceRecord]]:
    """Parse a trace file; raises ScenarioError on anything malformed or truncated."""
    try:
        docs = [json.loads(line) for line in lines if line.strip()]
    except json.JSONDecodeError as e:
        raise ScenarioError(f"unparseable trace line: {e}") from e
    if not docs or not isinstance(docs[0], dict) or docs[0].get("format") != TRACE_FORMAT:
        raise ScenarioError("missing trace header")
    if docs[0].get("version") != FORMAT_VERSION:
        raise ScenarioError(f"unsupported trace version {docs[0].get('version')!r}")
    if len(docs) < 2 or docs[-1] != {"end": True, "records": len(docs) - 2}:
        raise ScenarioError("trace is truncated (missing or inconsistent end marker)")
    return docs[0], [TraceRecord.from_dict(d) for d in docs[1:-1]]


def metrics_from_trace(trace: Iterable[TraceRecord]) -> Metrics:
    """Recount metrics from a trace alone (election failures are not visible there)."""
    m = Metrics()
    for rec in trace:
        kind = rec.event.kind
        if kind == READ:
            if rec.ok:
                m.reads_ok += 1
                m.read_quorum_size_histogram[len(rec.quorum)] += 1
            else:
                m.reads_failed += 1
        elif kind == WRITE:
            if rec.ok:
                m.writes_ok += 1
                m.write_quorum_size_histogram[len(rec.quorum)] += 1
            else:
                m.writes_failed += 1
        m.hub_tenure_distribution[rec.hub_site] += 1
        m.elections = rec.elections
    return m


def check_snapshot(copies: list[Mapping[str, Any]], trace: Iterable[TraceRecord]) -> bool:
    """The copy at logical 0 must hold the last committed write and nothing may be newer."""
    value, version = INITIAL_PAYLOAD, 0
    for rec in trace:
        if rec.ok and rec.event.kind == WRITE:
            value, version = rec.value, rec.version
    hub = [c for c in copies if c.get("logical_id") == HUB]
    if len(hub) != 1:
        return False
    if (hub[0].get("value"), hub[0].get("version")) != (value, version):
        return False
    return all(c.get("version", 0) <= version for c in copies)
