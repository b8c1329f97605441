"""Discrete-event simulation of TAS egress gates with ingress policing.

Every vertex runs on its own clock, offset from true time by a fixed
amount. Sources emit each frame at its planned transmission time on their
own clock (plus an anomaly shift once active). Switches police a frame when
its first bit arrives, enqueue it once the last bit is in, and transmit it
when the TAS gate of its queue opens with enough time left for the whole
frame. Link delays are drawn per frame from a seeded generator, so a run is
a pure function of its inputs.

Policing modes:

* ``none``: frames go to the queue the schedule planned for them;
* ``standard_psfp``: per-frame window lookup in the stream's own gate list;
* ``foodog``: Period-wise GCLs replayed into the Stream-wise GCL, then one
  indexed read per frame.
"""

from __future__ import annotations

import csv
import heapq
import logging
import random
from dataclasses import dataclass, field, replace

from .gclsynth import OPEN, GclSet, PeriodWiseGcl, StdPsfpGcl, StreamWiseGcl
from .model import Problem

log = logging.getLogger(__name__)

MODES = ("none", "standard_psfp", "foodog")

STREAM_BITS = 14
QUEUE_BITS = 3
MAX_STREAMS = 1 << STREAM_BITS
MAX_QUEUES = 1 << QUEUE_BITS

# event priorities at equal timestamps: arrivals (policing) first, then
# enqueues, then gate/port activity
_P_ARRIVE, _P_ENQUEUE, _P_EMIT, _P_PORT, _P_DELIVER = range(5)


@dataclass(frozen=True)
class FrameDescriptor:
    stream: int
    queue: int = 0
    discard: bool = False
    arrival: int = 0
    frame_index: int = 0

    def __post_init__(self):
        if not 0 <= self.stream < MAX_STREAMS:
            raise ValueError(f"stream id {self.stream} does not fit in {STREAM_BITS} bits")
        if not 0 <= self.queue < MAX_QUEUES:
            raise ValueError(f"queue id {self.queue} does not fit in {QUEUE_BITS} bits")

    def pack(self) -> int:
        """64-bit word: queue in bits 0-2, stream in 3-16, discard in bit 17."""
        return self.queue | (self.stream << QUEUE_BITS) | (int(self.discard) << (QUEUE_BITS + STREAM_BITS))

    @classmethod
    def unpack(cls, word: int, arrival: int = 0, frame_index: int = 0):
        return cls(
            stream=(word >> QUEUE_BITS) & (MAX_STREAMS - 1),
            queue=word & (MAX_QUEUES - 1),
            discard=bool((word >> (QUEUE_BITS + STREAM_BITS)) & 1),
            arrival=arrival,
            frame_index=frame_index,
        )


@dataclass
class UpdateUnit:
    """Walks one Period-wise GCL in time and writes due entries."""

    gcl: PeriodWiseGcl
    addr_ptr: int = 0
    cycle_start: int = 0
    last_time: int = 0

    @property
    def pgcl_cycle(self) -> int:
        return self.gcl.pgcl_cycle

    @property
    def local_phase(self) -> int:
        return self.last_time % self.gcl.pgcl_cycle


def gate_update_step(uu: UpdateUnit, sgcl: StreamWiseGcl, now: int) -> int:
    """Apply every entry due at or before ``now``; returns the write count.

    Entries addressing a gate beyond the table are skipped.
    """
    entries = uu.gcl.entries
    uu.last_time = max(uu.last_time, now)
    if not entries:
        return 0
    writes = 0
    while uu.cycle_start + entries[uu.addr_ptr].update_time <= now:
        e = entries[uu.addr_ptr]
        if e.gate_id < len(sgcl):
            sgcl[e.gate_id] = (e.gate_state, e.queue)
            writes += 1
        else:
            log.error("gate id %d outside the stream-wise table", e.gate_id)
        uu.addr_ptr += 1
        if uu.addr_ptr == len(entries):
            uu.addr_ptr = 0
            uu.cycle_start += uu.gcl.pgcl_cycle
    return writes


def police_foodog(fd: FrameDescriptor, sgcl: StreamWiseGcl) -> FrameDescriptor:
    """One read at ``sgcl[fd.stream]``. Out-of-range ids are discarded."""
    if fd.stream >= len(sgcl):
        log.error("stream %d outside the stream-wise table (%d entries)", fd.stream, len(sgcl))
        return replace(fd, discard=True)
    state, queue = sgcl[fd.stream]
    if state == OPEN:
        return replace(fd, discard=False, queue=queue)
    return replace(fd, discard=True)


def police_standard(fd: FrameDescriptor, gcl: StdPsfpGcl, now: int,
                    cycle: int | None = None) -> FrameDescriptor:
    """Look up the entry in force at ``now`` modulo the list's cycle."""
    if not gcl.entries or any(e[1] < 0 for e in gcl.entries) or gcl.cycle <= 0:
        raise ValueError(f"gate list of stream {gcl.stream} does not tile a cycle")
    if cycle is not None and gcl.cycle != cycle:
        raise ValueError(f"gate list of stream {gcl.stream} spans {gcl.cycle}, not {cycle}")
    state, _, queue = gcl.entry_at(now)
    if state == OPEN:
        return replace(fd, discard=False, queue=queue)
    return replace(fd, discard=True)


@dataclass(frozen=True)
class AnomalySpec:
    stream: int
    start: int
    shift: int


@dataclass
class SimTrace:
    events: list = field(default_factory=list)  # (time, kind, stream, frame_index, vertex)
    ideal_send: dict = field(default_factory=dict)  # (stream, frame_index) -> ns
    streams: tuple = ()
    horizon: int = 0


@dataclass
class StreamMetrics:
    stream: int
    delays: list = field(default_factory=list)
    drops: int = 0

    @property
    def delivered(self) -> int:
        return len(self.delays)

    @property
    def jitter(self):
        if not self.delays:
            return None
        return max(self.delays) - min(self.delays)


def default_offsets(p: Problem, seed: int = 0) -> dict:
    """Per-vertex clock offsets within +-delta/2, so any two clocks differ by
    at most delta."""
    half = p.sync_precision // 2
    rng = random.Random(f"clock:{seed}")
    return {v.id: rng.randint(-half, half) for v in p.vertices}


def link_delay(seed, link, stream, frame_index) -> int:
    rng = random.Random(f"{seed}:{link.src}:{link.dst}:{stream}:{frame_index}")
    return rng.randint(link.min_delay, link.max_delay)


class _Port:
    def __init__(self, link, intervals, n_queues):
        self.link = link
        self.intervals = intervals  # [(start, end, queue)] in local cycle time
        self.queues = [[] for _ in range(n_queues)]
        self.local = []  # frames originated here, sent as soon as the wire is free
        self.busy_until = None
        self.wakeup = None


def _tas_intervals(entries):
    out, t = [], 0
    for e in entries:
        if e.gate_state == OPEN and e.time_interval > 0:
            out.append((t, t + e.time_interval, e.queue))
        t += e.time_interval
    return out


class _Sim:
    def __init__(self, p, gcls, mode, anomalies, offsets, horizon, seed):
        self.p = p
        self.g = gcls
        self.mode = mode
        self.seed = seed
        self.horizon = horizon
        self.T = p.cycle
        self.off = offsets
        self.links = p.link_map
        self.sched = gcls.schedule
        self.anomaly = {a.stream: a for a in anomalies}
        self.heap = []
        self.seq = 0
        self.trace = SimTrace(streams=tuple(s.id for s in p.streams), horizon=horizon)
        self.ports = {}
        for l in p.links:
            n_q = max(l.ts_queues, 1 + max((iv[2] for iv in _tas_intervals(gcls.tas.get(l.id, []))), default=0))
            self.ports[l.id] = _Port(l, _tas_intervals(gcls.tas.get(l.id, [])), n_q)
        self.sgcl = {port: sg.copy() for port, sg in gcls.stream_wise.items()}
        self.uus = {port: [UpdateUnit(g) for g in pg] for port, pg in gcls.period_wise.items()}
        self.std = {port: {g.stream: g for g in lst} for port, lst in gcls.std_psfp.items()}

    def push(self, t, prio, kind, payload):
        heapq.heappush(self.heap, (t, prio, self.seq, kind, payload))
        self.seq += 1

    def record(self, t, kind, stream, n, vertex):
        self.trace.events.append((t, kind, stream, n, vertex))

    def planned_ns(self, s, n, link):
        per_cycle = self.T // s.period
        slot = self.sched.get(s.id, n % per_cycle, link)
        return slot.tx_time * self.links[link].granularity + (n // per_cycle) * self.T

    def planned_queue(self, s, n, link):
        return self.sched.get(s.id, n % (self.T // s.period), link).queue

    # -- sources

    def seed_sources(self):
        for s in self.p.streams:
            first = s.route[0]
            n = 0
            while True:
                ideal = self.planned_ns(s, n, first)
                if ideal >= self.horizon:
                    break
                self.trace.ideal_send[(s.id, n)] = ideal
                t = ideal
                a = self.anomaly.get(s.id)
                if a is not None and ideal >= a.start:
                    t += a.shift
                self.push(t - self.off[s.source], _P_EMIT, "emit", (s.id, n))
                n += 1

    def on_emit(self, now, sid, n):
        s = self.p.stream(sid)
        self.record(now, "sent", sid, n, s.source)
        port = self.ports[s.route[0]]
        port.local.append((sid, n))
        self.serve(port, now)

    # -- switches

    def on_arrive(self, now, sid, n, link):
        s = self.p.stream(sid)
        v = link[1]
        if s.destination == v:
            self.push(now + self.links[link].tx_duration(s.size), _P_DELIVER, "deliver", (sid, n, v))
            return
        nxt = s.next_link(link)
        fd = FrameDescriptor(sid, self.planned_queue(s, n, nxt), False, now, n)
        local = now + self.off[v]
        if self.mode == "foodog" and link in self.sgcl:
            sg = self.sgcl[link]
            for uu in self.uus[link]:
                gate_update_step(uu, sg, local)
            if sid >= len(sg):
                self.record(now, "error", sid, n, v)
            fd = police_foodog(fd, sg)
        elif self.mode == "standard_psfp" and sid in self.std.get(link, {}):
            fd = police_standard(fd, self.std[link][sid], local, self.T)
        if fd.discard:
            self.record(now, "policed_drop", sid, n, v)
            return
        if self.mode != "none":
            self.record(now, "policed_pass", sid, n, v)
        done = now + self.links[link].tx_duration(s.size)
        self.push(done, _P_ENQUEUE, "enqueue", (sid, n, nxt, fd.queue))

    def on_enqueue(self, now, sid, n, link, queue):
        port = self.ports[link]
        self.record(now, "enqueued", sid, n, link[0])
        port.queues[queue].append((sid, n))
        self.serve(port, now)

    def next_open(self, port, local):
        """Earliest local instant >= ``local`` at which a queued head frame
        fits inside an open interval of its queue, with that queue."""
        best = None
        base = local - local % self.T
        for start, end, q in port.intervals:
            if not port.queues[q]:
                continue
            dur = self.links[port.link.id].tx_duration(self.p.stream(port.queues[q][0][0]).size)
            if end - start < dur:
                continue
            for k in (0, 1):
                lo, hi = base + start + k * self.T, base + end + k * self.T - dur
                cand = max(lo, local)
                if cand <= hi:
                    if best is None or cand < best[0]:
                        best = (cand, q)
                    break
        return best

    def serve(self, port, now):
        if port.busy_until is not None and port.busy_until > now:
            return
        link = port.link
        v = link.src
        if port.local:
            self.transmit(port, now, *port.local.pop(0), origin=True)
            return
        local = now + self.off[v]
        nxt = self.next_open(port, local)
        if nxt is None:
            return
        when, q = nxt
        if when == local:
            self.transmit(port, now, *port.queues[q].pop(0))
            return
        wake = when - self.off[v]
        if port.wakeup is None or port.wakeup > wake or port.wakeup <= now:
            port.wakeup = wake
            self.push(wake, _P_PORT, "serve", link.id)

    def transmit(self, port, now, sid, n, origin=False):
        s = self.p.stream(sid)
        link = port.link
        if not origin:
            self.record(now, "dequeued", sid, n, link.src)
        dur = link.tx_duration(s.size)
        port.busy_until = now + dur
        self.push(now + dur, _P_PORT, "serve", link.id)
        self.push(now + link_delay(self.seed, link, sid, n), _P_ARRIVE, "arrive", (sid, n, link.id))

    def run(self, limit):
        self.seed_sources()
        while self.heap:
            t, _, _, kind, payload = heapq.heappop(self.heap)
            if t > limit:
                log.warning("stopping at %d ns with %d events pending", t, len(self.heap) + 1)
                break
            if kind == "emit":
                self.on_emit(t, *payload)
            elif kind == "arrive":
                self.on_arrive(t, *payload)
            elif kind == "enqueue":
                self.on_enqueue(t, *payload)
            elif kind == "serve":
                self.serve(self.ports[payload], t)
            elif kind == "deliver":
                self.record(t, "delivered", *payload)
        return self.trace


def run(problem: Problem, gcls: GclSet, mode: str = "foodog", anomalies=(),
        clock_offsets: dict | None = None, horizon: int | None = None, seed: int = 0) -> SimTrace:
    """Simulate ``horizon`` ns of traffic (a whole number of network cycles).

    Frames whose ideal send time falls before the horizon are emitted; the
    run then drains until every frame is delivered or dropped, or two more
    cycles have passed.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if gcls.schedule is None:
        raise ValueError("gate lists carry no schedule")
    T = problem.cycle
    horizon = T if horizon is None else horizon
    if horizon <= 0 or horizon % T:
        raise ValueError(f"horizon {horizon} is not a positive multiple of the cycle {T}")
    delta = problem.sync_precision
    offsets = default_offsets(problem, seed) if clock_offsets is None else dict(clock_offsets)
    for v in problem.vertices:
        offsets.setdefault(v.id, 0)
        if abs(offsets[v.id]) > delta:
            raise ValueError(f"clock offset of {v.id} exceeds the sync precision {delta}")
    ids = {s.id: s for s in problem.streams}
    for a in anomalies:
        if a.stream not in ids:
            raise ValueError(f"anomaly on unknown stream {a.stream}")
        if abs(a.shift) >= ids[a.stream].period:
            raise ValueError(f"anomaly shift {a.shift} not below the period of f{a.stream}")
    sim = _Sim(problem, gcls, mode, list(anomalies), offsets, horizon, seed)
    return sim.run(horizon + 2 * T)


def metrics(trace: SimTrace, warmup: int = 0) -> list:
    """Per-stream delays, jitter and drops over frames ideally sent at or
    after ``warmup``."""
    if trace.horizon and warmup >= trace.horizon:
        raise ValueError("warmup must end before the horizon")
    out = {sid: StreamMetrics(sid) for sid in trace.streams}
    for t, kind, sid, n, _ in trace.events:
        ideal = trace.ideal_send[(sid, n)]
        if ideal < warmup:
            continue
        if kind == "delivered":
            out[sid].delays.append(t - ideal)
        elif kind == "policed_drop":
            out[sid].drops += 1
    return [out[sid] for sid in trace.streams]


def delivered_times(trace: SimTrace, stream: int) -> list:
    return [(n, t) for t, kind, sid, n, _ in trace.events if kind == "delivered" and sid == stream]


def write_trace_csv(trace: SimTrace, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["time_ns", "kind", "stream", "frame_index", "vertex"])
    for ev in trace.events:
        w.writerow(ev)


def write_metrics_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["stream", "delivered", "drops", "min_delay_ns", "max_delay_ns", "jitter_ns"])
    for m in rows:
        if m.delays:
            w.writerow([m.stream, m.delivered, m.drops, min(m.delays), max(m.delays), m.jitter])
        else:
            w.writerow([m.stream, 0, m.drops, "", "", ""])
