"""Gate control list synthesis from a verified schedule.

Three GCL families are produced per port:

* TAS egress lists (per egress link), opening a queue for the planned
  transmission of each frame;
* standard per-stream PSFP lists (per ingress link), one open window per
  frame of the network cycle;
* the compressed form: one Period-wise GCL per distinct period, holding an
  open and a close entry for the first frame of each stream, plus a
  Stream-wise GCL addressed by stream id that holds live gate states.

Policing is configured at the ingress link of every switch a stream
traverses onward. Windows are closed intervals ``[lower, upper]``; the close
entry fires at ``upper + 1``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import cached_property

from .memmodel import WidthConfig, default_widths
from .model import SWITCH, Link, LinkId, Problem, Schedule, link_name
from .planner.verify import verify_schedule

OPEN = "open"
CLOSED = "closed"


class SynthesisError(ValueError):
    pass


@dataclass(frozen=True)
class ArrivalWindow:
    lower: int
    upper: int

    def __contains__(self, t):
        return self.lower <= t <= self.upper


@dataclass(frozen=True)
class TasGclEntry:
    time_interval: int
    gate_state: str
    queue: int | None = None


@dataclass(frozen=True)
class StdPsfpGcl:
    stream: int
    entries: tuple  # ((gate_state, time_interval, queue), ...)

    @cached_property
    def _starts(self):
        starts, t = [], 0
        for _, interval, _ in self.entries:
            starts.append(t)
            t += interval
        return starts, t

    @property
    def cycle(self) -> int:
        return self._starts[1]

    def entry_at(self, t):
        """Entry in force at cycle offset ``t``; zero-length entries never are."""
        starts, total = self._starts
        i = bisect.bisect_right(starts, t % total) - 1
        while self.entries[i][1] == 0:
            i += 1
        return self.entries[i]


@dataclass(frozen=True)
class PeriodWiseGclEntry:
    update_time: int
    gate_id: int
    gate_state: str
    queue: int


@dataclass(frozen=True)
class PeriodWiseGcl:
    pgcl_cycle: int
    entries: tuple


@dataclass
class StreamWiseGcl:
    """Live gate table; index = stream id, value = (gate_state, queue)."""

    entries: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __setitem__(self, idx, value):
        self.entries[idx] = value

    def copy(self):
        return StreamWiseGcl(list(self.entries))


@dataclass
class GclSet:
    """Everything the data plane needs, keyed by link id.

    ``schedule`` is the plan the lists were derived from; the simulator
    takes talker emission times and planned queues from it.
    """

    cycle: int
    delta: int
    tas: dict = field(default_factory=dict)
    std_psfp: dict = field(default_factory=dict)
    period_wise: dict = field(default_factory=dict)
    stream_wise: dict = field(default_factory=dict)
    widths: WidthConfig | None = None
    schedule: Schedule | None = None


def arrival_window(tx_time: int, link: Link, delta: int) -> ArrivalWindow:
    """Planned arrival interval at ``link.dst`` of a first bit sent at
    ``tx_time`` (ns) by ``link.src``."""
    if tx_time < 0:
        raise SynthesisError("negative transmission time")
    lower = tx_time + link.min_delay - delta
    upper = tx_time + link.max_delay + delta
    if lower < 0:
        raise SynthesisError("window underflows cycle start")
    return ArrivalWindow(lower, upper)


def policed_streams(p: Problem, port: LinkId) -> list:
    """Streams policed at the ingress of ``port``: those continuing past a
    switch."""
    port = tuple(port)
    vertex = p.vertex_map[port[1]]
    if vertex.kind != SWITCH:
        return []
    return [s for s in p.streams_on(port) if s.next_link(port) is not None]


def _queue_after(schedule, s, j, port):
    nxt = s.next_link(port)
    return schedule.get(s.id, j, nxt).queue if nxt is not None else 0


def synth_tas(p: Problem, schedule: Schedule, port: LinkId) -> list:
    """Egress gate list of ``port`` tiling one network cycle."""
    port = tuple(port)
    link = p.link_map[port]
    T = p.cycle
    spans = []
    for slot in schedule.on_link(port):
        s = p.stream(slot.stream)
        start = slot.tx_time * link.granularity
        spans.append((start, start + link.tx_duration(s.size), slot.queue))
    spans.sort()
    merged = []
    for start, end, q in spans:
        if merged and start < merged[-1][1]:
            if q != merged[-1][2]:
                raise SynthesisError(f"overlapping open intervals on {link_name(port)} at {start}")
            merged[-1] = (merged[-1][0], max(end, merged[-1][1]), q)
        elif merged and start == merged[-1][1] and q == merged[-1][2]:
            merged[-1] = (merged[-1][0], end, q)
        else:
            merged.append((start, end, q))
    out = []
    t = 0
    for start, end, q in merged:
        if end > T:
            raise SynthesisError(f"transmission past cycle end on {link_name(port)}")
        if start > t:
            out.append(TasGclEntry(start - t, CLOSED))
        out.append(TasGclEntry(end - start, OPEN, q))
        t = end
    if t < T:
        out.append(TasGclEntry(T - t, CLOSED))
    return out


def _window(p, schedule, s, j, port, delta):
    link = p.link_map[tuple(port)]
    return arrival_window(schedule.get(s.id, j, port).tx_time * link.granularity, link, delta)


def synth_standard_psfp(p: Problem, schedule: Schedule, port: LinkId, delta: int) -> list:
    """One per-frame gate list per stream policed at the ingress of ``port``.

    Each list holds ``2 * T / T_i + 1`` entries. A window running past the
    cycle end wraps to the start, which then opens the list instead of
    closing it; zero-length entries keep the count exact.
    """
    port = tuple(port)
    T = p.cycle
    out = []
    for s in policed_streams(p, port):
        n = T // s.period
        opens = []
        for j in range(n):
            w = _window(p, schedule, s, j, port, delta)
            if w.upper - w.lower + 1 >= s.period:
                raise SynthesisError(f"window of {s.name} covers its whole period")
            opens.append((w.lower, w.upper + 1, _queue_after(schedule, s, j, port)))
        for (lo1, hi1, _), (lo2, _, _) in zip(opens, opens[1:]):
            if lo2 < hi1:
                raise SynthesisError(f"overlapping windows for {s.name}")
        entries = []
        last_lo, last_hi, last_q = opens[-1]
        wrapped = last_hi > T
        if wrapped:
            if last_hi - T > opens[0][0]:
                raise SynthesisError(f"overlapping windows for {s.name}")
            opens[-1] = (last_lo, T, last_q)
            entries.append((OPEN, last_hi - T, last_q))
        t = entries[0][1] if wrapped else 0
        for lo, hi, q in opens:
            entries.append((CLOSED, lo - t, None))
            entries.append((OPEN, hi - lo, q))
            t = hi
        if not wrapped:
            entries.append((CLOSED, T - t, None))
        out.append(StdPsfpGcl(s.id, tuple(entries)))
    return out


def synth_foodog(p: Problem, schedule: Schedule, port: LinkId, delta: int,
                 check: bool = True) -> tuple:
    """Period-wise GCLs and the initial Stream-wise GCL for ``port``.

    The Stream-wise GCL is addressed by global stream id, so its length is
    the number of streams in the problem (zero when nothing is policed at
    the port); gates of streams not policed here stay closed.
    """
    port = tuple(port)
    if check:
        problems = verify_schedule(p, schedule, "foodog")
        if problems:
            raise SynthesisError(problems[0])
    policed = policed_streams(p, port)
    sgcl = StreamWiseGcl([(CLOSED, 0)] * len(p.streams) if policed else [])
    by_period = {}
    for s in policed:
        w = _window(p, schedule, s, 0, port, delta)
        pt = s.period
        if w.upper - w.lower + 1 >= pt:
            raise SynthesisError(f"window of {s.name} covers its whole period")
        q = _queue_after(schedule, s, 0, port)
        on, off = w.lower % pt, (w.upper + 1) % pt
        by_period.setdefault(pt, []).extend([
            PeriodWiseGclEntry(on, s.id, OPEN, q),
            PeriodWiseGclEntry(off, s.id, CLOSED, q),
        ])
        # a wrapped window is open when the cycle starts
        sgcl[s.id] = (OPEN if off < on else CLOSED, q)
    pgcls = [
        PeriodWiseGcl(pt, tuple(sorted(entries, key=lambda e: (e.update_time, e.gate_id, e.gate_state))))
        for pt, entries in sorted(by_period.items())
    ]
    return pgcls, sgcl


def ingress_ports(p: Problem) -> list:
    return [l.id for l in p.links if policed_streams(p, l.id)]


def synth_all(p: Problem, schedule: Schedule, delta: int | None = None,
              widths: WidthConfig | None = None) -> GclSet:
    """Synthesize all three families for every port of ``p``."""
    delta = p.sync_precision if delta is None else delta
    problems = verify_schedule(p, schedule, "foodog")
    if problems:
        raise SynthesisError(problems[0])
    gs = GclSet(cycle=p.cycle, delta=delta, schedule=schedule,
                widths=widths or default_widths(len(p.streams)))
    for l in p.links:
        if any(l.id in s.route for s in p.streams):
            gs.tas[l.id] = synth_tas(p, schedule, l.id)
    for port in ingress_ports(p):
        gs.std_psfp[port] = synth_standard_psfp(p, schedule, port, delta)
        gs.period_wise[port], gs.stream_wise[port] = synth_foodog(p, schedule, port, delta, check=False)
    return gs


def depth_summary(gs: GclSet) -> dict:
    """Per-port (period-wise entries, stream-wise depth, standard entries)."""
    out = {}
    for port, pgcls in gs.period_wise.items():
        out[port] = (
            sum(len(g.entries) for g in pgcls),
            len(gs.stream_wise[port]),
            sum(len(g.entries) for g in gs.std_psfp[port]),
        )
    return out

