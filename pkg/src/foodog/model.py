"""Domain types shared by the planner, GCL synthesis and the simulator.

All times are integer nanoseconds on one global timeline. Planned
transmission times are kept in ticks of the owning link's granularity and
converted to nanoseconds by multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable

SWITCH = "switch"
END_SYSTEM = "end_system"

LinkId = tuple  # (from_vertex, to_vertex)


def link_name(link: LinkId) -> str:
    return f"({link[0]},{link[1]})"


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str = SWITCH


@dataclass(frozen=True)
class Link:
    src: str
    dst: str
    bandwidth: int = 1_000_000_000  # bits per second
    ts_queues: int = 2
    max_delay: int = 1200
    min_delay: int = 300
    granularity: int = 1000

    @property
    def id(self) -> LinkId:
        return (self.src, self.dst)

    def tx_duration(self, size_bytes: int) -> int:
        """Wire time of a frame in ns, rounded up."""
        return -(-size_bytes * 8 * 1_000_000_000 // self.bandwidth)


@dataclass(frozen=True)
class Stream:
    id: int
    route: tuple  # tuple of LinkId, source first
    size: int  # bytes
    period: int
    deadline: int
    jitter_bound: int = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "route", tuple(tuple(l) for l in self.route))
        if not self.name:
            object.__setattr__(self, "name", f"f{self.id}")

    @property
    def source(self) -> str:
        return self.route[0][0]

    @property
    def destination(self) -> str:
        return self.route[-1][1]

    def next_link(self, link: LinkId):
        idx = self.route.index(tuple(link))
        return self.route[idx + 1] if idx + 1 < len(self.route) else None

    def prev_link(self, link: LinkId):
        idx = self.route.index(tuple(link))
        return self.route[idx - 1] if idx > 0 else None


@dataclass(frozen=True)
class Problem:
    vertices: tuple
    links: tuple
    streams: tuple
    sync_precision: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "streams", tuple(sorted(self.streams, key=lambda s: s.id)))

    @property
    def link_map(self) -> dict:
        return {l.id: l for l in self.links}

    @property
    def vertex_map(self) -> dict:
        return {v.id: v for v in self.vertices}

    @property
    def cycle(self) -> int:
        return network_cycle_period(self.streams)

    def stream(self, sid: int) -> Stream:
        return self.streams[sid]

    def streams_on(self, link: LinkId) -> list:
        link = tuple(link)
        return [s for s in self.streams if link in s.route]

    def frames_per_cycle(self, stream: Stream) -> int:
        return self.cycle // stream.period

    def duration(self, stream: Stream, link: LinkId) -> int:
        return self.link_map[tuple(link)].tx_duration(stream.size)


@dataclass(frozen=True, order=True)
class FrameSlot:
    stream: int
    frame_index: int
    link: LinkId
    tx_time: int  # ticks of the link granularity
    queue: int


@dataclass
class Schedule:
    slots: list = field(default_factory=list)

    def __post_init__(self):
        self._index = {(s.stream, s.frame_index, tuple(s.link)): s for s in self.slots}

    def get(self, stream: int, frame_index: int, link: LinkId) -> FrameSlot:
        return self._index[(stream, frame_index, tuple(link))]

    def find(self, stream: int, frame_index: int, link: LinkId):
        return self._index.get((stream, frame_index, tuple(link)))

    def on_link(self, link: LinkId) -> list:
        link = tuple(link)
        return sorted(s for s in self.slots if tuple(s.link) == link)

    def __len__(self):
        return len(self.slots)

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return sorted(self.slots) == sorted(other.slots)


def network_cycle_period(streams: Iterable) -> int:
    """Least common multiple of the stream periods.

    Accepts Stream objects or bare integer periods.
    """
    periods = [s.period if isinstance(s, Stream) else int(s) for s in streams]
    if not periods:
        raise ValueError("no streams")
    if any(p <= 0 for p in periods):
        raise ValueError("periods must be positive")
    return reduce(math.lcm, periods)


def validate_problem(p: Problem) -> list:
    """Return a sorted list of invariant violations; empty when well formed."""
    out = set()
    seen = set()
    for v in p.vertices:
        if v.id in seen:
            out.add(f"duplicate vertex id: {v.id}")
        seen.add(v.id)
        if v.kind not in (SWITCH, END_SYSTEM):
            out.add(f"unknown vertex kind: {v.id}")

    links = {}
    for l in p.links:
        name = link_name(l.id)
        if l.id in links:
            out.add(f"duplicate link: {name}")
        links[l.id] = l
        if l.src not in seen or l.dst not in seen:
            out.add(f"unknown vertex in link: {name}")
        if l.src == l.dst:
            out.add(f"self loop: {name}")
        if l.min_delay > l.max_delay:
            out.add(f"delay bounds inverted: {name}")
        if l.min_delay < 0:
            out.add(f"negative delay: {name}")
        if l.bandwidth <= 0:
            out.add(f"non-positive bandwidth: {name}")
        if l.granularity <= 0:
            out.add(f"non-positive granularity: {name}")
        if l.ts_queues < 1:
            out.add(f"no ts queues: {name}")

    if p.sync_precision < 0:
        out.add("negative sync precision")

    ids = sorted(s.id for s in p.streams)
    if ids != list(range(len(ids))):
        out.add("stream ids not dense")

    for s in p.streams:
        if s.period <= 0:
            out.add(f"non-positive period: {s.name}")
        if s.size <= 0:
            out.add(f"non-positive size: {s.name}")
        if not s.route:
            out.add(f"empty route: {s.name}")
            continue
        if any(l not in links for l in s.route):
            out.add(f"unknown link in route: {s.name}")
        if any(a[1] != b[0] for a, b in zip(s.route, s.route[1:])):
            out.add(f"route not connected: {s.name}")
        hops = [s.route[0][0]] + [l[1] for l in s.route]
        if len(set(hops)) != len(hops):
            out.add(f"route not simple: {s.name}")
        for lid in s.route:
            l = links.get(lid)
            if l is None or l.bandwidth <= 0 or l.granularity <= 0 or s.period <= 0:
                continue
            if l.tx_duration(max(s.size, 0)) > s.period:
                out.add(f"transmission exceeds period: {s.name} on {link_name(lid)}")
            if s.period % l.granularity:
                out.add(f"period not a multiple of granularity: {s.name} on {link_name(lid)}")
    return sorted(out)
