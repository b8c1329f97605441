"""Seeded random planning instances for tests, demos and the solver study."""

from __future__ import annotations

import random
from collections import deque

from .model import END_SYSTEM, SWITCH, Link, Problem, Stream, Vertex


def ring_topology(n_switches=6, chords=((0, 3),), **link_kw):
    """Switch ring with optional chords and one end system per switch.

    Every physical connection is a pair of directed links.
    """
    verts = [Vertex(f"SW{i}", SWITCH) for i in range(n_switches)]
    verts += [Vertex(f"ES{i}", END_SYSTEM) for i in range(n_switches)]
    pairs = [(i, (i + 1) % n_switches) for i in range(n_switches)] + list(chords)
    links = []
    for a, b in pairs:
        links.append(Link(f"SW{a}", f"SW{b}", **link_kw))
        links.append(Link(f"SW{b}", f"SW{a}", **link_kw))
    for i in range(n_switches):
        links.append(Link(f"ES{i}", f"SW{i}", **link_kw))
        links.append(Link(f"SW{i}", f"ES{i}", **link_kw))
    return verts, links


def shortest_route(links, src, dst):
    adj = {}
    for l in links:
        adj.setdefault(l.src, []).append(l.dst)
    prev = {src: None}
    todo = deque([src])
    while todo:
        v = todo.popleft()
        if v == dst:
            break
        for w in sorted(adj.get(v, [])):
            if w not in prev:
                prev[w] = v
                todo.append(w)
    if dst not in prev:
        return None
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    return tuple(zip(path, path[1:]))


def random_instance(seed, n_streams=10, periods=(1_000_000, 10_000_000), max_hops=4,
                    size=100, deadline=None, delta=48, n_switches=6, **link_kw):
    """Random end-system-to-end-system streams over a ring of switches.

    Each stream draws one of ``periods`` and a source/destination pair whose
    shortest route has at most ``max_hops`` links. Deadlines and jitter
    bounds default to the 100/1000 us and 10/100 us choices of the
    evaluation setup.
    """
    rng = random.Random(seed)
    verts, links = ring_topology(n_switches, **link_kw)
    ends = [v.id for v in verts if v.kind == END_SYSTEM]
    routes = []
    for a in ends:
        for b in ends:
            if a != b:
                r = shortest_route(links, a, b)
                if r and len(r) <= max_hops:
                    routes.append(r)
    streams = []
    for i in range(n_streams):
        period = rng.choice(periods)
        streams.append(Stream(
            id=i,
            route=rng.choice(routes),
            size=size,
            period=period,
            deadline=deadline if deadline is not None else rng.choice((100_000, 1_000_000)),
            jitter_bound=rng.choice((10_000, 100_000)),
        ))
    return Problem(verts, links, streams, delta)
