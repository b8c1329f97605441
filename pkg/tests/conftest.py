import json
from pathlib import Path

import pytest

from foodog import formats
from foodog.gclsynth import synth_all
from foodog.model import Link, Problem, Stream, Vertex

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture
def frozen():
    return FROZEN


@pytest.fixture
def toy():
    return formats.bundled_scenario("toy")


@pytest.fixture
def toy_schedule():
    _, sched = formats.parse_schedule(formats.bundled_path("toy_plan").read_text())
    return sched


@pytest.fixture
def toy_gcls(toy, toy_schedule):
    return synth_all(toy.problem, toy_schedule)


@pytest.fixture
def aero():
    return formats.bundled_scenario("aerospace")


def chain(n_links, period=1_000_000, deadline=1_000_000, size=100, delta=48, **link_kw):
    """One stream over a line of switches E0 -> S1 -> ... -> En."""
    names = [f"N{i}" for i in range(n_links + 1)]
    verts = [Vertex(n) for n in names]
    links = [Link(a, b, **link_kw) for a, b in zip(names, names[1:])]
    route = tuple(l.id for l in links)
    return Problem(verts, links, [Stream(0, route, size, period, deadline)], delta)


def two_stream_3hop(p0=1_000_000, p1=100_000_000, deadline=100_000):
    verts = [Vertex(x) for x in ("A", "B", "C", "D", "E")]
    links = [Link("A", "C"), Link("B", "C"), Link("C", "D"), Link("D", "E"), Link("E", "A")]
    s0 = Stream(0, (("A", "C"), ("C", "D"), ("D", "E")), 100, p0, deadline)
    s1 = Stream(1, (("B", "C"), ("C", "D"), ("D", "E")), 100, p1, deadline)
    return Problem(verts, links, [s0, s1], 48)
