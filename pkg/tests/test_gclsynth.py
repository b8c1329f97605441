import pytest
from hypothesis import given, strategies as st

from foodog.gclsynth import (
    CLOSED, OPEN, SynthesisError, arrival_window, depth_summary, policed_streams,
    synth_all, synth_foodog, synth_standard_psfp, synth_tas,
)
from foodog.model import FrameSlot, Link, Problem, Schedule, Stream, Vertex
from foodog.planner import plan
from foodog.simengine import FrameDescriptor, UpdateUnit, gate_update_step, police_foodog, police_standard

from conftest import chain, two_stream_3hop

US = 1000


def test_window_example(frozen):
    w = arrival_window(2000, Link("a", "b", min_delay=300, max_delay=1200), 48)
    assert [w.lower, w.upper] == frozen["window_2000_300_1200_48"]
    assert 2252 in w and 3248 in w and 3249 not in w


def test_window_zero_delay():
    w = arrival_window(5000, Link("a", "b", min_delay=0, max_delay=0), 0)
    assert (w.lower, w.upper) == (5000, 5000)


def test_window_underflow():
    with pytest.raises(SynthesisError, match="window underflows cycle start"):
        arrival_window(0, Link("a", "b", min_delay=300, max_delay=1200), 400)


def test_tas_toy(toy, toy_schedule):
    tas = synth_tas(toy.problem, toy_schedule, ("Sc", "Sd"))
    starts, t = [], 0
    for e in tas:
        if e.gate_state == OPEN:
            starts.append(t)
        t += e.time_interval
    assert starts == [4 * US, 9 * US]
    assert t == toy.problem.cycle


def test_tas_empty_port():
    p = chain(2)
    p = Problem(p.vertices, p.links + (Link("N2", "N0"),), p.streams, p.sync_precision)
    _, out = plan(p)
    tas = synth_tas(p, out.schedule, ("N2", "N0"))
    assert [(e.gate_state, e.time_interval) for e in tas] == [(CLOSED, p.cycle)]


def test_tas_single_full_period(frozen):
    p = chain(1)
    s = Schedule([FrameSlot(0, 0, ("N0", "N1"), 3, 0)])
    tas = synth_tas(p, s, ("N0", "N1"))
    assert len(tas) == frozen["tas_single_full_period_entries"]
    assert [e.gate_state for e in tas] == [CLOSED, OPEN, CLOSED]


@pytest.fixture(scope="module")
def mixed():
    p = two_stream_3hop()
    _, out = plan(p)
    assert out.feasible
    return p, out.schedule


def test_standard_depths(mixed, frozen):
    p, s = mixed
    lists = {g.stream: g for g in synth_standard_psfp(p, s, ("C", "D"), 48)}
    assert len(lists[0].entries) == frozen["std_entries_1ms_in_100ms"]
    assert len(lists[1].entries) == 3
    for g in lists.values():
        states = [e[0] for e in g.entries]
        assert states == [CLOSED, OPEN] * (len(states) // 2) + [CLOSED]
        assert g.cycle == p.cycle


def test_standard_windows_match_arrival(mixed):
    p, s = mixed
    link = p.link_map[("C", "D")]
    g = next(x for x in synth_standard_psfp(p, s, ("C", "D"), 48) if x.stream == 0)
    t, opens = 0, []
    for state, interval, _ in g.entries:
        if state == OPEN:
            opens.append((t, t + interval - 1))
        t += interval
    for j, (lo, hi) in enumerate(opens):
        w = arrival_window(s.get(0, j, ("C", "D")).tx_time * link.granularity, link, 48)
        assert (lo, hi) == (w.lower, w.upper)


def test_standard_overlap_rejected():
    p = chain(2, granularity=100)
    route = p.streams[0].route
    q = Problem(p.vertices, p.links, [Stream(0, route, 100, 5 * US, 10 * US),
                                      Stream(1, route[1:], 100, 10 * US, 10 * US)], 48)
    # frame 0 at the end of its period, frame 1 right at the start of the next
    s = Schedule([FrameSlot(0, 0, ("N0", "N1"), 42, 0), FrameSlot(0, 1, ("N0", "N1"), 50, 0),
                  FrameSlot(0, 0, ("N1", "N2"), 0, 0), FrameSlot(0, 1, ("N1", "N2"), 0, 0)])
    with pytest.raises(SynthesisError, match="overlapping windows"):
        synth_standard_psfp(q, s, ("N0", "N1"), 48)


def test_foodog_same_period():
    p = two_stream_3hop(p1=1_000_000)
    _, out = plan(p)
    pgcls, sgcl = synth_foodog(p, out.schedule, ("C", "D"), 48)
    assert len(pgcls) == 1 and len(pgcls[0].entries) == 4 and len(sgcl) == 2
    times = [e.update_time for e in pgcls[0].entries]
    assert times == sorted(times)
    assert all(0 <= t < pgcls[0].pgcl_cycle for t in times)


def test_foodog_two_periods(mixed):
    p, s = mixed
    pgcls, sgcl = synth_foodog(p, s, ("C", "D"), 48)
    assert sorted(g.pgcl_cycle for g in pgcls) == [1_000_000, 100_000_000]
    for g in pgcls:
        assert sorted(e.gate_state for e in g.entries) == [CLOSED, OPEN]


def test_foodog_no_streams(mixed):
    p, s = mixed
    pgcls, sgcl = synth_foodog(p, s, ("E", "A"), 48)
    assert pgcls == [] and len(sgcl) == 0


def test_foodog_rejects_non_periodic(toy):
    p = toy.problem
    streams = [Stream(0, p.streams[0].route, 100, 20_000, 10_000, name="f1"),
               Stream(1, p.streams[1].route, 100, 10_000, 10_000, name="f2")]
    links = [Link(l.src, l.dst, ts_queues=2, min_delay=l.min_delay, max_delay=l.max_delay) for l in p.links]
    q = Problem(p.vertices, links, streams, p.sync_precision)
    _, out = plan(q, "comp")
    slots = [FrameSlot(x.stream, x.frame_index, x.link, x.tx_time, 1)
             if (x.stream, x.frame_index, x.link) == (1, 1, ("Sb", "Sc")) else x for x in out.schedule.slots]
    with pytest.raises(SynthesisError, match="same-queue violation"):
        synth_foodog(q, Schedule(slots), ("Sb", "Sc"), 48)


def test_wrapped_window_initial_state():
    p = chain(2, period=10 * US, deadline=10 * US, min_delay=1000, max_delay=1000)
    s = Schedule([FrameSlot(0, 0, ("N0", "N1"), 9, 0), FrameSlot(0, 0, ("N1", "N2"), 0, 0)])
    pgcls, sgcl = synth_foodog(p, s, ("N0", "N1"), 48, check=False)
    # window [9952, 10048] wraps: open entry late, close entry early, open at start
    assert [(e.update_time, e.gate_state) for e in pgcls[0].entries] == [(49, CLOSED), (9952, OPEN)]
    assert sgcl[0] == (OPEN, 0)
    std = synth_standard_psfp(p, s, ("N0", "N1"), 48)[0]
    assert len(std.entries) == 3 and std.entries[0][0] == OPEN and std.cycle == p.cycle
    uu = [UpdateUnit(g) for g in pgcls]
    fd = FrameDescriptor(0)
    for t in range(0, 3 * p.cycle):
        for u in uu:
            gate_update_step(u, sgcl, t)
        assert police_foodog(fd, sgcl).discard == police_standard(fd, std, t).discard


def test_synth_all_depth_law(aero):
    p = aero.problem
    _, out = plan(p)
    gs = synth_all(p, out.schedule)
    for port, (pw, sw, std) in depth_summary(gs).items():
        n = len(policed_streams(p, port))
        assert pw == 2 * n and sw == len(p.streams)
        assert std == n * (2 * (p.cycle // 1_000_000) + 1)
    for port, entries in gs.tas.items():
        assert sum(e.time_interval for e in entries) == p.cycle


def test_equivalence_toy_coarse(toy, toy_gcls):
    T = toy.problem.cycle
    for port, pgcls in toy_gcls.period_wise.items():
        sg = toy_gcls.stream_wise[port].copy()
        uus = [UpdateUnit(g) for g in pgcls]
        for t in range(0, 2 * T):
            for u in uus:
                gate_update_step(u, sg, t)
            for g in toy_gcls.std_psfp[port]:
                fd = FrameDescriptor(g.stream)
                a, b = police_foodog(fd, sg), police_standard(fd, g, t)
                assert a.discard == b.discard and (a.discard or a.queue == b.queue)


@given(st.integers(0, 10**9), st.integers(0, 5000), st.integers(0, 5000), st.integers(0, 100),
       st.floats(0, 1), st.floats(-1, 1))
def test_window_soundness(tx, d1, d2, delta, u, v):
    lo, hi = min(d1, d2), max(d1, d2)
    link = Link("a", "b", min_delay=lo, max_delay=hi)
    if tx + lo - delta < 0:
        return
    w = arrival_window(tx, link, delta)
    arrival = tx + lo + round(u * (hi - lo)) + round(v * delta)
    assert arrival in w
