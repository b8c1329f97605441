"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line. The file also runs
standalone: ``python3 tests/test_acceptance.py``.
"""

import json
import math
import random
import sys
import time
from pathlib import Path

import pytest

from foodog import formats
from foodog.gclsynth import arrival_window, synth_all
from foodog.memmodel import WidthConfig, depth_report, grid_report, default_grid, mem_foodog
from foodog.model import Link
from foodog.planner import build_constraints_comp, plan, verify_schedule
from foodog.simengine import (
    FrameDescriptor, UpdateUnit, delivered_times, gate_update_step, metrics,
    police_foodog, police_standard, run,
)
from foodog.workloads import random_instance

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
US = 1000
MS = 1_000_000
FIXED = WidthConfig(w_interval=32, w_state=1, w_que=3, w_time=32, w_gate=9)


def check_memory_bound():
    bits = mem_foodog(4, 500, 1000, FIXED)
    assert bits == FROZEN["mem_fd_P4_500_1000"] == 188_000
    assert bits <= 0.2e6


def check_depth_constancy():
    props = [round(0.10 + 0.05 * k, 2) for k in range(17)]
    rows = depth_report(500, props)
    assert {r[2] for r in rows} == {1000}
    std = [r[1] for r in rows]
    assert all(a < b for a, b in zip(std, std[1:]))
    assert (std[0], std[-1]) == (11_400, 90_600)
    assert [list(r[1:]) for r in rows] == [FROZEN["depth_500"][str(round(p * 100))] for p in props]


def check_reduction_range():
    counts, props = default_grid()
    rows = grid_report(counts, props, ports=4, widths=FIXED)
    assert len(rows) == FROZEN["grid_cells"] == 153
    assert all(0.60 <= r.reduction <= 0.99 for r in rows)
    cell = next(r for r in rows if r.streams == 500 and math.isclose(r.proportion_small, 0.90))
    assert abs(cell.reduction - 0.9856) <= 0.001
    assert abs(cell.reduction - FROZEN["max_cell_reduction"]) < 1e-5


def _sweep_port(gs, port, horizon):
    """Count decision mismatches over every nanosecond of ``[0, horizon)``."""
    sg = gs.stream_wise[port].copy()
    uus = [UpdateUnit(g) for g in gs.period_wise[port]]
    lists = [(g, FrameDescriptor(g.stream)) for g in gs.std_psfp[port]]
    bad = 0
    for t in range(horizon):
        for u in uus:
            gate_update_step(u, sg, t)
        for g, fd in lists:
            a, b = police_foodog(fd, sg), police_standard(fd, g, t)
            if a.discard != b.discard or (not a.discard and a.queue != b.queue):
                bad += 1
    return bad


def check_policing_equivalence():
    for seed in range(5):
        t0 = time.monotonic()
        p = random_instance(seed, n_streams=6, periods=(50_000, 100_000), deadline=50_000)
        assert p.cycle <= 10 * MS
        _, out = plan(p)
        assert out.feasible
        gs = synth_all(p, out.schedule)
        bad = sum(_sweep_port(gs, port, p.cycle) for port in gs.std_psfp)
        assert bad == 0, f"seed {seed}: {bad} mismatches"
        assert time.monotonic() - t0 < 60, f"seed {seed} too slow"


def check_anomaly_determinism():
    sc = formats.bundled_scenario("aerospace")
    p = sc.problem
    _, out = plan(p)
    assert out.feasible
    gs = synth_all(p, out.schedule)
    horizon = 50 * p.cycle
    (an,) = sc.anomalies
    assert an.start == 24 * MS and p.sync_precision == 48
    victims = [s.id for s in p.streams if s.id != an.stream]
    tick = max(l.granularity for l in p.links)
    hit = run(p, gs, "foodog", sc.anomalies, sc.clock_offsets, horizon, 0)
    clean = run(p, gs, "foodog", [], sc.clock_offsets, horizon, 0)
    rows = {m.stream: m for m in metrics(hit)}
    for sid in victims:
        assert rows[sid].jitter <= 2 * p.sync_precision + tick
        assert delivered_times(hit, sid) == delivered_times(clean, sid)
    loose = {m.stream: m for m in metrics(run(p, gs, "none", sc.anomalies, sc.clock_offsets, horizon, 0))}
    assert max(loose[sid].jitter for sid in victims) > 1 * US


def _dequeues(trace, vertex):
    return [(t, sid) for t, kind, sid, _, v in trace.events if kind == "dequeued" and v == vertex]


def check_toy_golden():
    sc = formats.bundled_scenario("toy")
    p = sc.problem
    _, sched = formats.parse_schedule(formats.bundled_path("toy_plan").read_text())
    gs = synth_all(p, sched)
    horizon = 100 * US
    start = sc.anomalies[0].start
    f1, f2 = 0, 1
    tr = run(p, gs, "none", sc.anomalies, sc.clock_offsets, horizon, 0)
    after = [(t % p.cycle, sid) for t, sid in _dequeues(tr, "Sc") if t >= start]
    # the early f2 frame takes the 4 us slot and pushes f1 to 9 us
    assert (4 * US, f2) in after and (9 * US, f1) in after
    assert (4 * US, f1) not in after
    hit = run(p, gs, "foodog", sc.anomalies, sc.clock_offsets, horizon, 0)
    clean = run(p, gs, "foodog", [], sc.clock_offsets, horizon, 0)
    assert delivered_times(hit, f1) == delivered_times(clean, f1)
    dropped = {n for _, kind, sid, n, _ in hit.events if kind == "policed_drop" and sid == f2}
    late = {n for (sid, n), t in hit.ideal_send.items() if sid == f2 and t >= start}
    assert late and dropped == late


def check_planner_soundness():
    for seed in range(20):
        p = random_instance(seed)
        cs_f, out_f = plan(p, "foodog")
        assert out_f.feasible, f"seed {seed}: foodog {out_f.status}"
        assert verify_schedule(p, out_f.schedule, "foodog") == []
        assert verify_schedule(p, out_f.schedule, "comp") == []
        cs_c, out_c = plan(p, "comp")
        assert out_c.feasible, f"seed {seed}: comp {out_c.status}"
        assert verify_schedule(p, out_c.schedule, "comp") == []
        hops = sum(len(s.route) for s in p.streams)
        frames = sum(len(s.route) * (p.cycle // s.period) for s in p.streams)
        assert cs_f.stats[0] == 2 * hops
        assert cs_c.stats[0] == 2 * frames
        assert cs_c.stats[0] * hops == cs_f.stats[0] * frames
        assert build_constraints_comp(p).stats == cs_c.stats


def check_window_soundness():
    rng = random.Random(8)
    for _ in range(1000):
        lo = rng.randint(0, 5000)
        hi = rng.randint(lo, lo + 5000)
        delta = rng.randint(0, 100)
        omega = rng.randint(delta, 10 * MS)
        w = arrival_window(omega, Link("a", "b", min_delay=lo, max_delay=hi), delta)
        delays = {lo, hi} | {rng.randint(lo, hi) for _ in range(8)}
        offsets = {-delta, 0, delta} | {rng.randint(-delta, delta) for _ in range(8)}
        for d in delays:
            for off in offsets:
                assert omega + d + off in w


CRITERIA = [
    (1, "memory bound", check_memory_bound, 1.0),
    (2, "depth constancy", check_depth_constancy, 1.0),
    (3, "reduction range", check_reduction_range, 5.0),
    (4, "policing equivalence", check_policing_equivalence, 5 * 60.0),
    (5, "determinism under anomaly", check_anomaly_determinism, 30.0),
    (6, "toy golden scenario", check_toy_golden, 5.0),
    (7, "planner soundness", check_planner_soundness, 60.0),
    (8, "window soundness", check_window_soundness, 5.0),
]


def evaluate(fn, limit):
    t0 = time.monotonic()
    try:
        fn()
        err = None
    except AssertionError as e:
        err = str(e) or "assertion failed"
    elapsed = time.monotonic() - t0
    if err is None and elapsed >= limit:
        err = f"took {elapsed:.2f}s, limit {limit:.0f}s"
    return err, elapsed


def _line(num, name, err, elapsed):
    status = "PASS" if err is None else "FAIL"
    tail = "" if err is None else f" ({err})"
    return f"criterion {num} {name}: {status} in {elapsed:.2f}s{tail}"


@pytest.mark.parametrize("num,name,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn, limit, capsys):
    err, elapsed = evaluate(fn, limit)
    with capsys.disabled():
        print("\n" + _line(num, name, err, elapsed))
    assert err is None, err


if __name__ == "__main__":
    failed = 0
    for num, name, fn, limit in CRITERIA:
        err, elapsed = evaluate(fn, limit)
        print(_line(num, name, err, elapsed), flush=True)
        failed += err is not None
    sys.exit(1 if failed else 0)
