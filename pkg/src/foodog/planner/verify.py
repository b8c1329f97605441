"""Brute-force schedule checker.

Works directly on the problem and the expanded frame list; it shares no code
with the constraint builders so it can serve as their oracle.
"""

from __future__ import annotations

from ..model import Problem, Schedule, link_name


class IncompleteSchedule(ValueError):
    pass


def verify_schedule(p: Problem, s: Schedule, mode: str = "comp") -> list:
    if mode not in ("comp", "foodog"):
        raise ValueError(f"unknown mode {mode!r}")
    links = p.link_map
    T = p.cycle
    d = p.sync_precision

    missing = [
        (st.name, j, link_name(l))
        for st in p.streams
        for j in range(T // st.period)
        for l in st.route
        if s.find(st.id, j, l) is None
    ]
    if missing:
        raise IncompleteSchedule(f"schedule misses {len(missing)} frame slots, e.g. {missing[0]}")

    def ns(st, j, l):
        return s.get(st.id, j, l).tx_time * links[l].granularity

    def dur(st, l):
        return links[l].tx_duration(st.size)

    out = []
    for st in p.streams:
        for j in range(T // st.period):
            for l in st.route:
                slot = s.get(st.id, j, l)
                w = ns(st, j, l)
                if not (j * st.period <= w and w + dur(st, l) <= (j + 1) * st.period):
                    out.append(f"Eq.3 violation: {st.name}[{j}] on {link_name(l)}")
                if not 0 <= slot.queue < links[l].ts_queues:
                    out.append(f"Eq.8 violation: {st.name}[{j}] on {link_name(l)}")
            for a, b in zip(st.route, st.route[1:]):
                if ns(st, j, b) < ns(st, j, a) + dur(st, a) + links[a].max_delay + d:
                    out.append(f"Eq.5 violation: {st.name}[{j}] {link_name(a)}->{link_name(b)}")
            src, dst = st.route[0], st.route[-1]
            if ns(st, j, src) + st.deadline < ns(st, j, dst) + dur(st, dst) + d:
                out.append(f"Eq.6 violation: {st.name}[{j}]")

    for lk in links:
        frames = [
            (st, j) for st in p.streams if lk in st.route for j in range(T // st.period)
        ]
        for x, (si, k) in enumerate(frames):
            wi, di = ns(si, k, lk), dur(si, lk)
            for sj, l in frames[x + 1:]:
                if sj.id == si.id:
                    continue
                wj, dj = ns(sj, l, lk), dur(sj, lk)
                if wi < wj + dj and wj < wi + di:
                    out.append(f"Eq.4 violation: {si.name}[{k}] vs {sj.name}[{l}] on {link_name(lk)}")
                ui, uj = si.prev_link(lk), sj.prev_link(lk)
                if ui is None or uj is None:
                    continue
                if s.get(si.id, k, lk).queue != s.get(sj.id, l, lk).queue:
                    continue
                j_first = wj + d <= ns(si, k, ui) + links[ui].max_delay
                i_first = wi + d <= ns(sj, l, uj) + links[uj].max_delay
                if not (j_first or i_first):
                    out.append(f"Eq.7 violation: {si.name}[{k}] vs {sj.name}[{l}] on {link_name(lk)}")

    if mode == "foodog":
        for st in p.streams:
            for l in st.route:
                first = s.get(st.id, 0, l)
                step = st.period // links[l].granularity
                frames = [s.get(st.id, j, l) for j in range(T // st.period)]
                if any(f.queue != first.queue for f in frames):
                    out.append(f"same-queue violation: {st.name} on {link_name(l)}")
                if any(f.tx_time != first.tx_time + j * step for j, f in enumerate(frames)):
                    out.append(f"periodicity violation: {st.name} on {link_name(l)}")
    return out
