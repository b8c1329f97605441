"""Constraint systems for traffic planning.

Two builders share one representation. ``build_constraints_comp`` solves a
transmission time and queue for every frame of every stream inside the
network cycle; ``build_constraints_foodog`` only solves the first frame of
each stream per link and derives the rest as ``omega + j * period``.

A constraint is a disjunction (``Clause``) of linear atoms. An atom reads
``sum(coef * var) + const >= 0`` or ``... != 0``. Time atoms are written in
nanoseconds; variable values are ticks and carry the link granularity as
their coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..model import Problem, link_name, validate_problem

GE = ">="
NE = "!="


@dataclass(frozen=True)
class Atom:
    terms: tuple  # ((var_name, coef), ...), merged and zero-free
    const: int
    rel: str = GE

    @classmethod
    def make(cls, terms, const=0, rel=GE):
        merged = {}
        for name, coef in terms:
            merged[name] = merged.get(name, 0) + coef
        return cls(tuple((n, c) for n, c in merged.items() if c), const, rel)

    def holds(self, values) -> bool:
        total = self.const + sum(c * values[n] for n, c in self.terms)
        return total >= 0 if self.rel == GE else total != 0

    def __str__(self):
        parts = [f"{c}*{n}" for n, c in self.terms]
        return f"{' + '.join(parts) or '0'} + {self.const} {self.rel} 0"


@dataclass(frozen=True)
class Clause:
    atoms: tuple
    family: str  # "eq3" .. "eq8"
    label: str = ""

    def holds(self, values) -> bool:
        return any(a.holds(values) for a in self.atoms)

    @property
    def variables(self) -> set:
        return {n for a in self.atoms for n, _ in a.terms}


@dataclass(frozen=True)
class SlotRef:
    """Maps one frame on one link to solver variables.

    ``offset`` is added (in ticks) to the omega variable; it is nonzero for
    frames derived from a first-frame variable.
    """

    stream: int
    frame_index: int
    link: tuple
    omega: str
    rho: str
    offset: int = 0


@dataclass
class ConstraintSet:
    variables: list = field(default_factory=list)  # [(name, (lo, hi))]
    constraints: list = field(default_factory=list)  # [Clause]
    slots: list = field(default_factory=list)  # [SlotRef]
    pairs: list = field(default_factory=list)  # [(omega_name, rho_name)]
    mode: str = "comp"

    @property
    def stats(self) -> tuple:
        return constraint_stats(self)

    def check_references(self) -> list:
        declared = {n for n, _ in self.variables}
        return [c.label for c in self.constraints if not c.variables <= declared]

    def family_counts(self) -> dict:
        counts = {}
        for c in self.constraints:
            counts[c.family] = counts.get(c.family, 0) + 1
        return counts


def constraint_stats(cs: ConstraintSet) -> tuple:
    """(variable count, constraint count)."""
    return len(cs.variables), len(cs.constraints)


def omega_name(stream, frame, link):
    return f"omega[f{stream}#{frame}@{link[0]}->{link[1]}]"


def rho_name(stream, frame, link):
    return f"rho[f{stream}#{frame}@{link[0]}->{link[1]}]"


def _check(p: Problem):
    problems = validate_problem(p)
    if problems:
        raise ValueError("invalid problem: " + "; ".join(problems))


class _Builder:
    def __init__(self, p: Problem):
        self.p = p
        self.links = p.link_map
        self.delta = p.sync_precision
        self.cs = ConstraintSet()

    def var(self, name, lo, hi):
        self.cs.variables.append((name, (lo, hi)))

    def add(self, atoms, family, label):
        self.cs.constraints.append(Clause(tuple(atoms), family, label))

    def dur(self, s, link):
        return self.links[link].tx_duration(s.size)

    def t(self, link):
        return self.links[link].granularity

    def declare_frame(self, s, j, link):
        """Declare omega/rho for frame ``j`` and emit its period and queue
        constraints. Returns the SlotRef."""
        t = self.t(link)
        dur = self.dur(s, link)
        w, r = omega_name(s.id, j, link), rho_name(s.id, j, link)
        lo = -(-j * s.period // t)
        hi = ((j + 1) * s.period - dur) // t
        self.var(w, lo, hi)
        self.var(r, 0, self.links[link].ts_queues - 1)
        self.cs.pairs.append((w, r))
        # frame inside its own period, transmission finished before the next
        self.add([Atom.make([(w, t)], -j * s.period)], "eq3",
                 f"eq3 f{s.id}[{j}] {link_name(link)} lower")
        self.add([Atom.make([(w, -t)], (j + 1) * s.period - dur)], "eq3",
                 f"eq3 f{s.id}[{j}] {link_name(link)} upper")
        self.add([Atom.make([(r, 1)], 0)], "eq8", f"eq8 f{s.id}[{j}] {link_name(link)} lower")
        self.add([Atom.make([(r, -1)], self.links[link].ts_queues - 1)], "eq8",
                 f"eq8 f{s.id}[{j}] {link_name(link)} upper")
        return SlotRef(s.id, j, link, w, r, 0)

    def sequence(self, s, up: SlotRef, down: SlotRef):
        a, b = up.link, down.link
        ta, tb = self.t(a), self.t(b)
        l = self.links[a]
        const = (tb * down.offset - ta * up.offset
                 - self.dur(s, a) - l.max_delay - self.delta)
        self.add([Atom.make([(down.omega, tb), (up.omega, -ta)], const)], "eq5",
                 f"eq5 f{s.id}[{up.frame_index}] {link_name(a)}->{link_name(b)}")

    def deadline(self, s, src: SlotRef, dst: SlotRef):
        ts, td = self.t(src.link), self.t(dst.link)
        const = (ts * src.offset + s.deadline - td * dst.offset
                 - self.dur(s, dst.link) - self.delta)
        self.add([Atom.make([(src.omega, ts), (dst.omega, -td)], const)], "eq6",
                 f"eq6 f{s.id}[{src.frame_index}]")

    def contention(self, si, fi: SlotRef, sj, fj: SlotRef, link):
        t = self.t(link)
        di, dj = self.dur(si, link), self.dur(sj, link)
        # i after j, or j after i
        a1 = Atom.make([(fi.omega, t), (fj.omega, -t)], t * (fi.offset - fj.offset) - dj)
        a2 = Atom.make([(fj.omega, t), (fi.omega, -t)], t * (fj.offset - fi.offset) - di)
        self.add([a1, a2], "eq4",
                 f"eq4 f{si.id}[{fi.frame_index}] vs f{sj.id}[{fj.frame_index}] on {link_name(link)}")

    def isolation(self, si, fi, ui, sj, fj, uj, link):
        """Frame isolation on ``link`` for frames fi/fj whose upstream slots
        are ui/uj: j leaves before i can arrive, or i leaves before j can
        arrive, or they use different queues."""
        t = self.t(link)
        tx, ty = self.t(ui.link), self.t(uj.link)
        mx, my = self.links[ui.link].max_delay, self.links[uj.link].max_delay
        d = self.delta
        a1 = Atom.make([(ui.omega, tx), (fj.omega, -t)],
                       tx * ui.offset + mx - t * fj.offset - d)
        a2 = Atom.make([(uj.omega, ty), (fi.omega, -t)],
                       ty * uj.offset + my - t * fi.offset - d)
        a3 = Atom.make([(fi.rho, 1), (fj.rho, -1)], 0, NE)
        self.add([a1, a2, a3], "eq7",
                 f"eq7 f{si.id}[{fi.frame_index}] vs f{sj.id}[{fj.frame_index}] on {link_name(link)}")


def _windows_overlap(ti, k, tj, l):
    return k * ti < (l + 1) * tj and l * tj < (k + 1) * ti


def build_constraints_comp(p: Problem) -> ConstraintSet:
    """Per-frame formulation: one (omega, rho) pair per frame per link."""
    _check(p)
    b = _Builder(p)
    b.cs.mode = "comp"
    T = p.cycle
    refs = {}
    for s in p.streams:
        for j in range(T // s.period):
            for link in s.route:
                refs[(s.id, j, link)] = b.declare_frame(s, j, link)
    b.cs.slots = list(refs.values())

    for s in p.streams:
        for j in range(T // s.period):
            for up, down in zip(s.route, s.route[1:]):
                b.sequence(s, refs[(s.id, j, up)], refs[(s.id, j, down)])
            b.deadline(s, refs[(s.id, j, s.route[0])], refs[(s.id, j, s.route[-1])])

    for link in (l.id for l in p.links):
        on = p.streams_on(link)
        for x, si in enumerate(on):
            for sj in on[x + 1:]:
                for k in range(T // si.period):
                    for l in range(T // sj.period):
                        # frames confined to disjoint period windows cannot meet
                        if not _windows_overlap(si.period, k, sj.period, l):
                            continue
                        fi, fj = refs[(si.id, k, link)], refs[(sj.id, l, link)]
                        b.contention(si, fi, sj, fj, link)
                        ui, uj = si.prev_link(link), sj.prev_link(link)
                        if ui is not None and uj is not None:
                            b.isolation(si, fi, refs[(si.id, k, ui)],
                                        sj, fj, refs[(sj.id, l, uj)], link)
    return b.cs


def build_constraints_foodog(p: Problem) -> ConstraintSet:
    """First-frame formulation with same-queue, strictly periodic frames."""
    _check(p)
    b = _Builder(p)
    b.cs.mode = "foodog"
    T = p.cycle
    first = {}
    for s in p.streams:
        for link in s.route:
            first[(s.id, link)] = b.declare_frame(s, 0, link)

    def point(s, link, k):
        ref = first[(s.id, link)]
        return SlotRef(s.id, k, link, ref.omega, ref.rho, k * s.period // b.t(link))

    b.cs.slots = [point(s, link, j) for s in p.streams
                  for j in range(T // s.period) for link in s.route]

    for s in p.streams:
        for up, down in zip(s.route, s.route[1:]):
            b.sequence(s, first[(s.id, up)], first[(s.id, down)])
        b.deadline(s, first[(s.id, s.route[0])], first[(s.id, s.route[-1])])

    for link in (l.id for l in p.links):
        on = p.streams_on(link)
        for x, si in enumerate(on):
            for sj in on[x + 1:]:
                hp = math.lcm(si.period, sj.period)
                ui, uj = si.prev_link(link), sj.prev_link(link)
                for k in range(hp // si.period):
                    for l in range(hp // sj.period):
                        fi, fj = point(si, link, k), point(sj, link, l)
                        b.contention(si, fi, sj, fj, link)
                        if ui is not None and uj is not None:
                            b.isolation(si, fi, point(si, ui, k), sj, fj, point(sj, uj, l), link)
    return b.cs
