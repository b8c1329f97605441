"""Complete integer search over a ConstraintSet.

Variables are assigned in declaration order, each taking the smallest value
its domain and the already-decidable clauses allow. A clause is checked at
its last variable, where every atom collapses to a bound, an exclusion or a
constant. Dead ends backjump to the most recent variable implicated in the
clauses that pruned the failing domain (Prosser's CBJ), so the search stays
complete while skipping irrelevant levels.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from ..model import FrameSlot, Schedule
from .constraints import NE, ConstraintSet

log = logging.getLogger(__name__)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
TIMEOUT = "timeout"

_INF = float("inf")


@dataclass
class SolveOutcome:
    status: str
    schedule: Schedule | None = None
    elapsed: float = 0.0
    assignment: dict = field(default_factory=dict)
    nodes: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def _intersect(a, b):
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def _union(sets):
    pieces = sorted(iv for s in sets for iv in s)
    out = []
    for lo, hi in pieces:
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def _covers(allowed, domain):
    return _intersect(allowed, domain) == domain


class _Compiled:
    __slots__ = ("atoms", "vars")

    def __init__(self, atoms, vars_):
        self.atoms = atoms  # [(terms[(pos, coef)], const, is_ne)]
        self.vars = vars_


def _atom_set(atom, pos, vals):
    """Allowed values for the variable at ``pos``; None means unrestricted,
    [] means the atom is false."""
    terms, const, is_ne = atom
    a = 0
    r = const
    for p, c in terms:
        if p == pos:
            a += c
        else:
            r += c * vals[p]
    if a == 0:
        ok = (r != 0) if is_ne else (r >= 0)
        return None if ok else []
    if is_ne:
        if (-r) % a:
            return None
        v = (-r) // a
        return [(-_INF, v - 1), (v + 1, _INF)]
    if a > 0:
        return [(-((r) // a), _INF)]  # a*x + r >= 0  ->  x >= ceil(-r/a)
    return [(-_INF, r // (-a))]


def _allowed(clauses, pos, vals, domain, blame):
    s = domain
    for cl in clauses:
        if not s:
            break
        u = []
        for atom in cl.atoms:
            aset = _atom_set(atom, pos, vals)
            if aset is None:
                break
            u.append(aset)
        else:
            u = _union(u)
            if not _covers(u, s):
                blame |= cl.vars
                s = _intersect(s, u)
    return s


def _next_in(s, cur):
    for lo, hi in s:
        cand = lo if cur is None else max(lo, cur + 1)
        if cand <= hi:
            return int(cand)
    return None


def _difference_bounds(cs, pos, domains):
    """Tighten domains with the single-atom clauses of the form
    ``a*x - b*y + c >= 0`` (a, b > 0) and unary bounds.

    Each variable is scaled by its coefficient so the binary atoms become
    difference constraints ``X - Y >= -c``; Bellman-Ford over them yields
    the tightest bounds and a negative cycle proves infeasibility. Returns
    False when infeasible. Only sound relaxations are used, so no solution
    is ever removed.
    """
    scale = {}
    edges = []  # (u, v, w): X_v - X_u <= w; node -1 is the zero reference
    for clause in cs.constraints:
        if len(clause.atoms) != 1 or clause.atoms[0].rel == NE:
            continue
        atom = clause.atoms[0]
        if len(atom.terms) == 1:
            (name, a), = atom.terms
            x = pos[name]
            lo, hi = domains[x][0] if domains[x] else (1, 0)
            if a > 0:
                lo = max(lo, -(atom.const // a))
            else:
                hi = min(hi, atom.const // -a)
            domains[x] = [(lo, hi)] if lo <= hi else []
            if not domains[x]:
                return False
            continue
        if len(atom.terms) != 2:
            continue
        (n1, a1), (n2, a2) = atom.terms
        if a1 * a2 >= 0:
            continue
        if a1 < 0:
            (n1, a1), (n2, a2) = (n2, a2), (n1, a1)
        x, y = pos[n1], pos[n2]
        if scale.setdefault(x, a1) != a1 or scale.setdefault(y, -a2) != -a2:
            continue
        # X_x - X_y + c >= 0  ->  X_y - X_x <= c
        edges.append((x, y, atom.const))
    if not edges:
        return True
    nodes = sorted(scale)
    if any(not domains[x] for x in nodes):
        return False
    for _ in range(8):
        up = {-1: 0}
        down = {-1: 0}
        full = list(edges)
        for x in nodes:
            lo, hi = domains[x][0]
            full.append((-1, x, hi * scale[x]))
            full.append((x, -1, -lo * scale[x]))
        # upper bounds: shortest paths from the reference; lower bounds:
        # shortest paths into it
        for dist, fwd in ((up, True), (down, False)):
            for it in range(len(nodes) + 2):
                changed = False
                for u, v, w in full:
                    if not fwd:
                        u, v = v, u
                    du = dist.get(u)
                    if du is not None and (v not in dist or du + w < dist[v]):
                        dist[v] = du + w
                        changed = True
                if not changed:
                    break
            else:
                return False
        tightened = False
        for x in nodes:
            lo, hi = domains[x][0]
            nlo = max(lo, -(down[x] // scale[x]))
            nhi = min(hi, up[x] // scale[x])
            if nlo > nhi:
                return False
            if (nlo, nhi) != (lo, hi):
                domains[x] = [(nlo, nhi)]
                tightened = True
        if not tightened:
            break
    return True


def solve(cs: ConstraintSet, seed: int = 0, timeout: float = 60.0) -> SolveOutcome:
    """Find the lexicographically smallest assignment in declaration order.

    When the constraint set declares (omega, rho) pairs, each pair is one
    search level and is enumerated by time first, then queue.

    ``seed`` is accepted for interface stability; the search has no random
    choices, so equal inputs always give equal schedules.
    """
    start = time.monotonic()
    if timeout is not None and timeout <= 0:
        return SolveOutcome(TIMEOUT, elapsed=0.0)

    names = [n for n, _ in cs.variables]
    pos = {n: i for i, n in enumerate(names)}
    domains = [[(lo, hi)] if lo <= hi else [] for _, (lo, hi) in cs.variables]
    n = len(names)
    if not _difference_bounds(cs, pos, domains):
        log.info("difference bounds prove infeasibility")
        return SolveOutcome(INFEASIBLE, elapsed=time.monotonic() - start)

    watched = [[] for _ in range(n)]
    for clause in cs.constraints:
        atoms = []
        vs = set()
        for atom in clause.atoms:
            terms = tuple((pos[nm], c) for nm, c in atom.terms)
            vs.update(p for p, _ in terms)
            atoms.append((terms, atom.const, atom.rel == NE))
        if not vs:
            if not any(_atom_set(a, -1, []) is None for a in atoms):
                return SolveOutcome(INFEASIBLE, elapsed=time.monotonic() - start)
            continue
        watched[max(vs)].append(_Compiled(atoms, vs))

    # search levels: single variables, or (time, queue) pairs
    levels = []
    i = 0
    paired = set(cs.pairs)
    while i < n:
        if i + 1 < n and (names[i], names[i + 1]) in paired:
            levels.append((i, i + 1))
            i += 2
        else:
            levels.append((i,))
            i += 1
    level_of = {}
    for li, lv in enumerate(levels):
        for v in lv:
            level_of[v] = li
    m = len(levels)

    vals = [None] * n
    state = [None] * m  # per level: single -> allowed set; pair -> (ws, {r: set})
    culprits = [None] * m
    conf = [set() for _ in range(m)]
    fresh = True
    d = 0
    nodes = 0
    while d < m:
        nodes += 1
        if nodes % 2048 == 0 and timeout is not None and time.monotonic() - start > timeout:
            return SolveOutcome(TIMEOUT, elapsed=time.monotonic() - start, nodes=nodes)
        lv = levels[d]
        if fresh:
            blame = set()
            if len(lv) == 1:
                x = lv[0]
                state[d] = _allowed(watched[x], x, vals, domains[x], blame)
                vals[x] = None
            else:
                x, y = lv
                vals[x] = vals[y] = None
                ws = _allowed(watched[x], x, vals, domains[x], blame)
                per_r = {}
                for r in range(domains[y][0][0], domains[y][0][1] + 1) if domains[y] else ():
                    vals[y] = r
                    sr = _allowed(watched[y], x, vals, ws, blame)
                    if sr:
                        per_r[r] = sr
                vals[y] = None
                state[d] = (ws, per_r)
            culprits[d] = {level_of[v] for v in blame} - {d}
        if len(lv) == 1:
            x = lv[0]
            nxt = _next_in(state[d], vals[x])
            if nxt is not None:
                vals[x] = nxt
        else:
            x, y = lv
            per_r = state[d][1]
            nxt = None
            if vals[x] is not None:
                # same time, larger queue
                for r in sorted(per_r):
                    if r > vals[y] and _next_in(per_r[r], vals[x] - 1) == vals[x]:
                        nxt = vals[y] = r
                        break
            if nxt is None:
                best = None
                for r in sorted(per_r):
                    w = _next_in(per_r[r], vals[x])
                    if w is not None and (best is None or w < best[0]):
                        best = (w, r)
                if best is not None:
                    vals[x], vals[y] = best
                    nxt = best[0]
        if nxt is None:
            cset = conf[d] | culprits[d]
            if not cset:
                return SolveOutcome(INFEASIBLE, elapsed=time.monotonic() - start, nodes=nodes)
            h = max(cset)
            conf[h] |= cset - {h}
            for e in range(h + 1, d + 1):
                conf[e] = set()
            for e in range(h + 1, d + 1):
                for v in levels[e]:
                    vals[v] = None
            d = h
            fresh = False
            continue
        d += 1
        fresh = True

    assignment = dict(zip(names, vals))
    slots = [
        FrameSlot(r.stream, r.frame_index, tuple(r.link),
                  assignment[r.omega] + r.offset, assignment[r.rho])
        for r in cs.slots
    ]
    elapsed = time.monotonic() - start
    log.info("solved %d variables in %.3fs (%d nodes)", n, elapsed, nodes)
    return SolveOutcome(FEASIBLE, Schedule(slots), elapsed, assignment, nodes)
