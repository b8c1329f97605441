"""Scenario, schedule and GCL files.

Files are JSON (YAML flow syntax is accepted too). Input is composed into a
node tree first so every schema error can point at a line and column.
Emission is canonical: sorted keys, two-space indent, integers only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml
from yaml.constructor import SafeConstructor

from .gclsynth import (
    GclSet, PeriodWiseGcl, PeriodWiseGclEntry, StdPsfpGcl, StreamWiseGcl, TasGclEntry,
)
from .memmodel import WidthConfig
from .model import END_SYSTEM, SWITCH, FrameSlot, Link, Problem, Schedule, Stream, Vertex
from .simengine import AnomalySpec


class FormatError(ValueError):
    def __init__(self, message, line=None, column=None, source="<input>"):
        self.message, self.line, self.column, self.source = message, line, column, source
        where = f"{source}:{line}:{column}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass
class Scenario:
    problem: Problem
    anomalies: list = field(default_factory=list)
    clock_offsets: dict | None = None


# -- reading

class _Doc:
    """Plain Python value plus the source position of every node."""

    def __init__(self, text, source):
        self.source = source
        self.marks = {}
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
        except yaml.MarkedYAMLError as e:
            m = e.problem_mark
            raise FormatError(e.problem or "syntax error", m.line + 1, m.column + 1, source) from None
        if node is None:
            raise FormatError("empty document", 1, 1, source)
        self._ctor = SafeConstructor()
        self.value = self._walk(node, ())

    def _walk(self, node, path):
        self.marks[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
        if isinstance(node, yaml.MappingNode):
            out = {}
            for k, v in node.value:
                key = self._ctor.construct_object(k)
                if key in out:
                    raise FormatError(f"duplicate key {key!r}", k.start_mark.line + 1,
                                      k.start_mark.column + 1, self.source)
                self.marks[path + (("key", key),)] = (k.start_mark.line + 1, k.start_mark.column + 1)
                out[key] = self._walk(v, path + (key,))
            return out
        if isinstance(node, yaml.SequenceNode):
            return [self._walk(v, path + (i,)) for i, v in enumerate(node.value)]
        return self._ctor.construct_object(node)

    def fail(self, path, message):
        line, col = self.marks.get(tuple(path), (None, None))
        raise FormatError(f"{_path_str(path)}: {message}" if path else message, line, col, self.source)

    def fail_key(self, path, key, message):
        line, col = self.marks.get(tuple(path) + (("key", key),), (None, None))
        raise FormatError(f"{_path_str(list(path) + [key])}: {message}", line, col, self.source)


def _path_str(path):
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _obj(doc, value, path, required, optional=()):
    if not isinstance(value, dict):
        doc.fail(path, "expected an object")
    for k in value:
        if k not in required and k not in optional:
            doc.fail_key(path, k, "unknown key")
    for k in required:
        if k not in value:
            doc.fail(path, f"missing key {k!r}")
    return value


def _int(doc, value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        doc.fail(path, "expected an integer")
    if minimum is not None and value < minimum:
        doc.fail(path, f"must be >= {minimum}")
    return value


def _str(doc, value, path):
    if not isinstance(value, str):
        doc.fail(path, "expected a string")
    return value


def _list(doc, value, path):
    if not isinstance(value, list):
        doc.fail(path, "expected a list")
    return value


def _link_id(doc, value, path):
    _list(doc, value, path)
    if len(value) != 2:
        doc.fail(path, "a link is written [from, to]")
    return (_str(doc, value[0], list(path) + [0]), _str(doc, value[1], list(path) + [1]))


def parse_scenario(text: str, source: str = "<input>") -> Scenario:
    doc = _Doc(text, source)
    top = _obj(doc, doc.value, [], ("vertices", "links", "streams", "sync_precision_ns"),
               ("anomalies", "clock_offsets", "name"))
    verts = []
    for i, v in enumerate(_list(doc, top["vertices"], ["vertices"])):
        p = ["vertices", i]
        _obj(doc, v, p, ("id", "kind"))
        if v["kind"] not in (SWITCH, END_SYSTEM):
            doc.fail(p + ["kind"], f"kind must be {SWITCH!r} or {END_SYSTEM!r}")
        verts.append(Vertex(_str(doc, v["id"], p + ["id"]), v["kind"]))
    links = []
    keys = ("from", "to", "bandwidth_bps", "ts_queues", "min_delay_ns", "max_delay_ns", "granularity_ns")
    for i, l in enumerate(_list(doc, top["links"], ["links"])):
        p = ["links", i]
        _obj(doc, l, p, keys)
        links.append(Link(
            _str(doc, l["from"], p + ["from"]), _str(doc, l["to"], p + ["to"]),
            bandwidth=_int(doc, l["bandwidth_bps"], p + ["bandwidth_bps"]),
            ts_queues=_int(doc, l["ts_queues"], p + ["ts_queues"]),
            min_delay=_int(doc, l["min_delay_ns"], p + ["min_delay_ns"]),
            max_delay=_int(doc, l["max_delay_ns"], p + ["max_delay_ns"]),
            granularity=_int(doc, l["granularity_ns"], p + ["granularity_ns"]),
        ))
    streams = []
    keys = ("id", "route", "size_bytes", "period_ns", "deadline_ns", "jitter_ns")
    for i, s in enumerate(_list(doc, top["streams"], ["streams"])):
        p = ["streams", i]
        _obj(doc, s, p, keys, ("name",))
        route = tuple(_link_id(doc, r, p + ["route", k])
                      for k, r in enumerate(_list(doc, s["route"], p + ["route"])))
        streams.append(Stream(
            id=_int(doc, s["id"], p + ["id"], 0), route=route,
            size=_int(doc, s["size_bytes"], p + ["size_bytes"]),
            period=_int(doc, s["period_ns"], p + ["period_ns"]),
            deadline=_int(doc, s["deadline_ns"], p + ["deadline_ns"]),
            jitter_bound=_int(doc, s["jitter_ns"], p + ["jitter_ns"]),
            name=_str(doc, s.get("name", ""), p + ["name"]) if "name" in s else "",
        ))
    delta = _int(doc, top["sync_precision_ns"], ["sync_precision_ns"])
    anomalies = []
    for i, a in enumerate(_list(doc, top.get("anomalies", []), ["anomalies"])):
        p = ["anomalies", i]
        _obj(doc, a, p, ("stream", "start_ns", "shift_ns"))
        anomalies.append(AnomalySpec(_int(doc, a["stream"], p + ["stream"]),
                                     _int(doc, a["start_ns"], p + ["start_ns"]),
                                     _int(doc, a["shift_ns"], p + ["shift_ns"])))
    offsets = None
    if "clock_offsets" in top:
        raw = top["clock_offsets"]
        if not isinstance(raw, dict):
            doc.fail(["clock_offsets"], "expected an object")
        offsets = {str(k): _int(doc, v, ["clock_offsets", k]) for k, v in raw.items()}
    return Scenario(Problem(verts, links, streams, delta), anomalies, offsets)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


def parse_schedule(text: str, source: str = "<input>") -> tuple:
    """Returns (mode, Schedule)."""
    doc = _Doc(text, source)
    top = _obj(doc, doc.value, [], ("mode", "slots"))
    return _str(doc, top["mode"], ["mode"]), _schedule_from(doc, top["slots"], ["slots"])


def _schedule_from(doc, value, path):
    slots = []
    for i, s in enumerate(_list(doc, value, path)):
        p = list(path) + [i]
        _obj(doc, s, p, ("stream", "frame_index", "link", "tx_time", "queue"))
        slots.append(FrameSlot(_int(doc, s["stream"], p + ["stream"], 0),
                               _int(doc, s["frame_index"], p + ["frame_index"], 0),
                               _link_id(doc, s["link"], p + ["link"]),
                               _int(doc, s["tx_time"], p + ["tx_time"], 0),
                               _int(doc, s["queue"], p + ["queue"], 0)))
    return Schedule(slots)


def _state(doc, value, path):
    if value not in ("open", "closed"):
        doc.fail(path, "gate state must be 'open' or 'closed'")
    return value


def _queue_or_none(doc, value, path):
    return None if value is None else _int(doc, value, path, 0)


def parse_gcls(text: str, source: str = "<input>") -> GclSet:
    doc = _Doc(text, source)
    top = _obj(doc, doc.value, [], ("cycle_ns", "delta_ns", "widths", "ports", "schedule"))
    wp = ["widths"]
    w = _obj(doc, top["widths"], wp, ("w_interval", "w_state", "w_que", "w_time", "w_gate"))
    widths = WidthConfig(**{k: _int(doc, w[k], wp + [k], 0) for k in w})
    gs = GclSet(cycle=_int(doc, top["cycle_ns"], ["cycle_ns"], 1),
                delta=_int(doc, top["delta_ns"], ["delta_ns"], 0), widths=widths,
                schedule=_schedule_from(doc, top["schedule"], ["schedule"]))
    for i, port in enumerate(_list(doc, top["ports"], ["ports"])):
        p = ["ports", i]
        _obj(doc, port, p, ("link",), ("tas", "std_psfp", "period_wise", "stream_wise"))
        link = _link_id(doc, port["link"], p + ["link"])
        if "tas" in port:
            entries = []
            for k, e in enumerate(_list(doc, port["tas"], p + ["tas"])):
                ep = p + ["tas", k]
                _obj(doc, e, ep, ("time_interval", "gate_state", "queue"))
                entries.append(TasGclEntry(_int(doc, e["time_interval"], ep + ["time_interval"], 0),
                                           _state(doc, e["gate_state"], ep + ["gate_state"]),
                                           _queue_or_none(doc, e["queue"], ep + ["queue"])))
            gs.tas[link] = entries
        if "std_psfp" in port:
            lists = []
            for k, g in enumerate(_list(doc, port["std_psfp"], p + ["std_psfp"])):
                gp = p + ["std_psfp", k]
                _obj(doc, g, gp, ("stream", "entries"))
                rows = []
                for r, e in enumerate(_list(doc, g["entries"], gp + ["entries"])):
                    rp = gp + ["entries", r]
                    if not isinstance(e, list) or len(e) != 3:
                        doc.fail(rp, "entry is [gate_state, time_interval, queue]")
                    rows.append((_state(doc, e[0], rp + [0]), _int(doc, e[1], rp + [1], 0),
                                 _queue_or_none(doc, e[2], rp + [2])))
                lists.append(StdPsfpGcl(_int(doc, g["stream"], gp + ["stream"], 0), tuple(rows)))
            gs.std_psfp[link] = lists
        if "period_wise" in port:
            pgcls = []
            for k, g in enumerate(_list(doc, port["period_wise"], p + ["period_wise"])):
                gp = p + ["period_wise", k]
                _obj(doc, g, gp, ("pgcl_cycle", "entries"))
                rows = []
                for r, e in enumerate(_list(doc, g["entries"], gp + ["entries"])):
                    rp = gp + ["entries", r]
                    _obj(doc, e, rp, ("update_time", "gate_id", "gate_state", "queue"))
                    rows.append(PeriodWiseGclEntry(_int(doc, e["update_time"], rp + ["update_time"], 0),
                                                   _int(doc, e["gate_id"], rp + ["gate_id"], 0),
                                                   _state(doc, e["gate_state"], rp + ["gate_state"]),
                                                   _int(doc, e["queue"], rp + ["queue"], 0)))
                pgcls.append(PeriodWiseGcl(_int(doc, g["pgcl_cycle"], gp + ["pgcl_cycle"], 1), tuple(rows)))
            gs.period_wise[link] = pgcls
        if "stream_wise" in port:
            rows = []
            for r, e in enumerate(_list(doc, port["stream_wise"], p + ["stream_wise"])):
                rp = p + ["stream_wise", r]
                if not isinstance(e, list) or len(e) != 2:
                    doc.fail(rp, "entry is [gate_state, queue]")
                rows.append((_state(doc, e[0], rp + [0]), _int(doc, e[1], rp + [1], 0)))
            gs.stream_wise[link] = StreamWiseGcl(rows)
    return gs


# -- writing

def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def scenario_dict(sc: Scenario) -> dict:
    p = sc.problem
    out = {
        "vertices": [{"id": v.id, "kind": v.kind} for v in p.vertices],
        "links": [{"from": l.src, "to": l.dst, "bandwidth_bps": l.bandwidth, "ts_queues": l.ts_queues,
                   "min_delay_ns": l.min_delay, "max_delay_ns": l.max_delay,
                   "granularity_ns": l.granularity} for l in p.links],
        "streams": [{"id": s.id, "name": s.name, "route": [list(r) for r in s.route],
                     "size_bytes": s.size, "period_ns": s.period, "deadline_ns": s.deadline,
                     "jitter_ns": s.jitter_bound} for s in p.streams],
        "sync_precision_ns": p.sync_precision,
        "anomalies": [{"stream": a.stream, "start_ns": a.start, "shift_ns": a.shift} for a in sc.anomalies],
    }
    if sc.clock_offsets is not None:
        out["clock_offsets"] = dict(sc.clock_offsets)
    return out


def dump_scenario(sc: Scenario) -> str:
    return canonical(scenario_dict(sc))


def _slots_list(schedule):
    return [{"stream": s.stream, "frame_index": s.frame_index, "link": list(s.link),
             "tx_time": s.tx_time, "queue": s.queue} for s in sorted(schedule.slots)]


def dump_schedule(schedule: Schedule, mode: str) -> str:
    return canonical({"mode": mode, "slots": _slots_list(schedule)})


def gcls_dict(gs: GclSet) -> dict:
    w = gs.widths or WidthConfig()
    ports = {}
    for link, entries in gs.tas.items():
        ports.setdefault(link, {})["tas"] = [
            {"time_interval": e.time_interval, "gate_state": e.gate_state, "queue": e.queue} for e in entries]
    for link, lists in gs.std_psfp.items():
        ports.setdefault(link, {})["std_psfp"] = [
            {"stream": g.stream, "entries": [list(e) for e in g.entries]} for g in lists]
    for link, pgcls in gs.period_wise.items():
        ports.setdefault(link, {})["period_wise"] = [
            {"pgcl_cycle": g.pgcl_cycle,
             "entries": [{"update_time": e.update_time, "gate_id": e.gate_id,
                          "gate_state": e.gate_state, "queue": e.queue} for e in g.entries]}
            for g in pgcls]
    for link, sg in gs.stream_wise.items():
        ports.setdefault(link, {})["stream_wise"] = [list(e) for e in sg.entries]
    return {
        "cycle_ns": gs.cycle,
        "delta_ns": gs.delta,
        "widths": {"w_interval": w.w_interval, "w_state": w.w_state, "w_que": w.w_que,
                   "w_time": w.w_time, "w_gate": w.w_gate},
        "ports": [dict(link=list(link), **ports[link]) for link in sorted(ports)],
        "schedule": _slots_list(gs.schedule or Schedule()),
    }


def dump_gcls(gs: GclSet) -> str:
    return canonical(gcls_dict(gs))


# -- bundled scenarios

BUNDLED = ("toy", "aerospace")


def bundled_path(name: str):
    return resources.files("foodog") / "scenarios" / f"{name}.json"


def bundled_scenario(name: str) -> Scenario:
    path = bundled_path(name)
    return parse_scenario(path.read_text(), f"{name}.json")
