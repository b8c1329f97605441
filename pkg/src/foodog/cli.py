"""Command-line pipeline: plan -> synth -> simulate, plus the memory report.

Exit codes: 0 success, 1 unreadable or invalid input, 2 infeasible plan or
failed verification or mismatched inputs, 3 solver timeout.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import formats
from .gclsynth import SynthesisError, depth_summary, synth_all
from .memmodel import WidthConfig, grid_report, default_grid
from .model import link_name, validate_problem
from .planner import FEASIBLE, INFEASIBLE, plan, verify_schedule
from .planner.verify import IncompleteSchedule
from .simengine import metrics, run, write_metrics_csv, write_trace_csv

log = logging.getLogger("foodog")

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_TIMEOUT = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_scenario(path):
    try:
        sc = formats.load_scenario(path)
    except formats.FormatError as e:
        raise CliError(str(e), EXIT_INPUT) from None
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_INPUT) from None
    problems = validate_problem(sc.problem)
    if problems:
        raise CliError(f"{path}: invalid scenario: " + "; ".join(problems), EXIT_INPUT)
    return sc


def _read(path, parser):
    try:
        return parser(Path(path).read_text(), str(path))
    except formats.FormatError as e:
        raise CliError(str(e), EXIT_INPUT) from None
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_INPUT) from None


def _write(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_plan(args):
    sc = _load_scenario(args.scenario)
    cs, outcome = plan(sc.problem, args.mode, seed=args.seed, timeout=args.timeout_s)
    n_vars, n_cons = cs.stats
    print(f"mode={args.mode} variables={n_vars} constraints={n_cons} "
          f"status={outcome.status} elapsed={outcome.elapsed:.3f}s")
    if outcome.status == INFEASIBLE:
        return EXIT_FAIL
    if outcome.status != FEASIBLE:
        return EXIT_TIMEOUT
    problems = verify_schedule(sc.problem, outcome.schedule, args.mode)
    if problems:
        raise CliError("solver output failed verification: " + problems[0], EXIT_FAIL)
    _write(args.out, formats.dump_schedule(outcome.schedule, args.mode))
    return EXIT_OK


def cmd_synth(args):
    sc = _load_scenario(args.scenario)
    _, schedule = _read(args.schedule, formats.parse_schedule)
    try:
        gs = synth_all(sc.problem, schedule)
    except IncompleteSchedule as e:
        raise CliError(f"schedule incomplete: {e}", EXIT_FAIL) from None
    except SynthesisError as e:
        raise CliError(f"cannot synthesize: {e}", EXIT_FAIL) from None
    _write(args.out, formats.dump_gcls(gs))
    for port, (pw, sw, std) in sorted(depth_summary(gs).items()):
        print(f"{link_name(port)} period_wise={pw} stream_wise={sw} standard={std}", file=sys.stderr)
    return EXIT_OK


def _check_match(problem, gs):
    ids = {s.id for s in problem.streams}
    planned = {s.stream for s in gs.schedule.slots}
    if planned != ids:
        return f"scenario streams {sorted(ids)} differ from planned streams {sorted(planned)}"
    if gs.cycle != problem.cycle:
        return f"gate lists span {gs.cycle} ns but the scenario cycle is {problem.cycle} ns"
    problems = verify_schedule(problem, gs.schedule, "comp")
    if problems:
        return "embedded schedule does not fit the scenario: " + problems[0]
    for port, sg in gs.stream_wise.items():
        if len(sg) != len(problem.streams):
            return f"stream-wise table at {link_name(port)} has {len(sg)} entries for {len(ids)} streams"
    return None


def cmd_simulate(args):
    sc = _load_scenario(args.scenario)
    gs = _read(args.gcls, formats.parse_gcls)
    try:
        mismatch = _check_match(sc.problem, gs)
    except IncompleteSchedule as e:
        mismatch = f"embedded schedule incomplete: {e}"
    if mismatch:
        raise CliError(mismatch, EXIT_FAIL)
    horizon = args.horizon_ns or 10 * sc.problem.cycle
    anomalies = [] if args.no_anomalies else sc.anomalies
    try:
        trace = run(sc.problem, gs, args.mode, anomalies, sc.clock_offsets, horizon, args.seed)
        rows = metrics(trace, args.warmup_ns)
    except ValueError as e:
        raise CliError(str(e), EXIT_INPUT) from None
    prefix = args.out or "sim"
    with open(f"{prefix}_trace.csv", "w", newline="") as fh:
        write_trace_csv(trace, fh)
    with open(f"{prefix}_metrics.csv", "w", newline="") as fh:
        write_metrics_csv(rows, fh)
    names = {s.id: s.name for s in sc.problem.streams}
    for m in rows:
        jit = "n/a" if m.jitter is None else f"{m.jitter} ns"
        print(f"{names[m.stream]}: delivered={m.delivered} drops={m.drops} jitter={jit}")
    return EXIT_OK


def _span(text, kind):
    """Parse ``a:b:step`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, hi, step = (kind(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            out, k = [], 0
            while lo + k * step <= hi + (1e-9 if kind is float else 0):
                out.append(round(lo + k * step, 6) if kind is float else lo + k * step)
                k += 1
            return out
        return [kind(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def cmd_memreport(args):
    counts, props = default_grid()
    counts = args.streams or counts
    props = args.proportions or props
    widths = None
    if args.w_gate is not None or args.fixed_widths:
        widths = WidthConfig(args.w_interval, args.w_state, args.w_que, args.w_time,
                             args.w_gate if args.w_gate is not None else 9)
    rows = grid_report(counts, props, args.ports, widths, periods=(args.small_ns, args.large_ns),
                       pgcl_depth=args.pgcl_depth)
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ports", "streams", "proportion_small", "std_bits", "foodog_bits", "reduction"])
        for r in rows:
            w.writerow([r.ports, r.streams, f"{r.proportion_small:.2f}", r.std_bits, r.foodog_bits,
                        f"{r.reduction:.6f}"])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_scenario(args):
    if args.name is None:
        print("\n".join(formats.BUNDLED))
        return EXIT_OK
    if args.name.endswith("_plan"):
        _write(args.out, formats.bundled_path(args.name).read_text())
        return EXIT_OK
    if args.name not in formats.BUNDLED:
        raise CliError(f"no bundled scenario {args.name!r}", EXIT_INPUT)
    _write(args.out, formats.dump_scenario(formats.bundled_scenario(args.name)))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="foodog", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve transmission times and queues")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=("comp", "foodog"), default="foodog")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout-s", type=float, default=60.0)
    p.add_argument("--out", help="schedule file (default stdout)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("synth", help="derive all gate control lists from a schedule")
    p.add_argument("scenario")
    p.add_argument("schedule")
    p.add_argument("--out", help="GCL file (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="run the network and report delay and jitter")
    p.add_argument("scenario")
    p.add_argument("gcls")
    p.add_argument("--mode", choices=("none", "standard_psfp", "foodog"), default="foodog")
    p.add_argument("--horizon-ns", type=int, default=None, help="default: ten network cycles")
    p.add_argument("--warmup-ns", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-anomalies", action="store_true")
    p.add_argument("--out", help="prefix for <out>_trace.csv and <out>_metrics.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("memreport", help="theoretical memory grid as CSV")
    p.add_argument("--streams", type=lambda t: _span(t, int), help="e.g. 100:500:50")
    p.add_argument("--proportions", type=lambda t: _span(t, float), help="e.g. 0.1:0.9:0.05")
    p.add_argument("--ports", type=int, default=4)
    p.add_argument("--small-ns", type=int, default=1_000_000)
    p.add_argument("--large-ns", type=int, default=100_000_000)
    p.add_argument("--pgcl-depth", type=int, default=None, help="default: 2N")
    p.add_argument("--w-interval", type=int, default=32)
    p.add_argument("--w-state", type=int, default=1)
    p.add_argument("--w-que", type=int, default=3)
    p.add_argument("--w-time", type=int, default=32)
    p.add_argument("--w-gate", type=int, default=None, help="default: ceil(log2 N) per row")
    p.add_argument("--fixed-widths", action="store_true", help="use the given widths for every row")
    p.add_argument("--out")
    p.set_defaults(func=cmd_memreport)

    p = sub.add_parser("scenario", help="list or print a bundled scenario")
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario)
    return ap


def main(argv=None):
    level = os.environ.get("FOODOG_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
