"""Aerospace network: stream f0 drifts by 3 us after 24 ms.

Compares victim jitter with no policing, standard PSFP and compressed GCLs.
"""

import argparse

from foodog import formats
from foodog.gclsynth import synth_all
from foodog.planner import plan
from foodog.simengine import metrics, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cycles", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sc = formats.bundled_scenario("aerospace")
    p = sc.problem
    _, out = plan(p)
    gs = synth_all(p, out.schedule)
    names = {s.id: s.name for s in p.streams}
    print(f"planned in {out.elapsed:.3f}s, cycle {p.cycle} ns, {args.cycles} cycles")
    print(f"{'mode':>14} " + " ".join(f"{names[s]:>10}" for s in sorted(names)))
    for mode in ("none", "standard_psfp", "foodog"):
        tr = run(p, gs, mode, sc.anomalies, sc.clock_offsets, args.cycles * p.cycle, args.seed)
        cells = []
        for m in metrics(tr):
            cells.append(f"{m.jitter:>7} ns" if m.drops == 0 else f"{m.drops:>4} drops")
        print(f"{mode:>14} " + " ".join(f"{c:>10}" for c in cells))


if __name__ == "__main__":
    main()
