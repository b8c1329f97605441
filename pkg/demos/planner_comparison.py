"""Constraint counts and solve times: per-frame expansion vs first-frame planning."""

import argparse

from foodog.planner import plan
from foodog.workloads import random_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--streams", nargs="+", type=int, default=[5, 10, 20])
    ap.add_argument("--timeout-s", type=float, default=30.0)
    args = ap.parse_args()

    print(f"{'streams':>7} {'seed':>4} {'mode':>6} {'vars':>6} {'cons':>7} {'status':>10} {'secs':>7}")
    for n in args.streams:
        for seed in range(args.instances):
            p = random_instance(seed, n_streams=n)
            for mode in ("comp", "foodog"):
                cs, out = plan(p, mode, timeout=args.timeout_s)
                v, c = cs.stats
                print(f"{n:>7} {seed:>4} {mode:>6} {v:>6} {c:>7} {out.status:>10} {out.elapsed:>7.3f}")


if __name__ == "__main__":
    main()
