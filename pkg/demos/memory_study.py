"""Print the memory grid: standard PSFP bits vs compressed GCL bits."""

import argparse

from foodog.memmodel import WidthConfig, default_grid, depth_report, grid_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ports", type=int, default=4)
    ap.add_argument("--streams", type=int, default=500, help="stream count for the depth table")
    args = ap.parse_args()

    print(f"GCL entries per port, N={args.streams}")
    print(f"{'1ms share':>9} {'standard':>9} {'foodog':>7}")
    for prop, std, fd in depth_report(args.streams, [0.1 + 0.1 * k for k in range(9)]):
        print(f"{prop:9.2f} {std:9d} {fd:7d}")

    counts, props = default_grid()
    rows = grid_report(counts, props, args.ports, WidthConfig())
    worst = min(rows, key=lambda r: r.reduction)
    best = max(rows, key=lambda r: r.reduction)
    print(f"\n{len(rows)} cells, reduction {worst.reduction:.2%} "
          f"(N={worst.streams}, {worst.proportion_small:.0%}) to {best.reduction:.2%} "
          f"(N={best.streams}, {best.proportion_small:.0%})")


if __name__ == "__main__":
    main()
