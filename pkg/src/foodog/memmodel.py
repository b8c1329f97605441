"""Closed-form GCL memory footprints.

``mem_standard`` sizes one per-frame gate list per stream and port;
``mem_foodog`` sizes the period-wise lists (two entries per stream) plus the
stream-wise state table. Values are theoretical bit counts; block-RAM
packing overheads are not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WidthConfig:
    w_interval: int = 32
    w_state: int = 1
    w_que: int = 3
    w_time: int = 32
    w_gate: int = 9

    @property
    def std_entry(self) -> int:
        return self.w_interval + self.w_state + self.w_que

    @property
    def pgcl_entry(self) -> int:
        return self.w_time + self.w_gate + self.w_state + self.w_que

    @property
    def sgcl_entry(self) -> int:
        return self.w_state + self.w_que


@dataclass(frozen=True)
class MemReport:
    ports: int
    streams: int
    proportion_small: float
    std_bits: int
    foodog_bits: int

    @property
    def reduction(self) -> float:
        if self.std_bits == 0:
            return 0.0
        return 1.0 - self.foodog_bits / self.std_bits


def gate_width(n_streams: int) -> int:
    """Bits needed to address ``n_streams`` gates."""
    return math.ceil(math.log2(n_streams)) if n_streams > 1 else 0


def default_widths(n_streams: int) -> WidthConfig:
    return WidthConfig(w_gate=max(gate_width(n_streams), 1))


def std_depth(period: int, cycle: int) -> int:
    if cycle % period:
        raise ValueError(f"cycle {cycle} is not a multiple of period {period}")
    return 2 * (cycle // period) + 1


def mem_standard(ports: int, periods, cycle: int, w: WidthConfig = WidthConfig()) -> int:
    """Standard PSFP bits: ports * sum over streams of width * (2T/T_i + 1)."""
    return ports * sum(w.std_entry * std_depth(p, cycle) for p in periods)


def mem_foodog(ports: int, n_streams: int, pgcl_depth: int | None = None,
               w: WidthConfig = WidthConfig()) -> int:
    if pgcl_depth is None:
        pgcl_depth = 2 * n_streams
    if pgcl_depth < 2 * n_streams:
        raise ValueError(f"period-wise depth {pgcl_depth} below 2N = {2 * n_streams}")
    if w.w_gate < gate_width(n_streams):
        raise ValueError(f"gate id width {w.w_gate} cannot address {n_streams} streams")
    return ports * (w.pgcl_entry * pgcl_depth + w.sgcl_entry * n_streams)


def split_counts(n_streams: int, proportion: float) -> tuple:
    """(small, large) stream counts, rounding the small share half up."""
    small = math.floor(n_streams * proportion + 0.5)
    return small, n_streams - small


def _mix(n_streams, proportion, periods):
    small, large = split_counts(n_streams, proportion)
    return [periods[0]] * small + [periods[1]] * large


def depth_report(n_streams: int, proportions, periods=(1_000_000, 100_000_000)) -> list:
    """Rows of (proportion, standard total entries, compressed total entries)."""
    rows = []
    for prop in proportions:
        if not 0 <= prop <= 1:
            raise ValueError(f"proportion {prop} outside [0, 1]")
        mix = _mix(n_streams, prop, periods)
        cycle = math.lcm(*mix) if mix else 1
        rows.append((prop, sum(std_depth(p, cycle) for p in mix), 2 * n_streams))
    return rows


def grid_report(stream_counts, proportions, ports: int = 4, widths: WidthConfig | None = None,
                periods=(1_000_000, 100_000_000), pgcl_depth: int | None = None) -> list:
    """One MemReport per (stream count, proportion) cell.

    Without explicit ``widths`` the gate id width follows the stream count of
    each cell.
    """
    out = []
    for n in stream_counts:
        w = widths or default_widths(n)
        for prop in proportions:
            mix = _mix(n, prop, periods)
            cycle = math.lcm(*mix) if mix else 1
            out.append(MemReport(
                ports=ports,
                streams=n,
                proportion_small=float(prop),
                std_bits=mem_standard(ports, mix, cycle, w),
                foodog_bits=mem_foodog(ports, n, pgcl_depth, w),
            ))
    return out


def default_grid() -> tuple:
    """Stream counts 100..500 step 50 and 1 ms shares 10%..90% step 5%."""
    counts = list(range(100, 501, 50))
    props = [float(x) for x in np.round(np.arange(0.10, 0.9001, 0.05), 2)]
    return counts, props
