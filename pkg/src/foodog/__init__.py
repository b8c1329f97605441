"""Memory-efficient per-stream policing for time-sensitive networks."""

from .gclsynth import (
    ArrivalWindow, GclSet, PeriodWiseGcl, PeriodWiseGclEntry, StdPsfpGcl, StreamWiseGcl,
    TasGclEntry, arrival_window, synth_all, synth_foodog, synth_standard_psfp, synth_tas,
)
from .memmodel import MemReport, WidthConfig, depth_report, grid_report, mem_foodog, mem_standard
from .model import (
    FrameSlot, Link, Problem, Schedule, Stream, Vertex, network_cycle_period, validate_problem,
)
from .planner import (
    ConstraintSet, SolveOutcome, build_constraints_comp, build_constraints_foodog,
    constraint_stats, plan, solve, verify_schedule,
)
from .simengine import (
    AnomalySpec, FrameDescriptor, SimTrace, StreamMetrics, UpdateUnit, gate_update_step,
    metrics, police_foodog, police_standard, run,
)

__version__ = "0.1.0"
