from .constraints import (
    Atom,
    Clause,
    ConstraintSet,
    build_constraints_comp,
    build_constraints_foodog,
    constraint_stats,
)
from .search import FEASIBLE, INFEASIBLE, TIMEOUT, SolveOutcome, solve
from .verify import IncompleteSchedule, verify_schedule


def plan(problem, mode="foodog", seed=0, timeout=60.0):
    """Build the constraint system for ``mode`` and solve it."""
    build = build_constraints_foodog if mode == "foodog" else build_constraints_comp
    cs = build(problem)
    return cs, solve(cs, seed=seed, timeout=timeout)


__all__ = [
    "Atom", "Clause", "ConstraintSet", "SolveOutcome", "IncompleteSchedule",
    "FEASIBLE", "INFEASIBLE", "TIMEOUT",
    "build_constraints_comp", "build_constraints_foodog", "constraint_stats",
    "solve", "verify_schedule", "plan",
]
