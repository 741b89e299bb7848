"""Motion planning for two point robots joined by a cable of bounded length."""

from .cable import TautCable, cable_after_move, tighten
from .planner import Infeasible, PlanOptions, Solution, plan
from .scenario import Scenario, load_scenario, validate

__all__ = [
    "Infeasible",
    "PlanOptions",
    "Scenario",
    "Solution",
    "TautCable",
    "cable_after_move",
    "load_scenario",
    "plan",
    "tighten",
    "validate",
]
