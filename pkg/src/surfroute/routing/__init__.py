"""Routing program construction, LP solving, rounding and validation."""

from .formulation import (FAMILIES, FormulationConfig, FormulationError, build_formulation,
                          var_x, var_y, var_Y)
from .lp import LpProblem, LpSolution, solve_lp
from .rounding import round_schedule
from .schedule import CodeRoute, IntegralSchedule, RequestSchedule, Segment
from .validate import Violation, validate_schedule


def solve_routing(graph, requests, config: FormulationConfig) -> IntegralSchedule:
    """Build, relax, solve and round in one call."""
    problem = build_formulation(graph, requests, config)
    solution = solve_lp(problem)
    return round_schedule(solution, problem, graph, requests, config)


__all__ = [
    "FAMILIES", "CodeRoute", "FormulationConfig", "FormulationError", "IntegralSchedule",
    "LpProblem", "LpSolution", "RequestSchedule", "Segment", "Violation", "build_formulation",
    "round_schedule", "solve_lp", "solve_routing", "validate_schedule", "var_Y", "var_x", "var_y",
]
