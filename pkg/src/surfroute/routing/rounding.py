from __future__ import annotations

import math
from typing import Sequence

from ..netmodel import NetworkGraph, Request
from .formulation import FormulationConfig, arc_costs, request_budget, var_Y, var_y
from .lp import OPTIMAL, LpProblem, LpSolution
from .paths import Residual, plan_code
from .schedule import IntegralSchedule, RequestSchedule

FLOOR_SLACK = 1e-9
SUPPORT_EPS = 1e-7


def round_schedule(solution: LpSolution, problem: LpProblem, graph: NetworkGraph,
                   requests: Sequence[Request], config: FormulationConfig) -> IntegralSchedule:
    """Turn an optimal relaxed solution into a feasible integral schedule.

    Each request keeps ``floor(Y_k)`` codes as its target. Requests are served
    in order of decreasing fractional ``Y_k`` and every code is routed on the
    residual network, favouring the arcs the relaxation used. Codes that do
    not fit, or whose own fidelity row is violated, are dropped.
    """
    if solution.status != OPTIMAL:
        raise ValueError(f"cannot round a solution with status {solution.status!r}")
    frac = [solution.value(problem, var_Y(k)) for k in range(len(requests))]
    order = sorted(range(len(requests)), key=lambda k: (-frac[k], k))
    residual = Residual(graph)
    scheds = [RequestSchedule() for _ in requests]
    arcs = graph.arcs
    for k in order:
        req = requests[k]
        target = int(math.floor(frac[k] + FLOOR_SLACK))
        if target <= 0:
            continue
        cost = arc_costs(graph, req.n, config)
        budget = request_budget(graph, req, config)
        preferred = {a for a in arcs if solution.value(problem, var_y(k, a)) > SUPPORT_EPS}
        for _ in range(target):
            room = {a: req.n * req.m - scheds[k].flows.get(a, 0) for a in arcs}
            plan = plan_code(graph, residual, k, req, cost, budget, config.ec_reward,
                             error_correction=config.error_correction,
                             preferred=preferred, flow_room=room)
            if plan is None:
                # later codes of this request face the same or less room
                break
            residual = plan.residual
            scheds[k].add_route(plan.route)
    return IntegralSchedule(scheds, lp_objective=solution.objective,
                            model="surfacenet" if config.error_correction else "raw")
