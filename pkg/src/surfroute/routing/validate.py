from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..netmodel import NetworkGraph, Request
from .formulation import (F_ARC_CAP, F_CONSERVATION, F_FIDELITY, F_SERVER_EC, F_SINK_IN,
                          F_SINK_OUT, F_SOURCE_IN, F_SOURCE_OUT, F_SWITCH_CAP,
                          FormulationConfig, arc_costs, request_budget)
from .schedule import IntegralSchedule

BOUNDS = "bounds"
FIDELITY_SLACK = 1e-9


@dataclass(frozen=True)
class Violation:
    family: str
    request: int | None
    location: str
    detail: str

    def __str__(self) -> str:
        who = "all requests" if self.request is None else f"request {self.request}"
        return f"{self.family} at {self.location} ({who}): {self.detail}"


def validate_schedule(schedule: IntegralSchedule, graph: NetworkGraph,
                      requests: Sequence[Request], config: FormulationConfig) -> list[Violation]:
    """Re-check every constraint family and bound of the routing program."""
    out: list[Violation] = []
    if len(schedule.requests) != len(requests):
        return [Violation(BOUNDS, None, "schedule", "request count mismatch")]
    arcs = graph.arcs
    arc_set = set(arcs)
    servers = set(graph.servers)

    for k, (req, rs) in enumerate(zip(requests, schedule.requests)):
        Y = rs.Y
        if not 0 <= Y <= req.m:
            out.append(Violation(BOUNDS, k, "Y", f"Y={Y} outside [0, {req.m}]"))
        x_max = req.m if config.error_correction else 0
        for r, c in rs.ec.items():
            if r not in servers:
                out.append(Violation(BOUNDS, k, f"node {r}", "error correction at a non-server"))
            elif not 0 <= c <= x_max:
                out.append(Violation(BOUNDS, k, f"server {r}", f"x={c} outside [0, {x_max}]"))
        for a, q in rs.flows.items():
            if a not in arc_set:
                out.append(Violation(BOUNDS, k, f"arc {a[0]}->{a[1]}", "flow on a missing arc"))
            elif not 0 <= q <= req.n * req.m:
                out.append(Violation(BOUNDS, k, f"arc {a[0]}->{a[1]}",
                                     f"y={q} outside [0, {req.n * req.m}]"))

        inflow = {u: 0 for u in graph.nodes}
        outflow = {u: 0 for u in graph.nodes}
        for (u, v), q in rs.flows.items():
            if u in outflow and v in inflow:
                outflow[u] += q
                inflow[v] += q

        cost = arc_costs(graph, req.n, config)
        lhs = sum(cost[a] * q for a, q in rs.flows.items() if a in cost)
        if config.error_correction:
            lhs -= config.ec_reward * sum(c for r, c in rs.ec.items() if r in servers)
        rhs = request_budget(graph, req, config) * Y
        if lhs > rhs + FIDELITY_SLACK:
            out.append(Violation(F_FIDELITY, k, "path", f"surrogate {lhs:.12g} exceeds {rhs:.12g}"))

        s, d, n = req.s, req.d, req.n
        if outflow[s] != n * Y:
            out.append(Violation(F_SOURCE_OUT, k, f"node {s}", f"outflow {outflow[s]} != {n * Y}"))
        if inflow[s] != 0:
            out.append(Violation(F_SOURCE_IN, k, f"node {s}", f"inflow {inflow[s]} != 0"))
        if outflow[d] != 0:
            out.append(Violation(F_SINK_OUT, k, f"node {d}", f"outflow {outflow[d]} != 0"))
        if inflow[d] != n * Y:
            out.append(Violation(F_SINK_IN, k, f"node {d}", f"inflow {inflow[d]} != {n * Y}"))
        for u in graph.nodes:
            if u not in (s, d) and inflow[u] != outflow[u]:
                out.append(Violation(F_CONSERVATION, k, f"node {u}",
                                     f"inflow {inflow[u]} != outflow {outflow[u]}"))
        if config.error_correction:
            for r in graph.servers:
                x = rs.ec.get(r, 0)
                if inflow[r] != n * x:
                    out.append(Violation(F_SERVER_EC, k, f"server {r}",
                                         f"inflow {inflow[r]} != {n}*{x}"))

    for r in graph.switches:
        total = sum(q for rs in schedule.requests for (u, v), q in rs.flows.items() if v == r)
        if total > graph.capacities[r]:
            out.append(Violation(F_SWITCH_CAP, None, f"node {r}",
                                 f"inflow {total} > capacity {graph.capacities[r]}"))
    for a in arcs:
        total = sum(rs.flows.get(a, 0) for rs in schedule.requests)
        if total > graph.arc_capacity(*a):
            out.append(Violation(F_ARC_CAP, None, f"arc {a[0]}->{a[1]}",
                                 f"flow {total} > capacity {graph.arc_capacity(*a)}"))
    return out
