"""Integer routing program and its linear relaxation.

Per request ``k`` there is one admission variable ``Y[k]`` (codes
delivered), one flow variable ``y[k,u->v]`` per directed arc (qubits) and one
error-correction variable ``x[k,r]`` per server (codes corrected there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..netmodel import NetworkGraph, Request, ValidationError
from .lp import EQ, LE, Constraint, LpProblem, Variable

TRANSFORMS = ("neg-log", "one-minus", "literal")

F_FIDELITY = "F1-fidelity"
F_SOURCE_OUT = "F2-source-out"
F_SOURCE_IN = "F3-source-in"
F_SINK_OUT = "F4-sink-out"
F_SINK_IN = "F5-sink-in"
F_CONSERVATION = "F6-conservation"
F_SWITCH_CAP = "F7-switch-capacity"
F_SERVER_EC = "F8-server-ec"
F_ARC_CAP = "F9-arc-capacity"

FAMILIES = (F_FIDELITY, F_SOURCE_OUT, F_SOURCE_IN, F_SINK_OUT, F_SINK_IN,
            F_CONSERVATION, F_SWITCH_CAP, F_SERVER_EC, F_ARC_CAP)


class FormulationError(ValueError):
    pass


@dataclass(frozen=True)
class FormulationConfig:
    gamma_threshold: float = 0.7
    omega: float = 0.05
    transform: str = "neg-log"
    solver_tolerance: float = 1e-7
    max_iterations: int = 50_000
    # False gives the no-correction model: x pinned at 0, servers act as switches
    error_correction: bool = True

    def __post_init__(self) -> None:
        if self.transform not in TRANSFORMS:
            raise FormulationError(f"unknown transform {self.transform!r}")
        if not 0.0 <= self.gamma_threshold <= 1.0:
            raise FormulationError("gamma_threshold must lie in [0, 1]")
        if self.omega < 0:
            raise FormulationError("omega must be non-negative")
        if self.solver_tolerance <= 0:
            raise FormulationError("solver_tolerance must be positive")

    def arc_cost(self, fidelity: float, n: int) -> float:
        """Per-qubit surrogate cost of one arc for a code of ``n`` qubits."""
        if self.transform == "neg-log":
            return -math.log(fidelity) / n
        if self.transform == "one-minus":
            return (1.0 - fidelity) / n
        return fidelity

    @property
    def ec_reward(self) -> float:
        return self.omega

    def budget(self, cap: float = math.inf) -> float:
        """Right-hand side scale of the fidelity row.

        Under neg-log a zero threshold has no finite budget; ``cap`` stands in
        for it and must exceed any attainable per-code cost.
        """
        g = self.gamma_threshold
        if self.transform == "neg-log":
            return -math.log(g) if g > 0 else cap
        if self.transform == "one-minus":
            return 1.0 - g
        return g


def arc_costs(graph: NetworkGraph, n: int, config: FormulationConfig) -> dict[tuple[int, int], float]:
    return {a: config.arc_cost(graph.fidelity(*a), n) for a in graph.arcs}


def request_budget(graph: NetworkGraph, req: Request, config: FormulationConfig) -> float:
    costs = arc_costs(graph, req.n, config)
    cap = 1.0 + req.n * req.m * sum(costs.values())
    return config.budget(cap)


def var_Y(k: int) -> str:
    return f"Y[{k}]"


def var_y(k: int, arc: tuple[int, int]) -> str:
    return f"y[{k},{arc[0]}->{arc[1]}]"


def var_x(k: int, r: int) -> str:
    return f"x[{k},{r}]"


def build_formulation(graph: NetworkGraph, requests: Sequence[Request],
                      config: FormulationConfig) -> LpProblem:
    for k, req in enumerate(requests):
        try:
            req.validate(graph)
        except ValidationError as exc:
            raise FormulationError(f"request {k}: {exc}") from None

    arcs = graph.arcs
    servers = graph.servers
    variables: list[Variable] = []
    objective: list[float] = []
    for req_k, req in enumerate(requests):
        variables.append(Variable(var_Y(req_k), 0.0, float(req.m)))
        objective.append(1.0)
        for arc in arcs:
            variables.append(Variable(var_y(req_k, arc), 0.0, float(req.n * req.m)))
            objective.append(0.0)
        x_ub = float(req.m) if config.error_correction else 0.0
        for r in servers:
            variables.append(Variable(var_x(req_k, r), 0.0, x_ub))
            objective.append(0.0)
    index = {v.name: i for i, v in enumerate(variables)}

    in_arcs: dict[int, list[tuple[int, int]]] = {u: [] for u in graph.nodes}
    out_arcs: dict[int, list[tuple[int, int]]] = {u: [] for u in graph.nodes}
    for a in arcs:
        out_arcs[a[0]].append(a)
        in_arcs[a[1]].append(a)

    rows: list[Constraint] = []

    def add(family, label, terms, sense, rhs):
        terms = [(index[name], coef) for name, coef in terms]
        rows.append(Constraint(family, label, tuple(j for j, _ in terms),
                               tuple(float(c) for _, c in terms), sense, float(rhs)))

    for k, req in enumerate(requests):
        s, d, n = req.s, req.d, req.n
        costs = arc_costs(graph, n, config)
        budget = request_budget(graph, req, config)
        terms = [(var_y(k, a), costs[a]) for a in arcs if costs[a] != 0.0]
        terms += [(var_x(k, r), -config.ec_reward) for r in servers if config.ec_reward != 0.0]
        terms.append((var_Y(k), -budget))
        add(F_FIDELITY, f"F1[{k}]", terms, LE, 0.0)
        add(F_SOURCE_OUT, f"F2[{k}]",
            [(var_y(k, a), 1.0) for a in out_arcs[s]] + [(var_Y(k), -n)], EQ, 0.0)
        add(F_SOURCE_IN, f"F3[{k}]", [(var_y(k, a), 1.0) for a in in_arcs[s]], EQ, 0.0)
        add(F_SINK_OUT, f"F4[{k}]", [(var_y(k, a), 1.0) for a in out_arcs[d]], EQ, 0.0)
        add(F_SINK_IN, f"F5[{k}]",
            [(var_y(k, a), 1.0) for a in in_arcs[d]] + [(var_Y(k), -n)], EQ, 0.0)
        for u in graph.nodes:
            if u in (s, d):
                continue
            add(F_CONSERVATION, f"F6[{k},{u}]",
                [(var_y(k, a), 1.0) for a in in_arcs[u]]
                + [(var_y(k, a), -1.0) for a in out_arcs[u]], EQ, 0.0)

    for r in graph.switches:
        add(F_SWITCH_CAP, f"F7[{r}]",
            [(var_y(k, a), 1.0) for k in range(len(requests)) for a in in_arcs[r]],
            LE, graph.capacities[r])

    if config.error_correction:
        for k, req in enumerate(requests):
            for r in servers:
                add(F_SERVER_EC, f"F8[{k},{r}]",
                    [(var_y(k, a), 1.0) for a in in_arcs[r]] + [(var_x(k, r), -req.n)], EQ, 0.0)

    for a in arcs:
        add(F_ARC_CAP, f"F9[{a[0]}->{a[1]}]",
            [(var_y(k, a), 1.0) for k in range(len(requests))], LE, graph.arc_capacity(*a))

    return LpProblem(variables, objective, rows, tolerance=config.solver_tolerance,
                     max_iterations=config.max_iterations)
