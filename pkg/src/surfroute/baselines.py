"""Comparison models: no correction, unsplit codes, and per-edge purification."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

from .fidelity import purified_fidelity
from .netmodel import EdgeSpec, NetworkGraph, Request
from .routing import FormulationConfig, IntegralSchedule, RequestSchedule, solve_routing
from .routing.formulation import arc_costs, build_formulation, request_budget
from .routing.lp import solve_lp
from .routing.paths import Residual, plan_code


@dataclass(frozen=True)
class BaselineKind:
    """``raw``, ``nosplit``, ``purify`` (with ``pairs``) or ``surfacenet``."""

    name: str
    pairs: int = 1

    def __post_init__(self) -> None:
        if self.name not in ("surfacenet", "raw", "nosplit", "purify"):
            raise ValueError(f"unknown model {self.name!r}")
        if self.pairs < 1:
            raise ValueError("purification needs at least one pair")

    @property
    def label(self) -> str:
        return f"purify{self.pairs}" if self.name == "purify" else self.name

    @classmethod
    def parse(cls, text: str) -> "BaselineKind":
        text = text.strip().lower()
        if text.startswith("purify"):
            return cls("purify", int(text[len("purify"):] or 1))
        return cls(text)


def raw_config(config: FormulationConfig) -> FormulationConfig:
    return dataclasses.replace(config, error_correction=False)


def solve_raw(graph: NetworkGraph, requests: Sequence[Request],
              config: FormulationConfig) -> IntegralSchedule:
    """Same pipeline with every correction variable pinned to zero."""
    sched = solve_routing(graph, requests, raw_config(config))
    sched.model = "raw"
    return sched


def solve_nosplit(graph: NetworkGraph, requests: Sequence[Request], config: FormulationConfig,
                  lp_objective: float | None = None) -> IntegralSchedule:
    """Greedy: each code rides one path carrying all its qubits.

    Requests are served in index order, codes one at a time, each on the
    cheapest budget-feasible path left in the residual network. Any server
    on that path corrects the code.
    """
    config = dataclasses.replace(config, error_correction=True)
    residual = Residual(graph)
    scheds = [RequestSchedule() for _ in requests]
    for k, req in enumerate(requests):
        cost = arc_costs(graph, req.n, config)
        budget = request_budget(graph, req, config)
        for _ in range(req.m):
            plan = plan_code(graph, residual, k, req, cost, budget, config.ec_reward,
                             error_correction=True, single_path=True)
            if plan is None:
                break
            residual = plan.residual
            scheds[k].add_route(plan.route)
    if lp_objective is None:
        lp_objective = solve_lp(build_formulation(graph, requests, config)).objective
    return IntegralSchedule(scheds, lp_objective=lp_objective, model="nosplit")


def purified_graph(graph: NetworkGraph, pairs: int) -> NetworkGraph:
    """Edges after pumping: better fidelity, capacity divided by ``pairs``."""
    if pairs == 1:
        return graph
    edges = [EdgeSpec(e.u, e.v, purified_fidelity(e.fidelity, pairs), e.capacity // pairs)
             for e in graph.edges]
    return graph.with_edges(edges)


def solve_purify(graph: NetworkGraph, requests: Sequence[Request], config: FormulationConfig,
                 pairs: int) -> IntegralSchedule:
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    sched = solve_raw(purified_graph(graph, pairs), requests, config)
    sched.model = f"purify{pairs}"
    if pairs > 1:
        sched.metadata = {
            "pairs": pairs,
            "capacity_model": f"edge capacity divided by {pairs}: each delivered pair "
                              f"consumes {pairs} raw pairs (modelling assumption)",
        }
    return sched


def solve_model(kind: BaselineKind, graph: NetworkGraph, requests: Sequence[Request],
                config: FormulationConfig) -> tuple[IntegralSchedule, NetworkGraph, FormulationConfig]:
    """Run one model; also returns the graph and config its schedule lives on."""
    if kind.name == "surfacenet":
        cfg = dataclasses.replace(config, error_correction=True)
        sched = solve_routing(graph, requests, cfg)
        return sched, graph, cfg
    if kind.name == "raw":
        return solve_raw(graph, requests, config), graph, raw_config(config)
    if kind.name == "nosplit":
        cfg = dataclasses.replace(config, error_correction=True)
        return solve_nosplit(graph, requests, config), graph, cfg
    g = purified_graph(graph, kind.pairs)
    return solve_purify(graph, requests, config, kind.pairs), g, raw_config(config)
