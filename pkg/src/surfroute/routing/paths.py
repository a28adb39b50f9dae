"""Residual capacities and per-code path extraction shared by the routers."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..netmodel import NetworkGraph, NodeRole, Request
from .schedule import Arc, CodeRoute, Segment

BUDGET_SLACK = 1e-9


class Residual:
    """Remaining arc and switch capacity, shared by all requests."""

    def __init__(self, graph: NetworkGraph):
        self.graph = graph
        self.arc = {a: graph.arc_capacity(*a) for a in graph.arcs}
        self.node = {u: (graph.capacities[u] if graph.roles[u].is_switch else math.inf)
                     for u in graph.nodes}

    def copy(self) -> "Residual":
        other = Residual.__new__(Residual)
        other.graph = self.graph
        other.arc = dict(self.arc)
        other.node = dict(self.node)
        return other

    def consume(self, nodes: Sequence[int], q: int) -> None:
        for a in zip(nodes, nodes[1:]):
            self.arc[a] -= q
            self.node[a[1]] -= q

    def bottleneck(self, nodes: Sequence[int]) -> float:
        return min(min(self.arc[a], self.node[a[1]]) for a in zip(nodes, nodes[1:]))


def shortest_path(graph: NetworkGraph, cost: dict[Arc, float], src: int, dst: int,
                  usable: Callable[[Arc], bool], blocked: set[int]) -> tuple[float, tuple[int, ...]] | None:
    """Least-cost simple path; equal costs fall back to the smaller node sequence."""
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (src,))]
    settled: set[int] = set()
    while heap:
        c, path = heapq.heappop(heap)
        u = path[-1]
        if u in settled:
            continue
        settled.add(u)
        if u == dst:
            return c, path
        for v in graph.neighbors(u):
            if v in settled or (v in blocked and v != dst):
                continue
            a = (u, v)
            if usable(a):
                heapq.heappush(heap, (c + cost[a], path + (v,)))
    return None


def route_segment(graph: NetworkGraph, residual: Residual, cost: dict[Arc, float],
                  src: int, dst: int, qubits: int, blocked: set[int], *,
                  preferred: set[Arc] | None = None,
                  single_path: bool = False) -> Segment | None:
    """Send ``qubits`` from ``src`` to ``dst``, consuming ``residual``.

    Paths are pulled one at a time by least cost; arcs in ``preferred`` are
    tried first. With ``single_path`` the whole amount must share one path.
    Returns None (leaving ``residual`` partly consumed) on failure.
    """
    paths: list[tuple[tuple[int, ...], int]] = []
    left = qubits
    need = qubits if single_path else 1

    def ok(a: Arc) -> bool:
        return residual.arc[a] >= need and residual.node[a[1]] >= need

    tiers: list[Callable[[Arc], bool]] = []
    if preferred:
        tiers.append(lambda a: a in preferred and ok(a))
    tiers.append(ok)
    while left > 0:
        found = None
        for usable in tiers:
            found = shortest_path(graph, cost, src, dst, usable, blocked)
            if found is not None:
                break
        if found is None:
            return None
        nodes = found[1]
        q = min(left, int(residual.bottleneck(nodes)))
        if single_path and q < qubits:
            return None
        residual.consume(nodes, q)
        paths.append((nodes, q))
        left -= q
    merged: dict[tuple[int, ...], int] = {}
    for nodes, q in paths:
        merged[nodes] = merged.get(nodes, 0) + q
    return Segment(tuple(sorted(merged.items())))


def surrogate_cost(route: CodeRoute, cost: dict[Arc, float], ec_reward: float) -> float:
    total = sum(cost[a] * q for a, q in route.arc_usage().items())
    return total - ec_reward * len(route.ec_servers)


def waypoint_sequences(servers: Sequence[int], max_len: int) -> Iterable[tuple[int, ...]]:
    for size in range(0, min(max_len, len(servers)) + 1):
        yield from itertools.permutations(servers, size)


@dataclass(frozen=True)
class CodePlan:
    route: CodeRoute
    surrogate: float
    residual: Residual


def plan_code(graph: NetworkGraph, residual: Residual, k: int, req: Request,
              cost: dict[Arc, float], budget: float, ec_reward: float, *,
              error_correction: bool, preferred: set[Arc] | None = None,
              single_path: bool = False, max_waypoints: int | None = None,
              flow_room: dict[Arc, int] | None = None) -> CodePlan | None:
    """Best route for one code of request ``k`` that meets the budget.

    With error correction every server is either a full-code stop or avoided,
    so candidate routes are ordered server sequences. Among those that fit,
    the lowest surrogate cost wins, then fewer stops, then the smaller
    sequence. ``flow_room`` caps per-arc flow for this request.
    """
    servers = graph.servers if error_correction else []
    server_set = set(servers)
    users_blocked = {req.s, req.d}
    limit = len(servers) if max_waypoints is None else max_waypoints
    best: CodePlan | None = None
    best_key = None
    for seq in waypoint_sequences(servers, limit):
        trial = residual.copy()
        stops = (req.s,) + seq + (req.d,)
        segments = []
        for a, b in zip(stops, stops[1:]):
            blocked = (server_set | users_blocked) - {a, b}
            seg = route_segment(graph, trial, cost, a, b, req.n, blocked,
                                preferred=preferred, single_path=single_path)
            if seg is None:
                break
            segments.append(seg)
        else:
            route = CodeRoute(k, tuple(segments))
            if flow_room is not None and any(q > flow_room.get(a, 0)
                                             for a, q in route.arc_usage().items()):
                continue
            value = surrogate_cost(route, cost, ec_reward)
            if value > budget + BUDGET_SLACK:
                continue
            key = (value, len(seq), seq)
            if best_key is None or key < best_key:
                best, best_key = CodePlan(route, value, trial), key
    return best
