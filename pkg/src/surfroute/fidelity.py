"""End-to-end fidelity of scheduled codes and schedule-level metrics."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .netmodel import NetworkGraph, Request
from .routing.schedule import Arc, CodeRoute, IntegralSchedule, Segment


class DecompositionError(RuntimeError):
    pass


def path_fidelity(gammas: Iterable[float]) -> float:
    out = 1.0
    for g in gammas:
        if not 0.0 < g <= 1.0:
            raise ValueError(f"fidelity {g} outside (0, 1]")
        out *= g
    return out


def ec_merge_fidelity(branches: Sequence[tuple[int, float]], n: int, omega: float) -> float:
    """Fidelity of a code after correction, from its incoming qubit branches.

    Branch fidelities are averaged with qubit-count weights, the correction
    reward is added and the result is clamped to 1.
    """
    if sum(q for q, _ in branches) != n:
        raise ValueError(f"branch qubits {[q for q, _ in branches]} do not sum to {n}")
    for _, f in branches:
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"fidelity {f} outside [0, 1]")
    return min(1.0, sum(q / n * f for q, f in branches) + omega)


def purified_fidelity(f: float, pairs: int) -> float:
    """Pump one pair with ``pairs - 1`` further pairs of fidelity ``f``."""
    if not 0.0 < f <= 1.0:
        raise ValueError(f"fidelity {f} outside (0, 1]")
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    out = f
    for _ in range(pairs - 1):
        out = out * f / (out * f + (1.0 - out) * (1.0 - f))
    return out


# -- decomposition ----------------------------------------------------------

def _routes_match(routes: Sequence[CodeRoute], rs, n: int) -> bool:
    use: dict[Arc, int] = {}
    ec: dict[int, int] = {}
    for r in routes:
        if any(seg.qubits != n for seg in r.segments):
            return False
        for a, q in r.arc_usage().items():
            use[a] = use.get(a, 0) + q
        for s in r.ec_servers:
            ec[s] = ec.get(s, 0) + 1
    flows = {a: q for a, q in rs.flows.items() if q}
    ecs = {s: c for s, c in rs.ec.items() if c}
    return len(routes) == rs.Y and use == flows and ec == ecs


class _Decomposer:
    MAX_ATTEMPTS = 20_000

    def __init__(self, graph: NetworkGraph, k: int, req: Request, rs):
        self.graph = graph
        self.k = k
        self.req = req
        self.rem = {a: q for a, q in rs.flows.items() if q > 0}
        self.ec = {r: c for r, c in rs.ec.items() if c > 0}
        self.stops = sorted(self.ec)
        self.Y = rs.Y
        self.attempts = 0

    def _path(self, src: int, dst: int, blocked: set[int]):
        heap = [(0.0, (src,))]
        settled = set()
        while heap:
            c, path = heapq.heappop(heap)
            u = path[-1]
            if u in settled:
                continue
            settled.add(u)
            if u == dst:
                return path
            for v in self.graph.neighbors(u):
                if v in settled or (v in blocked and v != dst):
                    continue
                if self.rem.get((u, v), 0) > 0:
                    heapq.heappush(heap, (c - math.log(self.graph.fidelity(u, v)), path + (v,)))
        return None

    def _segment(self, a: int, b: int) -> Segment | None:
        blocked = (set(self.stops) | {self.req.s, self.req.d}) - {a, b}
        left = self.req.n
        taken: list[tuple[tuple[int, ...], int]] = []
        while left > 0:
            path = self._path(a, b, blocked)
            if path is None:
                for nodes, q in taken:
                    self._give(nodes, q)
                return None
            q = min(left, min(self.rem[x] for x in zip(path, path[1:])))
            self._give(path, -q)
            taken.append((path, q))
            left -= q
        merged: dict[tuple[int, ...], int] = {}
        for nodes, q in taken:
            merged[nodes] = merged.get(nodes, 0) + q
        return Segment(tuple(sorted(merged.items())))

    def _give(self, path, q):
        for a in zip(path, path[1:]):
            self.rem[a] = self.rem.get(a, 0) + q

    def _code(self, a: int, visited: frozenset[int], codes_left: int) -> list[list[Segment]] | None:
        """Finish the current code from ``a`` and then all remaining codes."""
        self.attempts += 1
        if self.attempts > self.MAX_ATTEMPTS:
            return None
        targets = [r for r in self.stops if self.ec[r] > 0 and r not in visited] + [self.req.d]
        for b in targets:
            seg = self._segment(a, b)
            if seg is None:
                continue
            if b == self.req.d:
                rest = self._codes(codes_left - 1)
                if rest is not None:
                    return [[seg]] + rest
            else:
                self.ec[b] -= 1
                rest = self._code(b, visited | {b}, codes_left)
                if rest is not None:
                    rest[0].insert(0, seg)
                    return rest
                self.ec[b] += 1
            for nodes, q in seg.paths:
                self._give(nodes, q)
        return None

    def _codes(self, count: int) -> list[list[Segment]] | None:
        if count == 0:
            done = all(q == 0 for q in self.rem.values()) and all(c == 0 for c in self.ec.values())
            return [] if done else None
        return self._code(self.req.s, frozenset(), count)

    def run(self) -> list[CodeRoute]:
        found = self._codes(self.Y)
        if found is None:
            raise DecompositionError(f"request {self.k}: flows do not split into whole codes")
        return [CodeRoute(self.k, tuple(segs)) for segs in found]


def decompose_flows(schedule: IntegralSchedule, graph: NetworkGraph,
                    requests: Sequence[Request]) -> list[CodeRoute]:
    """Split each request's aggregate flow into per-code routes.

    Routes recorded by the router are reused when they reproduce the flows
    exactly; otherwise paths are peeled off cheapest first with backtracking
    over the correction stops.
    """
    out: list[CodeRoute] = []
    for k, (req, rs) in enumerate(zip(requests, schedule.requests)):
        if rs.Y == 0:
            if any(rs.flows.values()) or any(rs.ec.values()):
                raise DecompositionError(f"request {k}: flow present with zero codes")
            continue
        if rs.routes and _routes_match(rs.routes, rs, req.n):
            out.extend(rs.routes)
        else:
            out.extend(_Decomposer(graph, k, req, rs).run())
    return out


# -- evaluation -------------------------------------------------------------

def code_fidelity(route: CodeRoute, graph: NetworkGraph, n: int, omega: float) -> float:
    current = 1.0
    last = len(route.segments) - 1
    for i, seg in enumerate(route.segments):
        branches = [(q, current * path_fidelity(graph.fidelity(*a) for a in zip(p, p[1:])))
                    for p, q in seg.paths]
        if i < last:
            current = ec_merge_fidelity(branches, n, omega)
        else:
            current = sum(q / n * f for q, f in branches)
    return current


@dataclass
class RequestMetrics:
    k: int
    delivered: int
    mean_fidelity: float
    below_threshold_codes: int
    code_fidelities: list[float] = field(default_factory=list)


@dataclass
class ScheduleMetrics:
    throughput: float
    average_fidelity: float
    per_request: list[RequestMetrics]
    # qubit-weighted sums, for pooling across schedules
    fidelity_weight: float = 0.0
    fidelity_sum: float = 0.0

    def to_dict(self) -> dict:
        return {
            "throughput": self.throughput,
            "average_fidelity": self.average_fidelity,
            "per_request": [
                {"k": r.k, "delivered": r.delivered, "mean_fidelity": r.mean_fidelity,
                 "below_threshold_codes": r.below_threshold_codes}
                for r in self.per_request
            ],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")


def evaluate_schedule(schedule: IntegralSchedule, graph: NetworkGraph, requests: Sequence[Request],
                      gamma_threshold: float, omega: float) -> ScheduleMetrics:
    routes = decompose_flows(schedule, graph, requests)
    per: dict[int, list[float]] = {k: [] for k in range(len(requests))}
    for route in routes:
        per[route.request].append(code_fidelity(route, graph, requests[route.request].n, omega))
    rows = []
    wsum = 0.0
    weight = 0.0
    for k, fids in per.items():
        n = requests[k].n
        wsum += n * sum(fids)
        weight += n * len(fids)
        rows.append(RequestMetrics(
            k, len(fids), sum(fids) / len(fids) if fids else 0.0,
            sum(1 for f in fids if f < gamma_threshold), fids))
    requested = sum(r.m for r in requests)
    delivered = sum(rs.Y for rs in schedule.requests)
    return ScheduleMetrics(
        throughput=delivered / requested if requested else 0.0,
        average_fidelity=wsum / weight if weight else 0.0,
        per_request=rows, fidelity_weight=weight, fidelity_sum=wsum)
