"""Network graph, requests, scenario configuration and their on-disk formats."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np


class ValidationError(ValueError):
    """A graph, request set or config breaks one of its invariants."""


class ParseError(ValueError):
    """A topology or request file could not be parsed."""


class NodeRole(str, enum.Enum):
    USER = "user"
    SWITCH = "switch"
    SERVER = "server"

    @property
    def is_switch(self) -> bool:
        # servers carry every switch capability
        return self is not NodeRole.USER


@dataclass(frozen=True)
class EdgeSpec:
    u: int
    v: int
    fidelity: float
    capacity: int

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.u, self.v), max(self.u, self.v))


Arc = tuple[int, int]


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected capacitated network; every edge is two directed arcs.

    ``capacities`` holds the switch capacity for every node (0 for users).
    """

    roles: tuple[NodeRole, ...]
    capacities: tuple[int, ...]
    edges: tuple[EdgeSpec, ...]
    _arc_index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "roles", tuple(NodeRole(r) for r in self.roles))
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))
        object.__setattr__(self, "edges", tuple(self.edges))
        self.validate()
        index: dict[Arc, EdgeSpec] = {}
        for e in self.edges:
            index[(e.u, e.v)] = e
            index[(e.v, e.u)] = e
        object.__setattr__(self, "_arc_index", index)

    # -- structure ---------------------------------------------------------
    @property
    def node_count(self) -> int:
        return len(self.roles)

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    @property
    def users(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is NodeRole.USER]

    @property
    def switches(self) -> list[int]:
        """Switch and server nodes."""
        return [i for i, r in enumerate(self.roles) if r.is_switch]

    @property
    def servers(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is NodeRole.SERVER]

    @property
    def arcs(self) -> list[Arc]:
        """Directed arcs in lexicographic order."""
        return sorted(self._arc_index)

    def edge(self, u: int, v: int) -> EdgeSpec:
        return self._arc_index[(u, v)]

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arc_index

    def fidelity(self, u: int, v: int) -> float:
        return self._arc_index[(u, v)].fidelity

    def arc_capacity(self, u: int, v: int) -> int:
        return self._arc_index[(u, v)].capacity

    def neighbors(self, u: int) -> list[int]:
        return sorted(v for (a, v) in self._arc_index if a == u)

    def degree(self, u: int) -> int:
        return sum(1 for e in self.edges if u in (e.u, e.v))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        for e in self.edges:
            g.add_edge(e.u, e.v, fidelity=e.fidelity, capacity=e.capacity)
        return g

    def with_edges(self, edges: Iterable[EdgeSpec]) -> "NetworkGraph":
        return NetworkGraph(self.roles, self.capacities, tuple(edges))

    # -- invariants --------------------------------------------------------
    def validate(self) -> None:
        n = len(self.roles)
        if len(self.capacities) != n:
            raise ValidationError("capacities must list one value per node")
        for i, c in enumerate(self.capacities):
            if c < 0:
                raise ValidationError(f"node {i}: negative capacity {c}")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            name = f"edge ({e.u},{e.v})"
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise ValidationError(f"{name}: endpoint out of range")
            if e.u == e.v:
                raise ValidationError(f"{name}: self loop")
            if e.key in seen:
                raise ValidationError(f"{name}: duplicate edge")
            seen.add(e.key)
            if not (0.0 < e.fidelity <= 1.0):
                raise ValidationError(f"{name}: fidelity {e.fidelity} outside (0, 1]")
            if e.capacity < 0:
                raise ValidationError(f"{name}: negative capacity {e.capacity}")
        if n == 0:
            return
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from(seen)
        if not nx.is_connected(g):
            raise ValidationError("graph not connected")


@dataclass(frozen=True)
class Request:
    s: int
    d: int
    n: int
    m: int

    def validate(self, graph: NetworkGraph) -> None:
        if self.s == self.d:
            raise ValidationError(f"request {self}: source equals destination")
        for end in (self.s, self.d):
            if not 0 <= end < graph.node_count:
                raise ValidationError(f"request {self}: node {end} not in graph")
            if graph.roles[end] is not NodeRole.USER:
                raise ValidationError(f"request {self}: node {end} is not a user")
        if self.n < 1 or self.m < 1:
            raise ValidationError(f"request {self}: n and m must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    node_count: int = 20
    attachment: int = 2
    server_count: int = 4
    user_count: int = 10
    fidelity_range: tuple[float, float] = (0.75, 1.0)
    switch_capacity_range: tuple[int, int] = (18, 54)
    edge_capacity_range: tuple[int, int] = (9, 27)
    request_count: int = 5
    n: int = 9
    m_range: tuple[int, int] = (1, 3)
    gamma_threshold: float = 0.7
    omega: float = 0.05

    def validate(self) -> None:
        lo, hi = self.fidelity_range
        if not (0.0 < lo <= hi <= 1.0):
            raise ValidationError(f"fidelity_range {self.fidelity_range} must satisfy 0 < lo <= hi <= 1")
        if self.server_count + self.user_count > self.node_count:
            raise ValidationError("server_count + user_count exceeds node_count")
        if self.attachment < 1 or self.attachment >= self.node_count:
            raise ValidationError(
                f"attachment must satisfy 1 <= attachment < node_count, got {self.attachment}")
        for name in ("switch_capacity_range", "edge_capacity_range", "m_range"):
            a, b = getattr(self, name)
            if a > b or a < 0:
                raise ValidationError(f"{name} {(a, b)} is not a valid interval")
        if self.m_range[0] < 1 or self.n < 1:
            raise ValidationError("n and m_range must be positive")
        if not 0.0 <= self.gamma_threshold <= 1.0:
            raise ValidationError("gamma_threshold must lie in [0, 1]")
        if self.omega < 0:
            raise ValidationError("omega must be non-negative")


# -- generation ------------------------------------------------------------

def rank_roles(degrees: Sequence[int], server_count: int, user_count: int) -> list[NodeRole]:
    """Highest-degree nodes become servers, lowest-degree nodes users.

    Ties go to the smaller node id in both rankings. Servers are picked
    first and users come from whatever remains.
    """
    n = len(degrees)
    if server_count + user_count > n or server_count < 0 or user_count < 0:
        raise ValidationError("role counts do not fit the node count")
    roles = [NodeRole.SWITCH] * n
    by_high = sorted(range(n), key=lambda i: (-degrees[i], i))
    servers = set(by_high[:server_count])
    for i in servers:
        roles[i] = NodeRole.SERVER
    by_low = sorted((i for i in range(n) if i not in servers), key=lambda i: (degrees[i], i))
    for i in by_low[:user_count]:
        roles[i] = NodeRole.USER
    return roles


def assign_roles(graph: NetworkGraph, server_count: int, user_count: int) -> NetworkGraph:
    """Return ``graph`` with roles re-derived from node degrees."""
    degrees = [graph.degree(i) for i in graph.nodes]
    roles = rank_roles(degrees, server_count, user_count)
    caps = [c if r.is_switch else 0 for r, c in zip(roles, graph.capacities)]
    return NetworkGraph(tuple(roles), tuple(caps), graph.edges)


def generate_topology(config: ScenarioConfig) -> NetworkGraph:
    config.validate()
    ba = nx.barabasi_albert_graph(config.node_count, config.attachment, seed=config.seed)
    rng = np.random.default_rng(config.seed)
    lo, hi = config.fidelity_range
    edges = []
    for u, v in sorted((min(a, b), max(a, b)) for a, b in ba.edges()):
        fid = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
        # uniform() is half-open; keep the draw inside (0, 1]
        fid = min(max(fid, lo), hi)
        cap = int(rng.integers(config.edge_capacity_range[0], config.edge_capacity_range[1] + 1))
        edges.append(EdgeSpec(u, v, fid, cap))
    degrees = [ba.degree(i) for i in range(config.node_count)]
    roles = rank_roles(degrees, config.server_count, config.user_count)
    a, b = config.switch_capacity_range
    caps = [int(rng.integers(a, b + 1)) if r.is_switch else 0 for r in roles]
    return NetworkGraph(tuple(roles), tuple(caps), tuple(edges))


def generate_requests(graph: NetworkGraph, config: ScenarioConfig) -> list[Request]:
    """Distinct ordered user pairs drawn without replacement."""
    # separate stream from the topology draws
    rng = np.random.default_rng([config.seed, 1])
    users = graph.users
    pairs = [(s, d) for s in users for d in users if s != d]
    count = min(config.request_count, len(pairs))
    if count == 0:
        return []
    picks = rng.choice(len(pairs), size=count, replace=False)
    lo, hi = config.m_range
    out = []
    for idx in picks:
        s, d = pairs[int(idx)]
        out.append(Request(s, d, config.n, int(rng.integers(lo, hi + 1))))
    return out


# -- serialization -----------------------------------------------------------

def graph_to_dict(graph: NetworkGraph) -> dict:
    return {
        "nodes": [
            {"id": i, "role": r.value, "capacity": c}
            for i, (r, c) in enumerate(zip(graph.roles, graph.capacities))
        ],
        "edges": [
            {"u": e.u, "v": e.v, "fidelity": e.fidelity, "capacity": e.capacity}
            for e in graph.edges
        ],
    }


def _field(obj: dict, key: str, where: str, kind: type):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    value = obj[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{where}: field '{key}' must be an integer, got {value!r}")
    elif kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{where}: field '{key}' must be a number, got {value!r}")
        value = float(value)
    elif kind is str and not isinstance(value, str):
        raise ParseError(f"{where}: field '{key}' must be a string, got {value!r}")
    return value


def graph_from_dict(data: dict) -> NetworkGraph:
    if not isinstance(data, dict):
        raise ParseError("topology: top level must be an object")
    nodes = data.get("nodes")
    edges = data.get("edges")
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise ParseError("topology: 'nodes' and 'edges' must be lists")
    entries = {}
    for pos, item in enumerate(nodes):
        where = f"nodes[{pos}]"
        nid = _field(item, "id", where, int)
        role = _field(item, "role", where, str)
        try:
            role = NodeRole(role)
        except ValueError:
            raise ParseError(f"{where}: unknown role {role!r}") from None
        cap = _field(item, "capacity", where, int)
        if nid in entries:
            raise ValidationError(f"{where}: duplicate node id {nid}")
        entries[nid] = (role, cap)
    if sorted(entries) != list(range(len(entries))):
        raise ValidationError("node ids must be dense from 0")
    roles = tuple(entries[i][0] for i in range(len(entries)))
    caps = tuple(entries[i][1] for i in range(len(entries)))
    specs = []
    for pos, item in enumerate(edges):
        where = f"edges[{pos}]"
        specs.append(EdgeSpec(
            _field(item, "u", where, int),
            _field(item, "v", where, int),
            _field(item, "fidelity", where, float),
            _field(item, "capacity", where, int),
        ))
    return NetworkGraph(roles, caps, tuple(specs))


def _read_json(path: str | Path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def save_graph(graph: NetworkGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), indent=1) + "\n")


def load_graph(path: str | Path) -> NetworkGraph:
    return graph_from_dict(_read_json(path))


def save_requests(requests: Sequence[Request], path: str | Path) -> None:
    data = [{"s": r.s, "d": r.d, "n": r.n, "m": r.m} for r in requests]
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


def load_requests(path: str | Path, graph: NetworkGraph | None = None) -> list[Request]:
    data = _read_json(path)
    if not isinstance(data, list):
        raise ParseError(f"{path}: top level must be a list")
    out = []
    for pos, item in enumerate(data):
        where = f"requests[{pos}]"
        req = Request(*(_field(item, k, where, int) for k in ("s", "d", "n", "m")))
        if graph is not None:
            req.validate(graph)
        out.append(req)
    return out
