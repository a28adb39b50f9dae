"""Integral schedules, per-code routes and the ``schedule.json`` format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

Arc = tuple[int, int]


@dataclass(frozen=True)
class Segment:
    """Qubit paths of one code between two consecutive stops.

    Every path ends at the same node; qubit counts sum to the code size.
    """

    paths: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def start(self) -> int:
        return self.paths[0][0][0]

    @property
    def end(self) -> int:
        return self.paths[0][0][-1]

    @property
    def qubits(self) -> int:
        return sum(q for _, q in self.paths)

    def arc_usage(self) -> dict[Arc, int]:
        use: dict[Arc, int] = {}
        for nodes, q in self.paths:
            for a in zip(nodes, nodes[1:]):
                use[a] = use.get(a, 0) + q
        return use


@dataclass(frozen=True)
class CodeRoute:
    """Route of one surface code; error correction happens at ``ec_servers``.

    ``ec_servers[i]`` sits between ``segments[i]`` and ``segments[i + 1]``.
    """

    request: int
    segments: tuple[Segment, ...]

    @property
    def ec_servers(self) -> tuple[int, ...]:
        return tuple(seg.end for seg in self.segments[:-1])

    def arc_usage(self) -> dict[Arc, int]:
        use: dict[Arc, int] = {}
        for seg in self.segments:
            for a, q in seg.arc_usage().items():
                use[a] = use.get(a, 0) + q
        return use


@dataclass
class RequestSchedule:
    Y: int = 0
    flows: dict[Arc, int] = field(default_factory=dict)
    ec: dict[int, int] = field(default_factory=dict)
    routes: list[CodeRoute] = field(default_factory=list)

    def add_route(self, route: CodeRoute) -> None:
        self.Y += 1
        self.routes.append(route)
        for a, q in route.arc_usage().items():
            self.flows[a] = self.flows.get(a, 0) + q
        for r in route.ec_servers:
            self.ec[r] = self.ec.get(r, 0) + 1


@dataclass
class IntegralSchedule:
    requests: list[RequestSchedule]
    lp_objective: float = float("nan")
    model: str = "surfacenet"
    metadata: dict = field(default_factory=dict)

    @property
    def objective(self) -> int:
        return sum(r.Y for r in self.requests)

    def to_dict(self) -> dict:
        out = []
        for k, rs in enumerate(self.requests):
            out.append({
                "k": k,
                "Y": rs.Y,
                "flows": [{"u": u, "v": v, "qubits": q}
                          for (u, v), q in sorted(rs.flows.items()) if q],
                "ec": [{"server": r, "codes": c} for r, c in sorted(rs.ec.items()) if c],
                # optional: one entry per code, one list of qubit paths per segment
                "routes": [
                    [[{"path": list(p), "qubits": q} for p, q in seg.paths] for seg in route.segments]
                    for route in rs.routes
                ],
            })
        data = {"requests": out, "objective": self.objective, "lp_objective": self.lp_objective}
        if self.metadata:
            data["metadata"] = self.metadata
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "IntegralSchedule":
        reqs = []
        for item in sorted(data["requests"], key=lambda r: r["k"]):
            rs = RequestSchedule(
                Y=int(item["Y"]),
                flows={(int(f["u"]), int(f["v"])): int(f["qubits"]) for f in item["flows"]},
                ec={int(e["server"]): int(e["codes"]) for e in item["ec"]},
                routes=[
                    CodeRoute(int(item["k"]), tuple(
                        Segment(tuple((tuple(int(v) for v in p["path"]), int(p["qubits"]))
                                      for p in seg))
                        for seg in code))
                    for code in item.get("routes", [])
                ],
            )
            reqs.append(rs)
        lp = data.get("lp_objective")
        return cls(reqs, float("nan") if lp is None else float(lp),
                   data.get("model", "surfacenet"), data.get("metadata", {}))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "IntegralSchedule":
        return cls.from_dict(json.loads(Path(path).read_text()))
