"""Scenario sweeps over models, fidelity regimes and thresholds."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .baselines import BaselineKind, solve_model, solve_nosplit
from .fidelity import evaluate_schedule
from .netmodel import ScenarioConfig, generate_requests, generate_topology
from .routing import FormulationConfig, validate_schedule
from .surface_code import calibrate_omega

log = logging.getLogger(__name__)

CSV_COLUMNS = ["scenario", "regime", "model", "gamma_threshold", "omega", "throughput",
               "avg_fidelity", "lp_obj", "int_obj", "status", "wall_ms"]

REGIMES = {"high": (0.75, 1.0), "low": (0.5, 1.0)}
DEFAULT_MODELS = ("surfacenet", "raw", "nosplit", "purify1", "purify2", "purify9")

# capacity and request defaults have no published values
ASSUMED_DEFAULTS = {
    "edge_capacity": "uniform in [n, 3n]",
    "switch_capacity": "uniform in [2n, 6n]",
    "requests": "5 per scenario, n=9, m uniform in [1, 3]",
    "omega": "0.05 unless calibrated",
    "gamma_threshold": "0.7",
}


def regime_label(rng: tuple[float, float]) -> str:
    for name, r in REGIMES.items():
        if tuple(r) == tuple(rng):
            return name
    return f"{rng[0]:g}-{rng[1]:g}"


@dataclass(frozen=True)
class SweepSpec:
    scenario_count: int = 1080
    regimes: tuple[tuple[float, float], ...] = (REGIMES["high"], REGIMES["low"])
    models: tuple[str, ...] = DEFAULT_MODELS
    gamma_grid: tuple[float, ...] = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
    base_seed: int = 0
    gamma_threshold: float = 0.7
    omega: float = 0.05
    transform: str = "neg-log"
    scenario: ScenarioConfig = ScenarioConfig()
    calibrate: bool = False
    calibration_distance: int = 3
    calibration_trials: int = 4000
    record_timing: bool = False
    validate: bool = False

    def __post_init__(self) -> None:
        if self.scenario_count < 1:
            raise ValueError("scenario_count must be >= 1")
        for lo, hi in self.regimes:
            if not 0.0 < lo <= hi <= 1.0:
                raise ValueError(f"regime {(lo, hi)} must lie in (0, 1]")
        for m in self.models:
            BaselineKind.parse(m)


@dataclass
class SweepRow:
    scenario: int
    regime: str
    model: str
    gamma_threshold: float
    omega: float
    throughput: float = 0.0
    avg_fidelity: float = 0.0
    lp_obj: float = 0.0
    int_obj: int = 0
    status: str = "ok"
    wall_ms: float = 0.0
    # pooled sums for qubit-weighted aggregation; not written to CSV
    fidelity_sum: float = field(default=0.0, repr=False)
    fidelity_weight: float = field(default=0.0, repr=False)
    violations: int = field(default=0, repr=False)

    def csv_values(self) -> list:
        return [self.scenario, self.regime, self.model, repr(self.gamma_threshold),
                repr(self.omega), repr(self.throughput), repr(self.avg_fidelity),
                repr(self.lp_obj), self.int_obj, self.status, f"{self.wall_ms:.3f}"]


def _omega_for(spec: SweepSpec, regime: tuple[float, float]) -> float:
    if not spec.calibrate:
        return spec.omega
    f_in = (regime[0] + regime[1]) / 2
    return calibrate_omega(spec.calibration_distance, f_in, spec.calibration_trials, spec.base_seed)


def run_scenario(spec: SweepSpec, index: int, regime: tuple[float, float], gamma: float,
                 omega: float, models: Sequence[str] | None = None) -> list[SweepRow]:
    """Every requested model on scenario ``index``; failures become status rows."""
    label = regime_label(regime)
    models = spec.models if models is None else models
    cfg = dataclasses.replace(spec.scenario, seed=spec.base_seed + index, fidelity_range=regime,
                              gamma_threshold=gamma, omega=omega)
    try:
        graph = generate_topology(cfg)
        requests = generate_requests(graph, cfg)
    except Exception as exc:  # noqa: BLE001 - a broken scenario must not stop the sweep
        return [SweepRow(index, label, m, gamma, omega, status=f"error: {exc}") for m in models]
    fcfg = FormulationConfig(gamma_threshold=gamma, omega=omega, transform=spec.transform)
    rows = []
    lp_surfacenet = None
    for name in models:
        kind = BaselineKind.parse(name)
        row = SweepRow(index, label, kind.label, gamma, omega)
        start = time.perf_counter()
        try:
            if kind.name == "nosplit" and lp_surfacenet is not None:
                sched = solve_nosplit(graph, requests, fcfg, lp_objective=lp_surfacenet)
                egraph, ecfg = graph, fcfg
            else:
                sched, egraph, ecfg = solve_model(kind, graph, requests, fcfg)
            if kind.name == "surfacenet":
                lp_surfacenet = sched.lp_objective
            if spec.validate:
                row.violations = len(validate_schedule(sched, egraph, requests, ecfg))
            metrics = evaluate_schedule(sched, egraph, requests, gamma, omega)
        except Exception as exc:  # noqa: BLE001
            log.warning("scenario %d model %s failed: %s", index, name, exc)
            row.status = f"error: {exc}"
        else:
            row.throughput = metrics.throughput
            row.avg_fidelity = metrics.average_fidelity
            row.fidelity_sum = metrics.fidelity_sum
            row.fidelity_weight = metrics.fidelity_weight
            row.lp_obj = sched.lp_objective
            row.int_obj = sched.objective
            if row.violations:
                row.status = f"invalid: {row.violations} violations"
        if spec.record_timing:
            row.wall_ms = (time.perf_counter() - start) * 1000.0
        rows.append(row)
    return rows


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for regime in spec.regimes:
        omega = _omega_for(spec, regime)
        for i in range(spec.scenario_count):
            rows.extend(run_scenario(spec, i, regime, spec.gamma_threshold, omega))
    return rows


def threshold_sweep(spec: SweepSpec, gamma_grid: Sequence[float] | None = None,
                    models: Sequence[str] = ("surfacenet",)) -> list[SweepRow]:
    grid = list(spec.gamma_grid if gamma_grid is None else gamma_grid)
    if not grid:
        raise ValueError("gamma grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("gamma grid must be ascending")
    rows: list[SweepRow] = []
    for gamma in grid:
        for regime in spec.regimes:
            omega = _omega_for(spec, regime)
            for i in range(spec.scenario_count):
                rows.extend(run_scenario(spec, i, regime, gamma, omega, models))
    return rows


# -- output -----------------------------------------------------------------

def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_values())
    return buf.getvalue()


def write_csv(rows: Iterable[SweepRow], path: str | Path) -> None:
    Path(path).write_text(rows_to_csv(rows))


@dataclass
class ModelSummary:
    regime: str
    model: str
    gamma_threshold: float
    scenarios: int
    mean_throughput: float
    mean_avg_fidelity: float
    pooled_fidelity: float
    failures: int


def summarize(rows: Iterable[SweepRow]) -> list[ModelSummary]:
    """Per (regime, model, threshold): scenario means and the qubit-weighted pool."""
    groups: dict[tuple[str, str, float], list[SweepRow]] = {}
    for r in rows:
        groups.setdefault((r.regime, r.model, r.gamma_threshold), []).append(r)
    out = []
    for (regime, model, gamma), rs in groups.items():
        ok = [r for r in rs if r.status == "ok"]
        weight = sum(r.fidelity_weight for r in ok)
        out.append(ModelSummary(
            regime, model, gamma, len(ok),
            sum(r.throughput for r in ok) / len(ok) if ok else 0.0,
            sum(r.avg_fidelity for r in ok) / len(ok) if ok else 0.0,
            sum(r.fidelity_sum for r in ok) / weight if weight else 0.0,
            len(rs) - len(ok)))
    return out


def format_summary(summary: Sequence[ModelSummary]) -> str:
    lines = [f"{'regime':<8}{'model':<12}{'gamma':>7}{'n':>6}{'thr':>9}{'fid':>9}{'pooled':>9}{'fail':>6}"]
    for s in summary:
        lines.append(f"{s.regime:<8}{s.model:<12}{s.gamma_threshold:>7.2f}{s.scenarios:>6}"
                     f"{s.mean_throughput:>9.4f}{s.mean_avg_fidelity:>9.4f}"
                     f"{s.pooled_fidelity:>9.4f}{s.failures:>6}")
    return "\n".join(lines)
