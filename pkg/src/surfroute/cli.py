"""Command line entry point: ``surfroute <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiments as ex
from .baselines import BaselineKind, purified_graph, solve_model
from .fidelity import evaluate_schedule
from .netmodel import (ParseError, ScenarioConfig, ValidationError, generate_requests,
                       generate_topology, load_graph, load_requests, save_graph, save_requests)
from .routing import FormulationConfig, IntegralSchedule, validate_schedule
from .routing.formulation import TRANSFORMS
from .surface_code import calibrate_omega, simulate_logical_errors


def _grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        count = int(round((hi - lo) / step)) + 1
        return tuple(round(lo + i * step, 10) for i in range(count))
    return tuple(float(v) for v in text.split(","))


def _regimes(name: str) -> tuple[tuple[float, float], ...]:
    if name == "both":
        return (ex.REGIMES["high"], ex.REGIMES["low"])
    return (ex.REGIMES[name],)


def cmd_gen(args) -> int:
    n = args.code_size
    cfg = ScenarioConfig(
        seed=args.seed, node_count=args.nodes, attachment=args.attachment,
        server_count=args.servers, user_count=args.users,
        fidelity_range=(args.fid_lo, args.fid_hi),
        switch_capacity_range=(2 * n, 6 * n), edge_capacity_range=(n, 3 * n),
        request_count=args.request_count, n=n, m_range=(args.m_lo, args.m_hi))
    graph = generate_topology(cfg)
    save_graph(graph, args.out)
    if args.requests_out:
        save_requests(generate_requests(graph, cfg), args.requests_out)
    return 0


def _formulation(args) -> FormulationConfig:
    return FormulationConfig(gamma_threshold=args.gamma_threshold, omega=args.omega,
                             transform=args.transform)


def _kind(args) -> BaselineKind:
    if args.model == "purify":
        return BaselineKind("purify", args.pairs)
    return BaselineKind(args.model)


def cmd_solve(args) -> int:
    graph = load_graph(args.topology)
    requests = load_requests(args.requests, graph)
    sched, egraph, ecfg = solve_model(_kind(args), graph, requests, _formulation(args))
    problems = validate_schedule(sched, egraph, requests, ecfg)
    for v in problems:
        print(f"violation: {v}", file=sys.stderr)
    sched.save(args.out)
    print(f"objective {sched.objective} lp_objective {sched.lp_objective:.6f}")
    return 1 if problems else 0


def cmd_eval(args) -> int:
    graph = purified_graph(load_graph(args.topology), args.pairs)
    requests = load_requests(args.requests, graph)
    sched = IntegralSchedule.load(args.schedule)
    metrics = evaluate_schedule(sched, graph, requests, args.gamma_threshold, args.omega)
    metrics.save(args.out)
    print(f"throughput {metrics.throughput:.6f} average_fidelity {metrics.average_fidelity:.6f}")
    return 0


def cmd_sfc_sim(args) -> int:
    res = simulate_logical_errors(args.distance, args.p, args.trials, args.seed)
    print(f"rate {res.rate:.6g} ci95 {res.ci95:.6g} trials {res.trials} "
          f"failures {res.failures} intractable {res.intractable}")
    return 0


def cmd_calibrate(args) -> int:
    print(f"omega {calibrate_omega(args.distance, args.fin, args.trials, args.seed):.6g}")
    return 0


def _spec(args, **extra) -> ex.SweepSpec:
    return ex.SweepSpec(
        scenario_count=args.scenarios, regimes=_regimes(args.regime),
        models=tuple(m.strip() for m in args.models.split(",") if m.strip()),
        base_seed=args.seed, gamma_threshold=args.gamma_threshold, omega=args.omega,
        transform=args.transform, calibrate=args.calibrate, record_timing=args.timing, **extra)


def _finish(rows, args) -> int:
    ex.write_csv(rows, args.out)
    if args.summary:
        print(ex.format_summary(ex.summarize(rows)))
    return 0


def cmd_sweep(args) -> int:
    return _finish(ex.run_sweep(_spec(args)), args)


def cmd_threshold_sweep(args) -> int:
    grid = _grid(args.grid)
    spec = _spec(args, gamma_grid=grid)
    return _finish(ex.threshold_sweep(spec, grid, models=spec.models), args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="surfroute", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a topology (and optionally requests)")
    g.add_argument("--nodes", type=int, default=20)
    g.add_argument("--servers", type=int, default=4)
    g.add_argument("--users", type=int, default=10)
    g.add_argument("--attachment", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--fid-lo", type=float, default=0.75)
    g.add_argument("--fid-hi", type=float, default=1.0)
    g.add_argument("--code-size", type=int, default=9)
    g.add_argument("--request-count", type=int, default=5)
    g.add_argument("--m-lo", type=int, default=1)
    g.add_argument("--m-hi", type=int, default=3)
    g.add_argument("--out", required=True)
    g.add_argument("--requests-out")
    g.set_defaults(func=cmd_gen)

    def routing_opts(q):
        q.add_argument("--gamma-threshold", type=float, default=0.7)
        q.add_argument("--omega", type=float, default=0.05)

    s = sub.add_parser("solve", help="schedule requests on a topology")
    s.add_argument("--topology", required=True)
    s.add_argument("--requests", required=True)
    routing_opts(s)
    s.add_argument("--transform", choices=TRANSFORMS, default="neg-log")
    s.add_argument("--model", choices=("surfacenet", "raw", "nosplit", "purify"), default="surfacenet")
    s.add_argument("--pairs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("eval", help="evaluate a saved schedule")
    e.add_argument("--topology", required=True)
    e.add_argument("--requests", required=True)
    e.add_argument("--schedule", required=True)
    routing_opts(e)
    e.add_argument("--pairs", type=int, default=1, help="evaluate on the purified graph")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("sfc-sim", help="Monte Carlo logical error rate")
    c.add_argument("--distance", type=int, required=True)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--trials", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_sfc_sim)

    o = sub.add_parser("calibrate-omega", help="fidelity gain of one correction cycle")
    o.add_argument("--distance", type=int, required=True)
    o.add_argument("--fin", type=float, required=True)
    o.add_argument("--trials", type=int, default=10_000)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_calibrate)

    for name, func in (("sweep", cmd_sweep), ("threshold-sweep", cmd_threshold_sweep)):
        w = sub.add_parser(name)
        w.add_argument("--scenarios", type=int, default=1080)
        w.add_argument("--regime", choices=("high", "low", "both"), default="both")
        w.add_argument("--models", default=",".join(ex.DEFAULT_MODELS)
                       if name == "sweep" else "surfacenet")
        w.add_argument("--seed", type=int, default=0)
        routing_opts(w)
        w.add_argument("--transform", choices=TRANSFORMS, default="neg-log")
        w.add_argument("--calibrate", action="store_true", help="derive omega from the code simulator")
        w.add_argument("--timing", action="store_true",
                       help="fill wall_ms (output is then no longer byte-stable)")
        w.add_argument("--summary", action="store_true", help="print per-model aggregates")
        w.add_argument("--out", required=True)
        if name == "threshold-sweep":
            w.add_argument("--grid", default="0.5:0.95:0.05")
        w.set_defaults(func=func)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ParseError, ValidationError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
