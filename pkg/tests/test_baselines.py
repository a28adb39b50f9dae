from __future__ import annotations

import pytest

from conftest import R, S, U, make_graph, split_graph
from surfroute.baselines import (BaselineKind, purified_graph, solve_model, solve_nosplit,
                                 solve_purify, solve_raw)
from surfroute.netmodel import EdgeSpec, Request, ScenarioConfig, generate_requests, generate_topology
from surfroute.routing import FormulationConfig, solve_routing, validate_schedule


def _gen(seed, regime=(0.75, 1.0)):
    cfg = ScenarioConfig(seed=seed, fidelity_range=regime)
    g = generate_topology(cfg)
    return g, generate_requests(g, cfg)


def test_kind_parsing():
    assert BaselineKind.parse("purify2") == BaselineKind("purify", 2)
    assert BaselineKind.parse("Raw").label == "raw"
    assert BaselineKind.parse("purify9").label == "purify9"
    with pytest.raises(ValueError):
        BaselineKind.parse("purify0")
    with pytest.raises(ValueError):
        BaselineKind.parse("teleport")


def test_correction_is_needed_to_meet_budget():
    # three hops at 0.9: cost 3 * 0.1054 = 0.316 exceeds -ln 0.85 = 0.1625
    # one correction at the server recovers 0.2
    g = make_graph([U, R, S, U], [(0, 1, 0.9, 3), (1, 2, 0.9, 3), (2, 3, 0.9, 3)])
    reqs = [Request(0, 3, 1, 1)]
    cfg = FormulationConfig(gamma_threshold=0.85, omega=0.2)
    assert solve_raw(g, reqs, cfg).objective == 0
    assert solve_routing(g, reqs, cfg).objective >= 1


def test_perfect_links_make_correction_irrelevant():
    g, reqs = _gen(3)
    g = g.with_edges(EdgeSpec(e.u, e.v, 1.0, e.capacity) for e in g.edges)
    cfg = FormulationConfig()
    # equal relaxations; integral counts may differ because servers only
    # accept whole corrected codes under the full model
    assert solve_raw(g, reqs, cfg).lp_objective == pytest.approx(
        solve_routing(g, reqs, cfg).lp_objective, abs=1e-7)


def test_perfect_path_gives_equal_counts():
    g = make_graph([U, S, R, S, U], [(0, 1, 1.0, 9), (1, 2, 1.0, 9), (2, 3, 1.0, 9), (3, 4, 1.0, 9)])
    reqs = [Request(0, 4, 3, 3)]
    cfg = FormulationConfig()
    assert solve_raw(g, reqs, cfg).objective == solve_routing(g, reqs, cfg).objective == 3


def test_empty_requests():
    g, _ = _gen(0)
    assert solve_raw(g, [], FormulationConfig()).objective == 0
    assert solve_nosplit(g, [], FormulationConfig()).objective == 0


def test_nosplit_cannot_use_split_layout(fig_split):
    g, reqs = fig_split
    cfg = FormulationConfig(gamma_threshold=0.6)
    assert solve_nosplit(g, reqs, cfg).objective == 0
    assert solve_routing(g, reqs, cfg).objective == 1


def test_nosplit_matches_on_a_single_path():
    g = make_graph([U, S, R, S, U], [(0, 1, 0.95, 9), (1, 2, 0.95, 9), (2, 3, 0.95, 9), (3, 4, 0.95, 9)])
    reqs = [Request(0, 4, 3, 3)]
    cfg = FormulationConfig()
    assert solve_nosplit(g, reqs, cfg).objective == solve_routing(g, reqs, cfg).objective == 3


def test_nosplit_uses_both_disjoint_paths():
    g = make_graph([U, S, S, U], [(0, 1, 0.95, 3), (1, 3, 0.95, 3), (0, 2, 0.95, 3), (2, 3, 0.95, 3)])
    reqs = [Request(0, 3, 3, 2)]
    sched = solve_nosplit(g, reqs, FormulationConfig())
    assert sched.objective >= 2
    assert all(len(seg.paths) == 1 for r in sched.requests[0].routes for seg in r.segments)


@pytest.mark.parametrize("seed", range(10))
def test_nosplit_is_a_valid_full_schedule(seed):
    g, reqs = _gen(seed, (0.5, 1.0) if seed % 2 else (0.75, 1.0))
    cfg = FormulationConfig()
    sched = solve_nosplit(g, reqs, cfg)
    assert validate_schedule(sched, g, reqs, cfg) == []
    for rs in sched.requests:
        for route in rs.routes:
            assert all(len(seg.paths) == 1 for seg in route.segments)


@pytest.mark.parametrize("seed", range(10))
def test_correction_relaxation_dominates_raw(seed):
    g, reqs = _gen(seed, (0.5, 1.0))
    cfg = FormulationConfig()
    assert solve_routing(g, reqs, cfg).lp_objective >= solve_raw(g, reqs, cfg).lp_objective - 1e-7


@pytest.mark.parametrize("seed", range(5))
def test_purify_one_is_raw(seed):
    g, reqs = _gen(seed)
    cfg = FormulationConfig()
    assert solve_purify(g, reqs, cfg, 1).to_json() == solve_raw(g, reqs, cfg).to_json()


def test_purified_edges():
    g = make_graph([U, S, U], [(0, 1, 0.9, 9), (1, 2, 0.9, 8)])
    p = purified_graph(g, 2)
    assert p.fidelity(0, 1) == pytest.approx(0.987804878, abs=1e-9)
    assert [e.capacity for e in p.edges] == [4, 4]
    assert purified_graph(g, 1) is g


def test_too_many_pairs_delivers_nothing():
    g, reqs = _gen(1)
    pairs = max(e.capacity for e in g.edges) + 1
    sched = solve_purify(g, reqs, FormulationConfig(), pairs)
    assert sched.objective == 0
    assert "capacity_model" in sched.metadata


@pytest.mark.parametrize("name", ["surfacenet", "raw", "nosplit", "purify2", "purify9"])
def test_models_validate_on_their_graph(name):
    g, reqs = _gen(7, (0.5, 1.0))
    sched, eg, ecfg = solve_model(BaselineKind.parse(name), g, reqs, FormulationConfig())
    assert validate_schedule(sched, eg, reqs, ecfg) == []


def test_split_graph_helper_defaults():
    g = split_graph()
    assert g.servers == [3] and g.users == [0, 5]
