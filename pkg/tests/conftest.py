from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surfroute.netmodel import EdgeSpec, NetworkGraph, NodeRole, Request  # noqa: E402

U, S, R = NodeRole.USER, NodeRole.SWITCH, NodeRole.SERVER


def make_graph(roles, edges, switch_cap=100) -> NetworkGraph:
    """Small hand-built graph; ``edges`` holds (u, v, fidelity, capacity)."""
    caps = tuple(switch_cap if r.is_switch else 0 for r in roles)
    return NetworkGraph(tuple(roles), caps, tuple(EdgeSpec(*e) for e in edges))


def split_graph(g_up=0.9, g_low=0.8, g_out=0.95, cap_up=5, cap_low=4, cap_out=9) -> NetworkGraph:
    """A -> {sw1, sw2} -> server -> sw3 -> B with the upper and lower branches capped."""
    return make_graph(
        [U, S, S, R, S, U],
        [(0, 1, g_up, cap_up), (1, 3, g_up, cap_up),
         (0, 2, g_low, cap_low), (2, 3, g_low, cap_low),
         (3, 4, g_out, cap_out), (4, 5, g_out, cap_out)])


@pytest.fixture
def fig_split():
    return split_graph(), [Request(0, 5, 9, 1)]


def pytest_terminal_summary(terminalreporter):
    import acceptance_report

    if acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(acceptance_report.LINES):
            terminalreporter.write_line(acceptance_report.LINES[k])
