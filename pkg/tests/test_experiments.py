from __future__ import annotations

import dataclasses

import pytest

from surfroute import experiments as ex
from surfroute.netmodel import ScenarioConfig
from surfroute.surface_code import calibrate_omega

SMALL = ScenarioConfig(node_count=12, server_count=2, user_count=6, request_count=3)


def spec(**kw):
    base = dict(scenario_count=2, models=("surfacenet", "raw"), scenario=SMALL)
    base.update(kw)
    return ex.SweepSpec(**base)


def test_one_scenario_two_models():
    rows = ex.run_sweep(spec(scenario_count=1, regimes=(ex.REGIMES["high"],), scenario=ScenarioConfig()))
    assert [r.model for r in rows] == ["surfacenet", "raw"]
    sn, raw = rows
    assert sn.lp_obj >= raw.lp_obj - 1e-7
    both_empty = sn.fidelity_weight == 0 and raw.fidelity_weight == 0
    assert both_empty or sn.avg_fidelity >= raw.avg_fidelity


def test_row_count_per_regime():
    rows = ex.run_sweep(spec(scenario_count=3, models=("surfacenet", "raw", "nosplit")))
    for name in ("high", "low"):
        assert sum(r.regime == name for r in rows) == 3 * 3


def test_rows_are_sane():
    rows = ex.run_sweep(spec(models=ex.DEFAULT_MODELS, validate=True))
    for r in rows:
        assert r.status == "ok"
        assert 0 <= r.throughput <= 1 and 0 <= r.avg_fidelity <= 1
        assert r.lp_obj >= r.int_obj - 1e-7
        assert r.violations == 0


def test_csv_is_byte_stable(tmp_path):
    a = ex.rows_to_csv(ex.run_sweep(spec()))
    b = ex.rows_to_csv(ex.run_sweep(spec()))
    assert a == b
    assert a.splitlines()[0] == ",".join(ex.CSV_COLUMNS)
    ex.write_csv(ex.run_sweep(spec()), tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == a


def test_threshold_sweep_order_and_extremes():
    s = spec(regimes=(ex.REGIMES["low"],), scenario_count=3)
    rows = ex.threshold_sweep(s, (0.0, 0.7, 1.0))
    assert [r.gamma_threshold for r in rows] == sorted(r.gamma_threshold for r in rows)
    by_gamma = {g: sum(r.throughput for r in rows if r.gamma_threshold == g) for g in (0.0, 0.7, 1.0)}
    assert by_gamma[0.0] == max(by_gamma.values())


def test_perfect_threshold_without_correction_blocks_everything():
    s = spec(regimes=(ex.REGIMES["low"],), scenario_count=3, omega=0.0)
    rows = ex.threshold_sweep(s, (1.0,))
    assert all(r.throughput == 0 for r in rows)


@pytest.mark.parametrize("grid", [(), (0.8, 0.5)])
def test_threshold_grid_checked(grid):
    with pytest.raises(ValueError):
        ex.threshold_sweep(spec(), grid)


@pytest.mark.parametrize("kw", [{"scenario_count": 0}, {"regimes": ((0.0, 1.0),)},
                                {"models": ("teleport",)}])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        spec(**kw)


def test_failed_scenario_is_recorded():
    bad = dataclasses.replace(SMALL, attachment=50)
    rows = ex.run_sweep(spec(scenario=bad, scenario_count=1))
    assert rows and all(r.status.startswith("error") for r in rows)


def test_summary_pools_by_qubits():
    rows = ex.run_sweep(spec(scenario_count=3))
    summ = ex.summarize(rows)
    assert {(s.regime, s.model) for s in summ} == {(g, m) for g in ("high", "low") for m in ("surfacenet", "raw")}
    for s in summ:
        mine = [r for r in rows if r.regime == s.regime and r.model == s.model]
        w = sum(r.fidelity_weight for r in mine)
        assert s.pooled_fidelity == pytest.approx(sum(r.fidelity_sum for r in mine) / w if w else 0)
    assert "pooled" in ex.format_summary(summ)


def test_calibrated_omega_is_used():
    rows = ex.run_sweep(spec(scenario_count=1, regimes=(ex.REGIMES["high"],), calibrate=True,
                             calibration_trials=500))
    lo, hi = ex.REGIMES["high"]
    expected = calibrate_omega(3, (lo + hi) / 2, 500, 0)
    assert all(r.omega == expected for r in rows)
