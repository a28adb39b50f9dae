from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_matching_weight
from surfroute.surface_code import (PauliPattern, SyndromeMap, TractabilityError, build_layout,
                                    boundary_weight, calibrate_omega, decode_mwpm, extract_syndrome,
                                    inject_errors, is_logical_failure, logical_error_rate, match_type,
                                    min_weight_matching, pair_weight, simulate_logical_errors)

L3 = build_layout(3)
L5 = build_layout(5)


def interior(layout):
    last = layout.size - 1
    return [q for q in layout.data if 0 < q[0] < last and 0 < q[1] < last]


def single(layout, q, op):
    return PauliPattern.from_dict(layout, {q: op})


# -- layout ----------------------------------------------------------------

def test_distance_three_counts():
    assert len(L3.data) == 13
    assert len(L3.measure_z) == 6 and len(L3.measure_x) == 6


def test_distance_one():
    L1 = build_layout(1)
    assert len(L1.data) == 1 and not L1.measure_z and not L1.measure_x


def test_bad_distance():
    with pytest.raises(ValueError):
        build_layout(0)


def test_interior_neighbors():
    mz, mx = set(L3.measure_z), set(L3.measure_x)
    assert interior(L3)
    for q in interior(L3):
        nbs = L3.neighbors(q)
        assert len(nbs) == 4
        assert sum(n in mz for n in nbs) == 2 and sum(n in mx for n in nbs) == 2


def test_logical_supports_have_distance_qubits():
    for layout in (L3, L5):
        assert len(layout.logical_x_support) == layout.distance
        assert len(layout.logical_z_support) == layout.distance
        # the two logicals overlap on exactly one qubit
        assert len(set(layout.logical_x_support) & set(layout.logical_z_support)) == 1


def test_logicals_commute_with_stabilizers():
    """A column of X and a row of Z leave no syndrome but flip the code."""
    for layout in (L3, L5):
        xcol = PauliPattern.from_dict(layout, {q: "X" for q in layout.logical_x_support})
        zrow = PauliPattern.from_dict(layout, {q: "Z" for q in layout.logical_z_support})
        for op in (xcol, zrow):
            assert extract_syndrome(layout, op).empty
            assert is_logical_failure(layout, op)


# -- noise and syndromes -------------------------------------------------------

def test_injection_extremes():
    assert inject_errors(L3, 0.0, 1).weight == 0
    assert inject_errors(L5, 1.0, 1).weight == len(L5.data)


def test_injection_determinism():
    assert inject_errors(L5, 0.3, 42) == inject_errors(L5, 0.3, 42)


def test_empty_syndrome():
    assert extract_syndrome(L3, PauliPattern.identity(L3)).empty


@pytest.mark.parametrize("q", interior(L3))
def test_single_x_and_y_syndromes(q):
    sx = extract_syndrome(L3, single(L3, q, "X"))
    assert len(sx.flipped_z) == 2 and not sx.flipped_x
    assert sx.flipped_z <= set(L3.neighbors(q))
    sy = extract_syndrome(L3, single(L3, q, "Y"))
    assert len(sy.flipped_z) == 2 and len(sy.flipped_x) == 2


def patterns(layout):
    n = len(layout.data)
    bits = st.lists(st.integers(0, 1), min_size=n, max_size=n)
    return st.builds(lambda x, z: PauliPattern(np.array(x), np.array(z)), bits, bits)


@settings(max_examples=1000, deadline=None)
@given(patterns(L5), patterns(L5))
def test_syndrome_linearity(e1, e2):
    assert extract_syndrome(L5, e1 ^ e2) == extract_syndrome(L5, e1) ^ extract_syndrome(L5, e2)


def test_pattern_dict_round_trip():
    ops = {(0, 0): "X", (2, 2): "Y", (4, 4): "Z"}
    assert PauliPattern.from_dict(L3, ops).to_dict(L3) == ops
    with pytest.raises(ValueError):
        PauliPattern.from_dict(L3, {(1, 0): "X"})  # a measurement qubit


# -- matching ------------------------------------------------------------------

def test_weights():
    assert pair_weight((1, 0), (3, 2)) == 2
    assert boundary_weight((1, 2), 3, "Z") == 1
    assert boundary_weight((3, 2), 3, "Z") == 1
    assert boundary_weight((2, 3), 3, "X") == 1


def test_empty_decode():
    assert decode_mwpm(L3, SyndromeMap(frozenset(), frozenset())).weight == 0


@pytest.mark.parametrize("q", interior(L3))
def test_single_x_correction(q):
    corr = decode_mwpm(L3, extract_syndrome(L3, single(L3, q, "X")))
    assert corr.weight == 1 and not corr.z.any()
    # any weight-1 X correction that clears the syndrome is acceptable
    assert extract_syndrome(L3, single(L3, q, "X") ^ corr).empty


@pytest.mark.parametrize("layout", [L3, L5])
def test_matching_agrees_with_exhaustive_pairing(layout):
    rng = np.random.default_rng(layout.distance)
    for _ in range(150):
        for kind, pool in (("Z", layout.measure_z), ("X", layout.measure_x)):
            k = int(rng.integers(1, 7))
            pts = sorted(pool[i] for i in rng.choice(len(pool), size=min(k, len(pool)), replace=False))
            pw = [[pair_weight(a, b) for b in pts] for a in pts]
            bw = [boundary_weight(q, layout.distance, kind) for q in pts]
            assert match_type(layout, pts, kind).weight == exhaustive_matching_weight(pw, bw)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=7), st.data())
def test_matching_on_arbitrary_weights(bw, data):
    k = len(bw)
    pw = [[0.0] * k for _ in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        pw[i][j] = pw[j][i] = data.draw(st.floats(0, 10))
    m = min_weight_matching(pw, bw)
    assert m.weight == pytest.approx(exhaustive_matching_weight(pw, bw))
    used = [i for p in m.pairs for i in p] + list(m.to_boundary)
    assert sorted(used) == list(range(k))


def test_tractability_bound():
    with pytest.raises(TractabilityError, match="lower error rate"):
        min_weight_matching([[1.0] * 17 for _ in range(17)], [1.0] * 17)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.02, 0.05, 0.1]))
def test_decoder_clears_every_syndrome(seed, p):
    errors = inject_errors(L5, p, seed)
    corr = decode_mwpm(L5, extract_syndrome(L5, errors))
    assert extract_syndrome(L5, errors ^ corr).empty


def test_every_single_error_corrected_at_distance_three():
    failures = 0
    for q in L3.data:
        for op in "XYZ":
            e = single(L3, q, op)
            failures += is_logical_failure(L3, e ^ decode_mwpm(L3, extract_syndrome(L3, e)))
    assert failures == 0


@settings(max_examples=500, deadline=None)
@given(st.lists(st.sampled_from(L5.data), min_size=1, max_size=2, unique=True),
       st.lists(st.sampled_from("XYZ"), min_size=2, max_size=2))
def test_weight_two_errors_corrected_at_distance_five(qubits, ops):
    e = PauliPattern.from_dict(L5, dict(zip(qubits, ops)))
    assert not is_logical_failure(L5, e ^ decode_mwpm(L5, extract_syndrome(L5, e)))


# -- Monte Carlo -----------------------------------------------------------------

def test_noiseless_rate():
    assert logical_error_rate(3, 0.0, 200, 0) == (0.0, 0.0)


def test_monte_carlo_determinism():
    assert simulate_logical_errors(3, 0.05, 2000, 9) == simulate_logical_errors(3, 0.05, 2000, 9)


def test_larger_code_fails_less():
    r3, _ = logical_error_rate(3, 0.01, 10_000, 1)
    r5, _ = logical_error_rate(5, 0.01, 10_000, 1)
    assert r5 < r3


def test_calibration():
    assert calibrate_omega(3, 1.0, 500, 0) == 0.0
    w3 = calibrate_omega(3, 0.99, 10_000, 2)
    w5 = calibrate_omega(5, 0.99, 10_000, 2)
    assert w3 > 0
    _, ci = logical_error_rate(3, 0.01, 10_000, 2)
    assert w5 >= w3 - ci


def test_calibration_domain():
    with pytest.raises(ValueError):
        calibrate_omega(3, 0.0, 10, 0)
