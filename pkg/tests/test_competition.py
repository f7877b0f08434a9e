import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornergrowth.competition import (Label, angle_estimate,
                                      competition_interface, f_of_theta,
                                      interface_trace_hashed, label_clusters,
                                      psi_at, speed_point, theta_cdf)
from cornergrowth.errors import OutOfHorizon, Truncated
from cornergrowth.lpp import build_grid, build_grid_from_array
from cornergrowth.weights import WeightField

TWO_BY_TWO = np.array([[1.0, 2.0], [3.0, 4.0]])


def test_labels_two_by_two():
    grid = build_grid_from_array(TWO_BY_TWO)
    labels = label_clusters(grid)
    # 1+3+4 beats 1+2+4, so (2,2) is infected through (2,1)
    assert labels.label_at((2, 2)) == Label.FROM_21
    assert labels.label_at((1, 1)) == Label.NEUTRAL
    assert labels.label_at((2, 1)) == Label.FROM_21
    assert labels.label_at((1, 2)) == Label.FROM_12


def test_labels_forced_on_axes():
    grid = build_grid(WeightField(seed=17), 8, 8)
    labels = label_clusters(grid)
    for i in range(2, 9):
        assert labels.label_at((i, 1)) == Label.FROM_21
    for j in range(2, 9):
        assert labels.label_at((1, j)) == Label.FROM_12


def test_labels_partition_and_connected_rows():
    grid = build_grid(WeightField(seed=23), 60, 60)
    labels = label_clusters(grid)
    counts = labels.counts()
    assert counts["NEUTRAL"] == 1
    assert counts["NEUTRAL"] + counts["FROM_21"] + counts["FROM_12"] == 60 * 60
    # interface separation: within each column, 21-labels sit below 12-labels
    body = labels.labels[1:, 1:]
    for i in range(1, 60):
        col = body[i, :]
        ones = np.nonzero(col == 1)[0]
        twos = np.nonzero(col == 2)[0]
        if ones.size and twos.size:
            assert ones.max() < twos.min()


def test_interface_first_step_by_argmin():
    # G(2,1) = w11 + 0.5 < G(1,2) = w11 + 1.5 forces the first step right
    w = np.array([[2.0, 1.5, 0.9], [0.5, 1.0, 1.1], [1.0, 1.2, 3.0]])
    grid = build_grid_from_array(w)
    trace = competition_interface(grid, 2)
    assert tuple(trace.sites[1]) == (2, 1)
    assert trace.taus[0] == 0.0
    assert trace.taus[1] == pytest.approx(0.5, rel=1e-12)


def test_interface_matches_cluster_rule():
    # the local argmin walk and the cluster rule trace the same path: the
    # interface keeps the (2,1)-cluster on its clockwise side, so it steps
    # up exactly when the diagonal corner belongs to that cluster
    for seed in (3, 14, 15):
        grid = build_grid(WeightField(seed=seed), 40, 40)
        labels = label_clusters(grid)
        trace = competition_interface(grid, 30)
        for k in range(30):
            i, j = trace.sites[k]
            stepped_up = trace.sites[k + 1][1] == j + 1
            corner = labels.label_at((i + 1, j + 1))
            assert corner != Label.NEUTRAL
            assert stepped_up == (corner == Label.FROM_21)


def test_interface_invariant_to_origin_weight():
    w = WeightField(seed=31).rectangle(25, 25).copy()
    grid_a = build_grid_from_array(w)
    w2 = w.copy()
    w2[0, 0] = 17.5
    grid_b = build_grid_from_array(w2)
    ta = competition_interface(grid_a, 20)
    tb = competition_interface(grid_b, 20)
    assert np.array_equal(ta.sites, tb.sites)
    # taus subtract the origin weight; equal up to float cancellation
    assert np.allclose(ta.taus, tb.taus, rtol=1e-12, atol=1e-9)


def test_interface_truncated_and_tie_errors():
    grid = build_grid(WeightField(seed=2), 5, 5)
    with pytest.raises(Truncated):
        competition_interface(grid, 5)


def test_taus_strictly_increasing():
    grid = build_grid(WeightField(seed=44), 30, 30)
    trace = competition_interface(grid, 25)
    assert (np.diff(trace.taus) > 0).all()


def test_fast_path_matches_grid_route_bitwise():
    f = WeightField(seed=58)
    fast = interface_trace_hashed(f.dseed, 50)
    grid = build_grid(f, 51, 51)
    slow = competition_interface(grid, 50)
    assert np.array_equal(fast.sites, slow.sites)
    assert np.array_equal(fast.taus, slow.taus)


def test_psi_step_semantics():
    grid = build_grid(WeightField(seed=6), 20, 20)
    trace = competition_interface(grid, 15)
    assert psi_at(trace, 0.0) == (1, 1)
    t1 = trace.taus[1]
    assert psi_at(trace, t1) == tuple(trace.sites[1])          # right continuity
    assert psi_at(trace, t1 * (1 - 1e-12)) == (1, 1)
    with pytest.raises(OutOfHorizon):
        psi_at(trace, trace.taus[-1])
    with pytest.raises(ValueError):
        psi_at(trace, -0.5)


def test_psi_on_growth_interface():
    # the tracked point sits on the level set at the shifted time
    grid = build_grid(WeightField(seed=9), 60, 60)
    trace = competition_interface(grid, 40)
    w11 = trace.origin_weight
    for t in np.linspace(0, float(trace.taus[-1]) * 0.95, 7):
        i, j = psi_at(trace, float(t))
        assert grid.value_at((i, j)) <= t + w11
        assert grid.value_at((i + 1, j + 1)) > t + w11


def test_angle_estimate():
    grid = build_grid(WeightField(seed=12), 30, 30)
    trace = competition_interface(grid, 20)
    k = 20
    i, j = trace.sites[k]
    assert angle_estimate(trace, k) == pytest.approx(math.atan2(j, i))
    diag = math.atan2(5, 5)
    assert diag == pytest.approx(math.pi / 4)
    with pytest.raises(ValueError):
        angle_estimate(trace, 21)


def test_theta_cdf_values():
    assert theta_cdf(math.pi / 4) == pytest.approx(0.5, abs=1e-15)
    assert theta_cdf(0.0) == 0.0
    assert theta_cdf(math.pi / 2) == 1.0
    # frozen from a 30-digit evaluation of the closed form at pi/6
    assert theta_cdf(math.pi / 6) == pytest.approx(0.4317651311691964,
                                                   abs=1e-15)
    with pytest.raises(ValueError):
        theta_cdf(-0.1)
    with pytest.raises(ValueError):
        theta_cdf(math.pi / 2 + 0.1)


def test_f_of_theta_values():
    assert f_of_theta(0.0) == 1.0
    assert f_of_theta(math.pi / 2) == -1.0
    assert f_of_theta(math.pi / 4) == 0.0
    with pytest.raises(ValueError):
        f_of_theta(2.0)


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(0, math.pi / 2))
def test_cdf_f_consistency(alpha):
    # P(theta <= a) = (1 - f(a)) / 2
    assert theta_cdf(alpha) == pytest.approx((1 - f_of_theta(alpha)) / 2,
                                             abs=1e-12)


def test_monotonicity_of_laws():
    xs = np.linspace(0, math.pi / 2, 200)
    cdf = [theta_cdf(x) for x in xs]
    f = [f_of_theta(x) for x in xs]
    assert (np.diff(cdf) > 0).all()
    assert (np.diff(f) < 0).all()


def test_speed_point():
    assert speed_point(0.0) == (1.0, 0.0)
    sx, sy = speed_point(math.pi / 2)
    assert sx == pytest.approx(0.0, abs=1e-16) and sy == 1.0
    vx, vy = speed_point(math.pi / 4)
    assert vx == pytest.approx(0.25, abs=1e-15)
    assert vy == pytest.approx(0.25, abs=1e-15)


def test_trace_jsonl(tmp_path):
    grid = build_grid(WeightField(seed=3), 10, 10)
    trace = competition_interface(grid, 6)
    path = tmp_path / "trace.jsonl"
    trace.to_jsonl(path)
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert len(lines) == 7
    assert lines[0] == {"n": 0, "i": 1, "j": 1, "tau": 0.0}
    assert lines[3]["n"] == 3
    assert {"n", "i", "j", "tau"} == set(lines[5])
