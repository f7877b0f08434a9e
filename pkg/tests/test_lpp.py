import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornergrowth.errors import (OutOfGrid, RectangleTooLarge, TieDetected,
                                 Truncated)
from cornergrowth.lpp import (BRUTE_FORCE_MAX_CELLS, brute_force_passage,
                              build_grid, build_grid_from_array,
                              growth_interface, passage_last_row, shape_mu)
from cornergrowth.weights import WeightField


class _ArrayField:
    """Test stub exposing a prescribed weight rectangle as a field."""

    def __init__(self, arr, origin=(1, 1)):
        self.arr = np.asarray(arr, dtype=float)
        self.origin = origin

    def rectangle(self, rows, cols, origin=(1, 1)):
        a = origin[0] - self.origin[0]
        b = origin[1] - self.origin[1]
        return self.arr[a:a + rows, b:b + cols]

    def weight_at(self, z):
        return float(self.arr[z[0] - self.origin[0], z[1] - self.origin[1]])


# Enumerating both 2x2 paths: 1+2+4 = 7 through (1,2), 1+3+4 = 8 through (2,1).
TWO_BY_TWO = np.array([[1.0, 2.0], [3.0, 4.0]])


def test_two_by_two_recurrence():
    grid = build_grid_from_array(TWO_BY_TWO)
    assert grid.value_at((2, 2)) == 8.0
    assert grid.value_at((2, 1)) == 4.0
    assert grid.value_at((1, 2)) == 3.0
    # the winning predecessor of (2,2) is (2,1)
    assert grid.parent_at((2, 2)) == 2
    assert grid.parent_at((1, 1)) == 0


def test_one_by_one_is_origin_weight():
    f = WeightField(seed=8)
    grid = build_grid(f, 1, 1)
    assert grid.value_at((1, 1)) == f.weight_at((1, 1))


def test_single_row_is_cumulative_sum():
    f = WeightField(seed=9)
    grid = build_grid(f, 1, 12)
    w = f.rectangle(1, 12)
    acc = 0.0
    for j in range(12):
        acc += w[0, j]
        assert grid.value_at((1, j + 1)) == pytest.approx(acc, rel=1e-12)


def test_brute_force_two_by_two():
    fld = _ArrayField(TWO_BY_TWO)
    assert brute_force_passage(fld, (1, 1), (2, 2)) == 8.0


def test_brute_force_single_site():
    f = WeightField(seed=3)
    assert brute_force_passage(f, (4, 5), (4, 5)) == f.weight_at((4, 5))


def test_brute_force_guard():
    f = WeightField(seed=3)
    with pytest.raises(RectangleTooLarge):
        brute_force_passage(f, (1, 1), (10, 10))
    assert BRUTE_FORCE_MAX_CELLS == 49


def test_dp_matches_oracle_small():
    # acceptance runs 100 fields; a quick slice here
    for seed in range(10):
        f = WeightField(seed=seed)
        grid = build_grid(f, 6, 6)
        for di in range(6):
            for dj in range(6):
                got = grid.value_at((1 + di, 1 + dj))
                want = brute_force_passage(f, (1, 1), (1 + di, 1 + dj))
                assert got == pytest.approx(want, rel=1e-9)


def test_dp_oracle_offset_origin():
    f = WeightField(seed=77)
    grid = build_grid(f, 5, 4, origin=(3, -2))
    want = brute_force_passage(f, (3, -2), (7, 1))
    assert grid.value_at((7, 1)) == pytest.approx(want, rel=1e-9)


def test_strict_monotonicity():
    grid = build_grid(WeightField(seed=21), 40, 40)
    inner = grid.values[1:, 1:]
    assert (np.diff(inner, axis=0) > 0).all()
    assert (np.diff(inner, axis=1) > 0).all()


def test_monotone_coupling_single_weight_increase():
    w = WeightField(seed=13).rectangle(12, 12).copy()
    base = build_grid_from_array(w)
    w2 = w.copy()
    w2[4, 7] += 0.8
    bumped = build_grid_from_array(w2)
    diff = bumped.values - base.values
    assert (diff >= -1e-12).all()
    assert diff[5, 8] > 0


def test_tie_detected():
    w = np.array([[1.0, 2.0], [2.0, 5.0]])   # both predecessors of (2,2) = 3
    with pytest.raises(TieDetected):
        build_grid_from_array(w)


def test_positive_weights_required():
    with pytest.raises(ValueError):
        build_grid_from_array(np.array([[1.0, -2.0], [3.0, 4.0]]))


def test_growth_interface_empty_at_zero():
    grid = build_grid(WeightField(seed=4), 20, 20)
    assert growth_interface(grid, 0.0).shape == (0, 2)


def test_growth_interface_origin_only():
    grid = build_grid(WeightField(seed=4), 20, 20)
    w11 = grid.value_at((1, 1))
    t = min(grid.value_at((1, 2)), grid.value_at((2, 1))) * 0.999999
    t = max(t, w11 * 1.000001)
    sites = growth_interface(grid, t)
    assert sites.tolist() == [[1, 1]]


def test_growth_interface_predicate():
    grid = build_grid(WeightField(seed=42), 100, 100)
    t = 30.0
    sites = growth_interface(grid, t)
    assert sites.shape[0] > 0
    for i, j in sites:
        assert grid.value_at((i, j)) <= t
        assert grid.value_at((i + 1, j + 1)) > t
    # ordered by first coordinate
    assert (np.diff(sites[:, 0]) >= 0).all()
    # a staircase covers every first coordinate up to its max
    assert set(sites[:, 0]) == set(range(1, sites[:, 0].max() + 1))


def test_growth_interface_truncated():
    grid = build_grid(WeightField(seed=5), 8, 8)
    with pytest.raises(Truncated):
        growth_interface(grid, 1e9)


def test_value_outside_grid():
    grid = build_grid(WeightField(seed=5), 4, 4)
    with pytest.raises(OutOfGrid):
        grid.value_at((5, 1))


def test_g01_accessors():
    grid = build_grid(WeightField(seed=50), 6, 6)
    assert grid.g01_at((1, 1)) == 0.0
    w11 = grid.origin_weight
    assert grid.g01_at((3, 4)) == pytest.approx(grid.value_at((3, 4)) - w11)
    assert np.allclose(grid.g01(), grid.values[1:, 1:] - w11)


def test_last_row_matches_full_grid_bitwise():
    f = WeightField(seed=61)
    grid = build_grid(f, 30, 17)
    row = passage_last_row(f, 30, 17)
    assert np.array_equal(row, grid.values[30, :])


def test_shape_mu_values():
    assert shape_mu(1, 1) == 4.0
    assert shape_mu(4, 1) == 9.0
    assert shape_mu(7.3, 0) == pytest.approx(7.3)
    with pytest.raises(ValueError):
        shape_mu(-1, 2)


@settings(max_examples=80, deadline=None)
@given(u=st.floats(0, 100), v=st.floats(0, 100),
       up=st.floats(0, 100), vp=st.floats(0, 100))
def test_shape_mu_superadditive(u, v, up, vp):
    lhs = shape_mu(u + up, v + vp)
    rhs = shape_mu(u, v) + shape_mu(up, vp)
    assert lhs >= rhs - 1e-9 * max(1.0, rhs)


def test_csv_dump(tmp_path):
    grid = build_grid(WeightField(seed=2), 3, 4)
    path = tmp_path / "grid.csv"
    grid.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "i,j,G,parent"
    assert len(lines) == 1 + 3 * 4
    first = lines[1].split(",")
    assert first[0] == "1" and first[1] == "1" and first[3] == "O"
    assert float(first[2]) == grid.value_at((1, 1))
    parents = {row.split(",")[3] for row in lines[1:]}
    assert parents <= {"O", "L", "D"}
