import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longdiff import (
    ValidationError,
    absolute_schedule,
    group_config,
    group_position,
    grouped_matrix,
    relative_matrix,
    schedule,
    shift,
)


def oracle_group(p, S):
    # float-math version of the grouping rule
    return math.ceil(p / S) if p >= 0 else math.floor(p / S)


def oracle_schedule(N, G):
    """Naive pure-Python schedule built entry by entry from the two rules."""
    S = math.ceil((N - 1) / (G - 1))
    mats = [[[oracle_group(i - j, S) for j in range(N)] for i in range(N)]]
    for _ in range(S - 1):
        prev = mats[-1]
        nxt = [[0] * N for _ in range(N)]
        for i in range(N):
            for j in range(N):
                if i < j:
                    nxt[i][j] = prev[i][j - 1] if j - 1 >= 0 else 0
                elif i > j:
                    nxt[i][j] = prev[i - 1][j] if i - 1 >= 0 else 0
                else:
                    nxt[i][j] = prev[i][j]
        mats.append(nxt)
    return mats


def test_group_config_n9_g3():
    cfg = group_config(9, 3)
    assert (cfg.S, cfg.M) == (4, 3)


def test_group_config_n128_g16():
    cfg = group_config(128, 16)
    assert (cfg.S, cfg.M) == (9, 8)
    assert cfg.S == math.ceil(127 / 15)


@pytest.mark.parametrize("k", [2, 3, 17, 128])
def test_group_config_degenerate(k):
    cfg = group_config(k, k)
    assert (cfg.S, cfg.M) == (1, 0)


@pytest.mark.parametrize("N,G", [(9, 1), (9, 10), (1, 1), (0, 0), (5, 0)])
def test_group_config_errors(N, G):
    with pytest.raises(ValidationError):
        group_config(N, G)


def test_group_position_values():
    cfg = group_config(9, 3)
    assert group_position(0, cfg) == 0
    assert [group_position(p, cfg) for p in (1, 2, 3, 4)] == [1, 1, 1, 1]
    assert [group_position(p, cfg) for p in (5, 6, 7, 8)] == [2, 2, 2, 2]
    assert group_position(-5, cfg) == -2
    with pytest.raises(ValidationError):
        group_position(9, cfg)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 200), st.data())
def test_group_position_odd_monotone_surjective(N, data):
    G = data.draw(st.integers(2, N))
    cfg = group_config(N, G)
    vals = [group_position(p, cfg) for p in range(-(N - 1), N)]
    assert all(group_position(-p, cfg) == -group_position(p, cfg)
               for p in range(N))
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    lo, hi = min(vals), max(vals)
    assert set(vals) == set(range(lo, hi + 1))
    assert -(G - 1) <= lo and hi <= G - 1


def test_relative_matrix_small():
    assert np.array_equal(relative_matrix(2), [[0, -1], [1, 0]])
    assert np.array_equal(relative_matrix(1), [[0]])
    assert np.array_equal(relative_matrix(9)[:, 0], np.arange(9))


def test_grouped_matrix_columns():
    g = grouped_matrix(9, group_config(9, 3))
    assert list(g[:, 0]) == [0, 1, 1, 1, 1, 2, 2, 2, 2]
    g64 = grouped_matrix(6, group_config(6, 4))
    assert list(g64[:, 0]) == [0, 1, 1, 2, 2, 3]


def test_grouped_matrix_identity_when_g_equals_n():
    assert np.array_equal(grouped_matrix(7, group_config(7, 7)), relative_matrix(7))


def test_grouped_matrix_value_bound():
    for N, G in [(9, 3), (17, 5), (40, 7), (33, 33)]:
        g = grouped_matrix(N, group_config(N, G))
        vals = np.unique(g)
        assert len(vals) <= 2 * G - 1
        assert vals.min() >= -(G - 1) and vals.max() <= G - 1


def test_shift_first_column_n9_g3():
    cfg = group_config(9, 3)
    shifted = shift(grouped_matrix(9, cfg))
    assert list(shifted[:, 0]) == [0, 0, 1, 1, 1, 1, 2, 2, 2]


def test_shift_zero_fixed_point():
    z = np.zeros((5, 5), dtype=np.int64)
    assert np.array_equal(shift(z), z)


def test_shift_n6_g4():
    shifted = shift(grouped_matrix(6, group_config(6, 4)))
    assert list(shifted[:, 0]) == [0, 0, 1, 1, 2, 2]


def test_shift_rejects_invalid():
    bad = np.arange(9).reshape(3, 3)
    with pytest.raises(ValidationError):
        shift(bad)
    nonzero_diag = np.array([[1, -2], [2, 1]])
    with pytest.raises(ValidationError):
        shift(nonzero_diag)


def test_schedule_assignment_records_n9_g3():
    sched = schedule(9, group_config(9, 3))
    assert len(sched) == 4
    assert sched.record(1, 0) == [1, 0, 0, 0]
    assert sched.record(4, 0) == [1, 1, 1, 1]
    assert sum(sched.record(4, 0)) == 4


def test_schedule_record_n10_g4():
    sched = schedule(10, group_config(10, 4))
    rec = sched.record(9, 0)
    assert rec == [3, 3, 3]
    assert sum(rec) == 9


def test_schedule_matches_naive_oracle():
    for N, G in [(9, 3), (10, 4), (6, 4), (13, 5), (21, 2)]:
        got = schedule(N, group_config(N, G))
        want = oracle_schedule(N, G)
        assert len(got) == len(want)
        for m in range(len(want)):
            assert np.array_equal(got[m], np.asarray(want[m])), (N, G, m)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 48), st.data())
def test_record_sum_identity_random(N, data):
    G = data.draw(st.integers(2, N))
    sched = schedule(N, group_config(N, G))
    total = np.sum(np.stack(list(sched)), axis=0)
    assert np.array_equal(total, relative_matrix(N))
    for mat in sched:
        assert np.array_equal(mat, -mat.T)
        assert not np.any(np.diagonal(mat))


def test_record_sum_on_uneven_last_group():
    # (N-1) not divisible by (G-1): last group is smaller
    for N, G in [(11, 4), (12, 5), (128, 16)]:
        assert (N - 1) % (G - 1) != 0
        sched = schedule(N, group_config(N, G))
        total = np.sum(np.stack(list(sched)), axis=0)
        assert np.array_equal(total, relative_matrix(N))


def test_schedule_degenerates_to_exact():
    sched = schedule(5, group_config(5, 5))
    assert len(sched) == 1
    assert np.array_equal(sched[0], relative_matrix(5))


def test_absolute_schedule_first_vector_n9_g3():
    vecs = absolute_schedule(9, group_config(9, 3))
    assert list(vecs[0]) == [0, 1, 1, 1, 1, 2, 2, 2, 2]
    assert len(vecs) == 4


def test_absolute_schedule_sums():
    for N, G in [(9, 3), (10, 4), (17, 6), (8, 8)]:
        vecs = absolute_schedule(N, group_config(N, G))
        total = np.sum(np.stack(vecs), axis=0)
        assert np.array_equal(total, np.arange(N))
        assert all(v[0] == 0 for v in vecs)
