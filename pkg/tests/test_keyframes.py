import collections
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longdiff import (
    ValidationError,
    build_ifs_mask,
    detect_keyframes,
    frame_entropy,
    frame_sad,
    frame_scores,
    pool_channels,
    pseudo_video,
    quantize,
)


def test_pool_singleton_channel():
    F = np.arange(8, dtype=float).reshape(2, 1, 4)
    out = pool_channels(F)
    assert out.shape == (2, 3, 4)
    for c in range(3):
        assert np.array_equal(out[:, c, :], F[:, 0, :])


def test_pool_constant():
    out = pool_channels(np.full((3, 5, 7), 2.5))
    assert np.all(out == 2.5)


def test_pool_orders_max_mean_min():
    F = np.array([1.0, 2.0, 3.0]).reshape(1, 3, 1)
    out = pool_channels(F)
    assert out[0, :, 0].tolist() == [3.0, 2.0, 1.0]


def test_quantize_endpoints():
    out = quantize(np.array([[[0.0, 1.0]]]))
    assert out.tolist() == [[[0, 255]]]


def test_quantize_constant_is_zero():
    assert np.all(quantize(np.full((2, 3, 4), 9.25)) == 0)


def test_quantize_midpoint_rounds_up():
    out = quantize(np.array([[[0.0, 0.5, 1.0]]]))
    assert out.ravel().tolist() == [0, 128, 255]


def test_quantize_range_and_dtype():
    out = quantize(np.sin(np.arange(60)).reshape(5, 3, 4))
    assert np.issubdtype(out.dtype, np.integer)
    assert out.min() >= 0 and out.max() <= 255


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(-50.0, 50.0), st.integers(0, 2**32))
def test_quantize_affine_invariance(a, b, seed):
    from longdiff import standard_normals

    F = standard_normals(seed, 24).reshape(2, 3, 4)
    assert np.array_equal(quantize(F), quantize(a * F + b))


def test_entropy_constant_frame():
    assert frame_entropy(np.full((3, 50), 7, dtype=np.int64)) == 0.0


def test_entropy_two_equal_bins():
    frame = np.zeros((3, 256), dtype=np.int64)
    frame[:, 128:] = 255
    assert frame_entropy(frame) == 1.0


def test_entropy_full_coverage():
    frame = np.tile(np.arange(256, dtype=np.int64), (3, 1))
    assert frame_entropy(frame) == 8.0


def test_entropy_bounds_and_zero_iff_constant():
    rng = np.random.default_rng(0)
    for _ in range(20):
        frame = rng.integers(0, 256, size=(3, 37))
        h = frame_entropy(frame)
        assert 0.0 <= h <= 8.0
        lum = np.floor(frame.mean(axis=0) + 0.5)
        assert (h == 0.0) == (len(np.unique(lum)) == 1)


def test_sad_identical_frames():
    V = np.full((4, 3, 10), 3, dtype=np.int64)
    assert frame_sad(V, 2) == 0.0


def test_sad_first_frame_is_zero():
    rng = np.random.default_rng(1)
    V = rng.integers(0, 256, size=(3, 3, 8))
    assert frame_sad(V, 0) == 0.0


def test_sad_full_swing():
    V = np.zeros((2, 3, 16), dtype=np.int64)
    V[1] = 255
    assert frame_sad(V, 1) == 255.0
    assert frame_sad(V, 1, normalize=False) == 255.0 * 3 * 16


def test_sad_index_out_of_range():
    V = np.zeros((2, 3, 4), dtype=np.int64)
    with pytest.raises(ValidationError):
        frame_sad(V, 2)


def test_constant_video_ties_pick_shot_leaders():
    V = np.zeros((16, 3, 4), dtype=np.int64)
    assert detect_keyframes(V, 4, alpha=2.0) == [0, 4, 8, 12]


def test_every_frame_selected_when_n_equals_frames():
    rng = np.random.default_rng(2)
    V = rng.integers(0, 256, size=(6, 3, 9))
    assert detect_keyframes(V, 6, alpha=2.0) == list(range(6))


def test_single_busy_frame_wins():
    V = np.zeros((8, 3, 256), dtype=np.int64)
    V[5, :, 128:] = 255  # only frame 5 has non-constant luminance
    assert detect_keyframes(V, 1, alpha=2.0) == [5]


def _oracle_keys(V, n, alpha):
    N, _, hw = V.shape
    ent, sad = [], []
    for k in range(N):
        lum = [math.floor((int(V[k, 0, i]) + int(V[k, 1, i]) + int(V[k, 2, i])) / 3 + 0.5)
               for i in range(hw)]
        hist = collections.Counter(lum)
        ent.append(-sum(c / hw * math.log2(c / hw) for c in hist.values()))
        if k == 0:
            sad.append(0.0)
        else:
            tot = sum(abs(int(V[k, c, i]) - int(V[k - 1, c, i]))
                      for c in range(3) for i in range(hw))
            sad.append(tot / (3 * hw))
    score = [alpha * h + s for h, s in zip(ent, sad)]
    keys = []
    for s in range(n):
        lo, hi = s * N // n, (s + 1) * N // n
        best = lo
        for k in range(lo, hi):
            if score[k] > score[best]:
                best = k
        keys.append(best)
    return keys


def test_detect_matches_bruteforce_oracle():
    rng = np.random.default_rng(3)
    for _ in range(15):
        N = int(rng.integers(2, 24))
        hw = int(rng.integers(1, 40))
        n = int(rng.integers(1, N + 1))
        V = rng.integers(0, 256, size=(N, 3, hw))
        assert detect_keyframes(V, n, alpha=2.0) == _oracle_keys(V, n, 2.0)


def test_detect_rejects_bad_shot_count():
    V = np.zeros((4, 3, 4), dtype=np.int64)
    with pytest.raises(ValidationError):
        detect_keyframes(V, 5, alpha=2.0)
    with pytest.raises(ValidationError):
        detect_keyframes(V, 0, alpha=2.0)


def test_frame_scores_fields():
    rng = np.random.default_rng(4)
    V = rng.integers(0, 256, size=(5, 3, 8))
    scores = frame_scores(V, alpha=2.0)
    assert [s.index for s in scores] == list(range(5))
    for s in scores:
        assert s.score == 2.0 * s.entropy + s.sad
        assert 0.0 <= s.entropy <= 8.0
        assert s.sad >= 0.0


def test_mask_full_when_l_covers_everything():
    mask = build_ifs_mask(6, 5, [])
    assert np.all(mask.allowed)
    assert np.all(build_ifs_mask(6, 9, []).allowed)


def test_mask_enumeration_example():
    mask = build_ifs_mask(6, 1, [4])
    assert sorted(np.flatnonzero(mask.allowed[0])) == [0, 1, 4]
    assert np.all(mask.allowed[:, 4])
    assert np.all(np.diagonal(mask.allowed))


def test_mask_identity_when_empty():
    mask = build_ifs_mask(5, 0, [])
    assert np.array_equal(mask.allowed, np.eye(5, dtype=bool))


def test_mask_key_columns_break_symmetry():
    mask = build_ifs_mask(8, 1, [6]).allowed
    assert not np.array_equal(mask, mask.T)  # permitted, by design


def test_mask_rejects_out_of_range_keys():
    with pytest.raises(ValidationError):
        build_ifs_mask(5, 1, [5])
    with pytest.raises(ValidationError):
        build_ifs_mask(5, 1, [-1])


def test_pseudo_video_shape_and_range():
    from longdiff import synth_features

    F = synth_features(6, 5, 12, seed=9)
    V = pseudo_video(F)
    assert V.shape == (6, 3, 12)
    assert V.min() >= 0 and V.max() <= 255
    assert np.issubdtype(V.dtype, np.integer)
