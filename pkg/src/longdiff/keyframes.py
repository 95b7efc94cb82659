"""Pseudo-video construction, frame scoring, and the frame-selection mask.

Hidden states (N x C x hw) are pooled to three channels (max / mean / min
over C), quantized to integers in [0, 255], and treated as a stand-in video.
Each frame gets a score ``alpha * entropy + sad`` from its luminance-histogram
entropy (bits) and its mean absolute difference against the previous frame;
one top-scoring frame per uniform shot becomes a key frame.  The resulting
mask admits key j for query i when |i - j| <= L or j is a key frame.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class FrameScore:
    index: int
    entropy: float
    sad: float
    score: float


@dataclass(frozen=True)
class IFSMask:
    allowed: np.ndarray
    key_frames: tuple
    L: int


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def pool_channels(F: np.ndarray) -> np.ndarray:
    """Collapse the channel axis to (max, mean, min), shape (N, 3, hw)."""
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 3 or F.shape[1] < 1:
        raise ValidationError("features must be (N, C, hw) with C >= 1")
    return np.stack([F.max(axis=1), F.mean(axis=1), F.min(axis=1)], axis=1)


def quantize(Fp: np.ndarray) -> np.ndarray:
    """Affine-map to [0, 255] over the global range and round half away from
    zero.  A constant input (no range) maps to all zeros."""
    Fp = np.asarray(Fp, dtype=np.float64)
    if not np.all(np.isfinite(Fp)):
        raise ValidationError("values must be finite")
    lo, hi = Fp.min(), Fp.max()
    if hi == lo:
        return np.zeros(Fp.shape, dtype=np.int64)
    return _round_half_away((Fp - lo) / (hi - lo) * 255.0).astype(np.int64)


def pseudo_video(F: np.ndarray) -> np.ndarray:
    """Pooling + quantization in one step: (N, C, hw) -> int (N, 3, hw)."""
    return quantize(pool_channels(F))


def _check_video(V: np.ndarray) -> np.ndarray:
    V = np.asarray(V)
    if V.ndim != 3 or V.shape[1] != 3:
        raise ValidationError("pseudo-video must have shape (N, 3, hw)")
    if not np.issubdtype(V.dtype, np.integer):
        raise ValidationError("pseudo-video values must be integers")
    if V.min() < 0 or V.max() > 255:
        raise ValidationError("pseudo-video values must lie in [0, 255]")
    return V.astype(np.int64, copy=False)


def frame_entropy(frame: np.ndarray) -> float:
    """Shannon entropy (bits) of the frame's 256-bin luminance histogram.

    Luminance is the rounded mean of the three pooled channels.
    """
    frame = np.asarray(frame)
    if frame.ndim != 2 or frame.shape[0] != 3:
        raise ValidationError("frame must have shape (3, hw)")
    if frame.min() < 0 or frame.max() > 255:
        raise ValidationError("frame values must lie in [0, 255]")
    lum = _round_half_away(frame.mean(axis=0)).astype(np.int64)
    counts = np.bincount(lum, minlength=256)
    p = counts[counts > 0] / lum.size
    return float(-(p * np.log2(p)).sum())


def frame_sad(V: np.ndarray, k: int, normalize: bool = True) -> float:
    """Absolute difference against the previous frame; 0 for the first frame.

    Normalized (default) to a mean over the 3*hw positions so the score's
    entropy weighting is resolution-independent; ``normalize=False`` gives the
    raw sum.
    """
    V = _check_video(V)
    if not 0 <= k < V.shape[0]:
        raise ValidationError(f"frame index {k} out of range [0, {V.shape[0]})")
    if k == 0:
        return 0.0
    total = float(np.abs(V[k] - V[k - 1]).sum())
    return total / V[k].size if normalize else total


def frame_scores(V: np.ndarray, alpha: float, normalize_sad: bool = True) -> list:
    V = _check_video(V)
    scores = []
    for k in range(V.shape[0]):
        h = frame_entropy(V[k])
        s = frame_sad(V, k, normalize=normalize_sad)
        scores.append(FrameScore(index=k, entropy=h, sad=s, score=alpha * h + s))
    return scores


def detect_keyframes(V: np.ndarray, n: int, alpha: float,
                     normalize_sad: bool = True) -> list:
    """One key frame per uniform shot, by highest score (earliest on ties).

    Shot s covers frames [floor(s*N/n), floor((s+1)*N/n)).  Differencing uses
    each frame's true predecessor even across shot boundaries.
    """
    V = _check_video(V)
    N = V.shape[0]
    if not 1 <= n <= N:
        raise ValidationError(f"need 1 <= n <= N, got n={n}, N={N}")
    scores = np.asarray([s.score for s in frame_scores(V, alpha, normalize_sad)])
    keys = []
    for s in range(n):
        lo, hi = s * N // n, (s + 1) * N // n
        keys.append(lo + int(np.argmax(scores[lo:hi])))
    return keys


def build_ifs_mask(N: int, L: int, key_frames) -> IFSMask:
    """Admissibility mask: allow (i, j) when |i - j| <= L or j is a key frame."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    if L < 0:
        raise ValidationError("L must be >= 0")
    keys = sorted(set(int(k) for k in key_frames))
    if keys and not (0 <= keys[0] and keys[-1] < N):
        raise ValidationError(f"key frames must lie in [0, {N})")
    idx = np.arange(N)
    allowed = np.abs(idx[:, None] - idx[None, :]) <= L
    if keys:
        allowed[:, keys] = True
    return IFSMask(allowed=allowed, key_frames=tuple(keys), L=L)
