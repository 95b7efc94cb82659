"""Relative-position matrices and the group/shift schedule.

A position matrix is an N x N int64 array whose (i, j) entry is a (possibly
grouped or shifted) relative position of query frame i w.r.t. key frame j.
Valid matrices are anti-symmetric with a zero diagonal.

Grouping maps the 2N-1 raw relative positions onto 2G-1 group indices; each
group spans S = ceil((N-1)/(G-1)) consecutive positions (the last one may be
smaller).  Applying M = S-1 downward shifts to the grouped matrix gives every
entry a length-(M+1) "assignment record" whose sum recovers the original
relative position exactly; the schedule is that list of M+1 matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

PositionMatrix = np.ndarray


@dataclass(frozen=True)
class GroupConfig:
    N: int
    G: int
    S: int
    M: int


@dataclass(frozen=True)
class PositionSchedule:
    matrices: tuple

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, m: int) -> np.ndarray:
        return self.matrices[m]

    def record(self, i: int, j: int) -> list:
        """Assignment record of entry (i, j): its position in each matrix."""
        return [int(mat[i, j]) for mat in self.matrices]


def group_config(N: int, G: int) -> GroupConfig:
    if N < 2:
        raise ValidationError(f"need N >= 2 to form groups, got N={N}")
    if not 2 <= G <= N:
        raise ValidationError(f"need 2 <= G <= N, got G={G}, N={N}")
    S = -((N - 1) // -(G - 1))  # ceil((N-1)/(G-1))
    return GroupConfig(N=N, G=G, S=S, M=S - 1)


def _group_values(p, S: int):
    p = np.asarray(p, dtype=np.int64)
    # ceil(p/S) for p >= 0, floor(p/S) for p < 0: both via floor division
    return np.where(p >= 0, (p + S - 1) // S, p // S)


def group_position(p: int, cfg: GroupConfig) -> int:
    """Group index of relative position ``p``; odd symmetric around 0."""
    if abs(p) > cfg.N - 1:
        raise ValidationError(f"|p| must be <= N-1, got p={p}, N={cfg.N}")
    return int(_group_values(p, cfg.S))


def relative_matrix(N: int) -> PositionMatrix:
    """Exact relative positions: entry (i, j) = i - j."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    idx = np.arange(N, dtype=np.int64)
    return idx[:, None] - idx[None, :]


def grouped_matrix(N: int, cfg: GroupConfig) -> PositionMatrix:
    """Elementwise grouping of the exact relative matrix (shift index 0)."""
    if cfg.N != N:
        raise ValidationError(f"config built for N={cfg.N}, called with N={N}")
    return _group_values(relative_matrix(N), cfg.S)


def _check_valid(mat: np.ndarray, what: str) -> np.ndarray:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"{what}: position matrix must be square")
    if not np.issubdtype(mat.dtype, np.integer):
        raise ValidationError(f"{what}: position matrix must be integer")
    if np.any(np.diagonal(mat) != 0):
        raise ValidationError(f"{what}: diagonal must be zero")
    if np.any(mat != -mat.T):
        raise ValidationError(f"{what}: matrix must be anti-symmetric")
    return mat.astype(np.int64, copy=False)


def shift(mat: PositionMatrix) -> PositionMatrix:
    """One shift step.

    Entry (i, j) takes the value of (i, j-1) above the diagonal, (i-1, j)
    below it, and stays 0 on it.  Sources that land on the diagonal carry its
    zero, so the triangles fill with zeros from the border inward.  The upper
    triangle is produced by its own branch, not by mirroring the lower one;
    anti-symmetry of the result is verified afterwards.
    """
    mat = _check_valid(mat, "shift input")
    n = mat.shape[0]
    right = np.zeros_like(mat)
    right[:, 1:] = mat[:, :-1]
    down = np.zeros_like(mat)
    down[1:, :] = mat[:-1, :]
    rows, cols = np.indices((n, n))
    out = np.where(rows < cols, right, np.where(rows > cols, down, 0))
    if np.any(out != -out.T):
        raise ValidationError("shift broke anti-symmetry")
    return out


def schedule(N: int, cfg: GroupConfig) -> PositionSchedule:
    """The M+1 position matrices: grouped matrix followed by its M shifts."""
    mats = [grouped_matrix(N, cfg)]
    for _ in range(cfg.M):
        mats.append(shift(mats[-1]))
    return PositionSchedule(matrices=tuple(mats))


def absolute_schedule(N: int, cfg: GroupConfig) -> list:
    """Group/shift applied to absolute frame positions 0..N-1.

    Vector 0 groups each absolute position with the non-negative branch;
    every following vector is the previous one shifted down with a zero in
    front.  Per-position record sums recover the absolute index.
    """
    if cfg.N != N:
        raise ValidationError(f"config built for N={cfg.N}, called with N={N}")
    vec = _group_values(np.arange(N, dtype=np.int64), cfg.S)
    vectors = [vec]
    for _ in range(cfg.M):
        prev = vectors[-1]
        nxt = np.zeros_like(prev)
        nxt[1:] = prev[:-1]
        vectors.append(nxt)
    return vectors
