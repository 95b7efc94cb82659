"""Temporal attention under pluggable relative-position encodings.

Logits for query i and key j depend on the vectors and on the (i, j) entry of
a position matrix, which may hold exact, grouped/shifted, clipped, or
interpolated relative positions.  ``longdiff_attention`` evaluates one softmax
attention per matrix of a shift schedule and averages them; an admissibility
mask restricts each query row to its allowed key columns.

Two mask semantics exist.  The default ("renormalize") excludes disallowed
columns before the softmax, so every row stays a probability distribution
over its allowed keys.  "literal_zero" zeroes disallowed columns after an
unmasked softmax and does not renormalize; rows then sum to at most 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels
from .errors import ValidationError
from .parallel import map_ordered

MASK_MODES = ("renormalize", "literal_zero")


@dataclass(frozen=True)
class Rotary:
    """Rotary encoding: the first ``rotary_dims`` query components are rotated
    pairwise by angles ``p * base**(-2t/rotary_dims)``."""

    head_dim: int
    rotary_dims: int
    base: float = 10000.0

    def __post_init__(self):
        if self.head_dim % 2 or self.rotary_dims % 2:
            raise ValidationError("head_dim and rotary_dims must be even")
        if not 2 <= self.rotary_dims <= self.head_dim:
            raise ValidationError("need 2 <= rotary_dims <= head_dim")
        if self.base <= 0:
            raise ValidationError("base must be positive")

    @property
    def freqs(self) -> np.ndarray:
        t = np.arange(self.rotary_dims // 2, dtype=np.float64)
        return self.base ** (-2.0 * t / self.rotary_dims)


@dataclass(frozen=True)
class AdditiveBias:
    """Learned-bias-style encoding: a per-position scalar added to the scaled
    dot product, with positions clipped to [-max_distance, max_distance]."""

    max_distance: int
    bias_table: tuple

    def __post_init__(self):
        if self.max_distance < 0:
            raise ValidationError("max_distance must be >= 0")
        if len(self.bias_table) != 2 * self.max_distance + 1:
            raise ValidationError(
                f"bias_table must have 2*max_distance+1 = "
                f"{2 * self.max_distance + 1} entries, got {len(self.bias_table)}"
            )
        object.__setattr__(self, "bias_table", tuple(float(v) for v in self.bias_table))

    @property
    def table(self) -> np.ndarray:
        return np.asarray(self.bias_table, dtype=np.float64)


RPEKind = Union[Rotary, AdditiveBias]


def rpe_to_dict(rpe: RPEKind) -> dict:
    if isinstance(rpe, Rotary):
        return {
            "kind": "rotary",
            "head_dim": rpe.head_dim,
            "rotary_dims": rpe.rotary_dims,
            "base": rpe.base,
        }
    if isinstance(rpe, AdditiveBias):
        return {
            "kind": "additive_bias",
            "max_distance": rpe.max_distance,
            "bias_table": list(rpe.bias_table),
        }
    raise ValidationError(f"unknown encoding object {rpe!r}")


def rpe_from_dict(doc: dict) -> RPEKind:
    try:
        kind = doc["kind"]
        if kind == "rotary":
            return Rotary(
                head_dim=int(doc["head_dim"]),
                rotary_dims=int(doc["rotary_dims"]),
                base=float(doc.get("base", 10000.0)),
            )
        if kind == "additive_bias":
            return AdditiveBias(
                max_distance=int(doc["max_distance"]),
                bias_table=tuple(doc["bias_table"]),
            )
    except KeyError as exc:
        raise ValidationError(f"encoding descriptor missing field {exc}") from exc
    raise ValidationError(f"unknown encoding kind {doc.get('kind')!r}")


@dataclass
class AttentionResult:
    averaged_attention: np.ndarray
    output: np.ndarray
    per_shift_attention: Optional[list] = None


def rotate(rpe: Rotary, x: np.ndarray, p: float) -> np.ndarray:
    """Rotate the rotary components of each row of ``x`` by position ``p``."""
    x = np.asarray(x, dtype=np.float64)
    ang = p * rpe.freqs
    c, s = np.cos(ang), np.sin(ang)
    out = x.copy()
    ev = x[..., 0 : rpe.rotary_dims : 2]
    od = x[..., 1 : rpe.rotary_dims : 2]
    out[..., 0 : rpe.rotary_dims : 2] = ev * c - od * s
    out[..., 1 : rpe.rotary_dims : 2] = ev * s + od * c
    return out


def _check_vec(rpe: RPEKind, v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if isinstance(rpe, Rotary) and v.shape[-1] != rpe.head_dim:
        raise ValidationError(
            f"{name} has dimension {v.shape[-1]}, encoding expects {rpe.head_dim}"
        )
    return v


def logit(rpe: RPEKind, q: np.ndarray, k: np.ndarray, p: float) -> float:
    """Attention logit for one query/key pair at relative position ``p``."""
    q = _check_vec(rpe, q, "q")
    k = _check_vec(rpe, k, "k")
    if q.shape != k.shape:
        raise ValidationError(f"q/k dimension mismatch: {q.shape} vs {k.shape}")
    d = q.shape[-1]
    if isinstance(rpe, Rotary):
        return float(np.dot(rotate(rpe, q, p), k) / math.sqrt(d))
    if p != int(p):
        raise ValidationError("additive-bias encoding accepts integer positions only")
    idx = int(np.clip(int(p), -rpe.max_distance, rpe.max_distance)) + rpe.max_distance
    return float(np.dot(q, k) / math.sqrt(d) + rpe.table[idx])


def logit_absolute(rpe: Rotary, q: np.ndarray, k: np.ndarray, i: float, j: float) -> float:
    """Rotary logit evaluated by rotating q to position i and k to position j.

    Agrees with ``logit(rpe, q, k, i - j)`` up to roundoff: rotations compose,
    so only the offset i - j matters.
    """
    if not isinstance(rpe, Rotary):
        raise ValidationError("absolute-position evaluation only applies to rotary")
    q = _check_vec(rpe, q, "q")
    k = _check_vec(rpe, k, "k")
    d = q.shape[-1]
    return float(np.dot(rotate(rpe, q, i), rotate(rpe, k, j)) / math.sqrt(d))


def logit_matrix(rpe: RPEKind, Q: np.ndarray, K: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Full logit matrix: entry (i, j) = logit(rpe, Q[i], K[j], positions[i, j])."""
    Q = np.ascontiguousarray(_check_vec(rpe, Q, "Q"))
    K = np.ascontiguousarray(_check_vec(rpe, K, "K"))
    if Q.ndim != 2 or K.ndim != 2 or Q.shape[1] != K.shape[1]:
        raise ValidationError("Q and K must be 2-D with equal feature dimension")
    positions = np.asarray(positions)
    if positions.shape != (Q.shape[0], K.shape[0]):
        raise ValidationError(
            f"positions shape {positions.shape} does not match "
            f"({Q.shape[0]}, {K.shape[0]})"
        )
    d = Q.shape[1]
    scale = 1.0 / math.sqrt(d)
    kern = _kernels.active()
    if isinstance(rpe, Rotary):
        pos = np.ascontiguousarray(positions, dtype=np.float64)
        return kern.rotary_logits(Q, K, pos, rpe.freqs, scale)
    if np.issubdtype(positions.dtype, np.floating):
        if np.any(positions != np.trunc(positions)):
            raise ValidationError(
                "additive-bias encoding accepts integer positions only "
                "(interpolated positions need a rotary encoding)"
            )
        positions = positions.astype(np.int64)
    idx = np.clip(positions, -rpe.max_distance, rpe.max_distance) + rpe.max_distance
    bias = np.ascontiguousarray(rpe.table[idx])
    return kern.bias_logits(Q, K, bias, scale)


def _allowed_matrix(mask, nq: int, nk: int) -> np.ndarray:
    if mask is None:
        allowed = np.ones((nq, nk), dtype=np.uint8)
    else:
        allowed = np.ascontiguousarray(
            getattr(mask, "allowed", mask), dtype=np.uint8
        )
    if allowed.shape != (nq, nk):
        raise ValidationError(f"mask shape {allowed.shape} does not match ({nq}, {nk})")
    starved = np.flatnonzero(allowed.sum(axis=1) == 0)
    if starved.size:
        raise ValidationError(f"mask leaves row {int(starved[0])} with no allowed columns")
    return allowed


def _soft(logits: np.ndarray, allowed: np.ndarray, mask_mode: str) -> np.ndarray:
    kern = _kernels.active()
    if mask_mode == "renormalize":
        return kern.masked_softmax(logits, allowed)
    full = kern.masked_softmax(logits, np.ones_like(allowed))
    return full * allowed


def attention_single(Q, K, V, positions, mask=None, rpe: RPEKind = None,
                     mask_mode: str = "renormalize"):
    """Softmax attention for one position matrix; returns (weights, output)."""
    if rpe is None:
        raise ValidationError("an encoding (rpe) is required")
    if mask_mode not in MASK_MODES:
        raise ValidationError(f"mask_mode must be one of {MASK_MODES}")
    V = np.ascontiguousarray(np.asarray(V, dtype=np.float64))
    logits = logit_matrix(rpe, Q, K, positions)
    if V.shape[0] != logits.shape[1]:
        raise ValidationError("V row count must match the number of keys")
    allowed = _allowed_matrix(mask, logits.shape[0], logits.shape[1])
    A = _soft(logits, allowed, mask_mode)
    return A, _kernels.active().matmul(A, V)


def longdiff_attention(Q, K, V, sched, mask=None, rpe: RPEKind = None,
                       mask_mode: str = "renormalize",
                       keep_per_shift: bool = False) -> AttentionResult:
    """Average the softmax attentions over every matrix of a shift schedule.

    The per-matrix attentions may be computed on worker threads; the average
    always accumulates in ascending shift order, and the value product uses
    the averaged weights (equivalent to averaging per-shift outputs).
    """
    if rpe is None:
        raise ValidationError("an encoding (rpe) is required")
    if mask_mode not in MASK_MODES:
        raise ValidationError(f"mask_mode must be one of {MASK_MODES}")
    mats = list(getattr(sched, "matrices", sched))
    if not mats:
        raise ValidationError("schedule holds no position matrices")
    Q2 = np.ascontiguousarray(_check_vec(rpe, Q, "Q"))
    K2 = np.ascontiguousarray(_check_vec(rpe, K, "K"))
    V2 = np.ascontiguousarray(np.asarray(V, dtype=np.float64))
    if V2.shape[0] != K2.shape[0]:
        raise ValidationError("V row count must match the number of keys")
    allowed = _allowed_matrix(mask, Q2.shape[0], K2.shape[0])

    def one(positions):
        return _soft(logit_matrix(rpe, Q2, K2, positions), allowed, mask_mode)

    per_shift = map_ordered(one, mats)
    acc = per_shift[0].copy()
    for A_m in per_shift[1:]:
        acc += A_m
    averaged = acc / float(len(per_shift))
    out = _kernels.active().matmul(averaged, V2)
    return AttentionResult(
        averaged_attention=averaged,
        output=out,
        per_shift_attention=per_shift if keep_per_shift else None,
    )


def clip_positions(mat: np.ndarray, p_max: int) -> np.ndarray:
    """Clamp relative positions to [-p_max, p_max]; anti-symmetry survives."""
    if p_max < 0:
        raise ValidationError("p_max must be >= 0")
    return np.clip(np.asarray(mat), -p_max, p_max)


def interpolate_positions(mat: np.ndarray, pretrain_max: int) -> np.ndarray:
    """Linearly rescale positions so the extreme ones land on +-pretrain_max.

    Produces fractional positions, which only the rotary encoding accepts.
    """
    if pretrain_max < 1:
        raise ValidationError("pretrain_max must be >= 1")
    mat = np.asarray(mat, dtype=np.float64)
    n = mat.shape[0]
    if n <= 1:
        return np.zeros_like(mat)
    return mat * (float(pretrain_max) / float(n - 1))
