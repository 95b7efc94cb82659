"""Numeric checks of the two capacity results on arbitrary logit data.

The distinguishability check compares an empirical supremum of |logits|
against ``(g/2)**(1/(2r)) * eps/(4e)``, where g counts the position groups a
model must separate, r bounds the pseudo-dimension of the logit family, and
eps lower-bounds the intra-group distance.  Distances between two positions
are mean squared logit differences over paired (q, k) samples; the uniform
clustering probe takes the worst midpoint pair (p - 0.5, p + 0.5) across the
position range.

The dilution check verifies that the entropy of a softmax over bounded logits
never drops below ``ln N - 2B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attention import RPEKind, Rotary, rotate
from .errors import ValidationError


@dataclass(frozen=True)
class DistanceEstimate:
    p: float
    p_prime: float
    d: float
    sample_count: int


@dataclass(frozen=True)
class Theorem1Report:
    sup_logit: float
    epsilon_uni: float
    r: int
    g: int
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class EntropyReport:
    entropy: float
    bound: float
    B: float
    holds: bool


def _paired(q_samples, k_samples):
    q = np.asarray(q_samples, dtype=np.float64)
    k = np.asarray(k_samples, dtype=np.float64)
    if q.ndim == 1:
        q = q[None, :]
    if k.ndim == 1:
        k = k[None, :]
    if q.shape != k.shape or q.ndim != 2 or q.shape[0] < 1:
        raise ValidationError("need equally many q and k sample rows (>= 1)")
    return q, k


def _logit_samples(rpe: RPEKind, q: np.ndarray, k: np.ndarray, p: float) -> np.ndarray:
    d = q.shape[1]
    if isinstance(rpe, Rotary):
        return np.einsum("sd,sd->s", rotate(rpe, q, p), k) / math.sqrt(d)
    if p != int(p):
        raise ValidationError("additive-bias encoding accepts integer positions only")
    idx = int(np.clip(int(p), -rpe.max_distance, rpe.max_distance)) + rpe.max_distance
    return np.einsum("sd,sd->s", q, k) / math.sqrt(d) + rpe.table[idx]


def estimate_distance(rpe: RPEKind, q_samples, k_samples, p: float,
                      p_prime: float) -> DistanceEstimate:
    """Mean squared logit difference between positions p and p'."""
    q, k = _paired(q_samples, k_samples)
    diff = _logit_samples(rpe, q, k, p) - _logit_samples(rpe, q, k, p_prime)
    return DistanceEstimate(
        p=float(p), p_prime=float(p_prime),
        d=float(np.mean(diff * diff)), sample_count=q.shape[0],
    )


def epsilon_probe_kind(rpe: RPEKind) -> str:
    return "midpoint" if isinstance(rpe, Rotary) else "adjacent"


def epsilon_uniform(rpe: RPEKind, q_samples, k_samples, N: int) -> float:
    """Worst intra-group distance under uniform clustering.

    Rotary encodings accept fractional positions, so each position p is
    probed at its group midpoints (p - 0.5, p + 0.5).  Additive-bias tables
    are integer-indexed; adjacent pairs (p, p + 1) stand in instead, which
    callers flag in their reports.
    """
    if N < 2:
        raise ValidationError("N must be >= 2")
    q, k = _paired(q_samples, k_samples)
    if isinstance(rpe, Rotary):
        probes = [(p - 0.5, p + 0.5) for p in range(-(N - 1), N)]
    else:
        probes = [(p, p + 1) for p in range(-(N - 1), N - 1)]
    return max(estimate_distance(rpe, q, k, a, b).d for a, b in probes)


def sup_logit_estimate(rpe: RPEKind, q_samples, k_samples, N: int) -> float:
    """Largest |logit| over the samples and all integer positions in range.

    An empirical lower bound on the true supremum: it only sees the supplied
    sample pairs.
    """
    q, k = _paired(q_samples, k_samples)
    return max(
        float(np.max(np.abs(_logit_samples(rpe, q, k, p))))
        for p in range(-(N - 1), N)
    )


def pseudo_dimension_bound(rpe: RPEKind) -> int:
    """Capacity bound of the logit family over integer positions.

    A rotary head with k rotated dimensions is a span of k sinusoids in p,
    giving 2k; a bias table only translates one fixed function, giving 1.
    """
    if isinstance(rpe, Rotary):
        return 2 * rpe.rotary_dims
    return 1


def theorem1_check(sup_logit: float, g: int, r: int, epsilon: float) -> Theorem1Report:
    """Evaluate the distinguishability inequality at the given operating point."""
    if g < 1 or r < 1:
        raise ValidationError("g and r must be >= 1")
    if epsilon < 0:
        raise ValidationError("epsilon must be >= 0")
    rhs = (g / 2.0) ** (1.0 / (2.0 * r)) * epsilon / (4.0 * math.e)
    return Theorem1Report(
        sup_logit=float(sup_logit), epsilon_uni=float(epsilon),
        r=int(r), g=int(g), rhs=float(rhs),
        satisfied=bool(sup_logit >= rhs),
    )


def head_reports(heads, N: int) -> list:
    """Per-head distinguishability reports at g = 2N - 1."""
    if not heads:
        raise ValidationError("need at least one head")
    out = []
    for rpe, q_samples, k_samples in heads:
        sup = sup_logit_estimate(rpe, q_samples, k_samples, N)
        eps = epsilon_uniform(rpe, q_samples, k_samples, N)
        out.append(theorem1_check(sup, 2 * N - 1, pseudo_dimension_bound(rpe), eps))
    return out


def head_survey(heads, N: int) -> float:
    """Fraction of heads whose logit range satisfies the inequality."""
    reports = head_reports(heads, N)
    return sum(1 for r in reports if r.satisfied) / len(reports)


def entropy_check(logits) -> EntropyReport:
    """Softmax entropy (nats) against the ``ln N - 2B`` floor."""
    a = np.asarray(logits, dtype=np.float64).ravel()
    if a.size == 0:
        raise ValidationError("logit vector is empty")
    if not np.all(np.isfinite(a)):
        raise ValidationError("logits must be finite")
    w = np.exp(a - a.max())
    p = w / w.sum()
    nz = p[p > 0]
    entropy = float(-(nz * np.log(nz)).sum())
    B = float(np.max(np.abs(a)))
    bound = math.log(a.size) - 2.0 * B
    return EntropyReport(entropy=entropy, bound=bound, B=B,
                         holds=bool(entropy >= bound - 1e-9))


def synthetic_head_suite(num_heads: int = 8, head_dim: int = 64,
                         rotary_dims: int = 32, samples: int = 32,
                         seed: int = 3) -> list:
    """Reproducible rotary heads with geometrically growing feature scales.

    Larger scales inflate the squared-distance side faster than the logit
    supremum, so the suite spans both outcomes of the inequality.
    """
    from .tensorio import derive_seed, standard_normals

    rpe = Rotary(head_dim=head_dim, rotary_dims=rotary_dims)
    suite = []
    for h in range(num_heads):
        scale = 2.0 ** h
        q = standard_normals(derive_seed(seed, 11, h, 0), samples * head_dim)
        k = standard_normals(derive_seed(seed, 11, h, 1), samples * head_dim)
        suite.append((
            rpe,
            scale * q.reshape(samples, head_dim),
            scale * k.reshape(samples, head_dim),
        ))
    return suite
