"""Pure-numpy attention kernels (fallback backend).

Same contracts as ``longdiff._native``: float64 C-contiguous inputs, float64
outputs.  Reductions use numpy's deterministic pairwise summation, so results
are reproducible run-to-run on the same build.
"""
from __future__ import annotations

import numpy as np


def rotary_logits(q, k, pos, freqs, scale):
    """Logit matrix under rotary encoding.

    Rotates the first 2*len(freqs) components of each query row by
    ``pos[i, j] * freqs`` (paired-component rotation), dots with the key rows,
    adds the unrotated tail product, and scales.
    """
    h = freqs.shape[0]
    ang = pos[:, :, None] * freqs
    c = np.cos(ang)
    s = np.sin(ang)
    qe = q[:, 0 : 2 * h : 2]
    qo = q[:, 1 : 2 * h : 2]
    ke = k[:, 0 : 2 * h : 2]
    ko = k[:, 1 : 2 * h : 2]
    out = np.einsum("ijt,jt->ij", qe[:, None, :] * c - qo[:, None, :] * s, ke)
    out += np.einsum("ijt,jt->ij", qe[:, None, :] * s + qo[:, None, :] * c, ko)
    if 2 * h < q.shape[1]:
        out += q[:, 2 * h :] @ k[:, 2 * h :].T
    return out * scale


def bias_logits(q, k, bias, scale):
    """Scaled dot-product logits plus a precomputed additive bias matrix."""
    return (q @ k.T) * scale + bias


def masked_softmax(logits, allowed):
    """Row-wise softmax over the allowed entries; disallowed entries are 0.

    Every row must have at least one allowed entry (callers check).
    """
    ok = allowed.astype(bool)
    shielded = np.where(ok, logits, -np.inf)
    w = np.exp(shielded - shielded.max(axis=1, keepdims=True))
    return w / w.sum(axis=1, keepdims=True)


def matmul(a, b):
    """Attention-weight application, A @ V."""
    return a @ b
