"""Dense-tensor file I/O, reproducible synthetic data, and the run config.

Tensor file format ("LDT1")
---------------------------
Little-endian throughout::

    bytes 0..3   magic "LDT1"
    bytes 4..7   u32 ndim
    next 8*ndim  u64 extents, outermost first
    rest         float64 payload, row-major (C order)

Payload values must be finite.  A file whose payload length does not equal
``product(dims) * 8`` is corrupt.

Random stream
-------------
All synthetic data comes from one fixed, counter-based generator so that any
implementation of the same recipe reproduces identical values:

* word ``i`` (i = 0, 1, ...) of the raw stream is
  ``mix64((seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64)`` where ``mix64``
  is the SplitMix64 finalizer
  (``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31``, all mod 2**64);
* normal variates come from Box-Muller over consecutive word pairs
  (x0, x1): ``u1 = ((x0 >> 11) + 1) * 2**-53`` (in (0, 1]),
  ``u2 = (x1 >> 11) * 2**-53`` (in [0, 1)), ``r = sqrt(-2 ln u1)``, and the
  pair yields ``r*cos(2*pi*u2)`` then ``r*sin(2*pi*u2)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .attention import RPEKind, rpe_from_dict, rpe_to_dict
from .errors import (
    BadMagicError,
    NonFinitePayloadError,
    TensorFormatError,
    TruncatedPayloadError,
    ValidationError,
)

MAGIC = b"LDT1"
_U64_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)

# The on-disk Tensor type is simply a float64 ndarray with finite values.
Tensor = np.ndarray


def write_tensor(t: np.ndarray, path) -> None:
    """Write ``t`` as an LDT1 file.  Bit-exact round-trip with read_tensor."""
    arr = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("tensor values must be finite (no NaN/Inf)")
    header = MAGIC + np.uint32(arr.ndim).tobytes()
    dims = np.asarray(arr.shape, dtype="<u8").tobytes()
    payload = np.ascontiguousarray(arr, dtype="<f8").tobytes()
    Path(path).write_bytes(header + dims + payload)


def read_tensor(path) -> np.ndarray:
    """Read an LDT1 file back into a float64 array."""
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise BadMagicError(f"{path}: not an LDT1 tensor file")
    ndim = int(np.frombuffer(raw, dtype="<u4", count=1, offset=4)[0])
    if ndim > 64:
        raise TensorFormatError(f"{path}: implausible rank {ndim}")
    if len(raw) < 8 + 8 * ndim:
        raise TruncatedPayloadError(f"{path}: header cut short")
    dims = np.frombuffer(raw, dtype="<u8", count=ndim, offset=8)
    count = 1
    for d in dims:
        count *= int(d)
    body = raw[8 + 8 * ndim :]
    if len(body) < 8 * count:
        raise TruncatedPayloadError(
            f"{path}: payload holds {len(body)} bytes, expected {8 * count}"
        )
    if len(body) > 8 * count:
        raise TensorFormatError(f"{path}: trailing bytes after payload")
    data = np.frombuffer(body, dtype="<f8").astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise NonFinitePayloadError(f"{path}: payload contains NaN/Inf")
    return data.reshape([int(d) for d in dims])


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _MIX_A
    z = z ^ (z >> np.uint64(27))
    z = z * _MIX_B
    return z ^ (z >> np.uint64(31))


def raw_stream(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Words ``start .. start+count-1`` of the counter-based uint64 stream."""
    with np.errstate(over="ignore"):
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        return _mix64(np.uint64(int(seed) & _U64_MASK) + idx * _GOLDEN)


def standard_normals(seed: int, count: int) -> np.ndarray:
    """First ``count`` Box-Muller normals of the seeded stream."""
    if count < 0:
        raise ValidationError("count must be non-negative")
    pairs = (count + 1) // 2
    bits = raw_stream(seed, 2 * pairs)
    u1 = ((bits[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (bits[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * pairs, dtype=np.float64)
    out[0::2] = r * np.cos(2.0 * np.pi * u2)
    out[1::2] = r * np.sin(2.0 * np.pi * u2)
    return out[:count]


def derive_seed(seed: int, *parts: int) -> int:
    """Fold integer tags into a seed; used to split one run seed per layer/role."""
    with np.errstate(over="ignore"):
        s = _mix64(np.uint64(int(seed) & _U64_MASK) + _GOLDEN)
        for p in parts:
            s = _mix64((s ^ np.uint64(int(p) & _U64_MASK)) + _GOLDEN)
    return int(s)


def synth_features(N: int, C: int, hw: int, seed: int) -> np.ndarray:
    """Deterministic standard-normal feature block of shape (N, C, hw)."""
    if N < 1 or C < 1 or hw < 1:
        raise ValidationError("synth_features extents must be >= 1")
    return standard_normals(seed, N * C * hw).reshape(N, C, hw)


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters of one run.

    ``N`` frame count, ``G`` position-group count, ``L`` neighbor range,
    ``n`` key-frame count, ``alpha`` entropy weight in the frame score,
    ``replace_fraction`` share of layers running the long-video attention
    path, ``seed`` for all derived randomness, ``rpe`` the logit encoding.
    """

    N: int
    G: int
    L: int
    n: int
    alpha: float
    replace_fraction: float
    seed: int
    rpe: RPEKind

    def validate(self) -> "RunConfig":
        if not 2 <= self.G <= self.N:
            raise ValidationError(f"need 2 <= G <= N, got G={self.G}, N={self.N}")
        if not 0 <= self.L < self.N:
            raise ValidationError(f"need 0 <= L < N, got L={self.L}, N={self.N}")
        if not 0 <= self.n <= self.N:
            raise ValidationError(f"need 0 <= n <= N, got n={self.n}, N={self.N}")
        if self.alpha < 0:
            raise ValidationError("alpha must be >= 0")
        if not 0.0 <= self.replace_fraction <= 1.0:
            raise ValidationError("replace_fraction must lie in [0, 1]")
        return self

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "G": self.G,
            "L": self.L,
            "n": self.n,
            "alpha": self.alpha,
            "replace_fraction": self.replace_fraction,
            "seed": self.seed,
            "rpe": rpe_to_dict(self.rpe),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        try:
            cfg = cls(
                N=int(doc["N"]),
                G=int(doc["G"]),
                L=int(doc["L"]),
                n=int(doc["n"]),
                alpha=float(doc["alpha"]),
                replace_fraction=float(doc["replace_fraction"]),
                seed=int(doc["seed"]),
                rpe=rpe_from_dict(doc["rpe"]),
            )
        except KeyError as exc:
            raise ValidationError(f"run config missing field {exc}") from exc
        return cfg.validate()


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return RunConfig.from_dict(doc)


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
