"""Mock temporal-attention stack used as the end-to-end driver.

A stack of ``total_layers`` attention layers processes the (N, C, hw) hidden
states.  Layers picked by the plan run the grouped/shifted schedule with a
freshly detected frame-selection mask; the rest run plain attention on exact
relative positions.  Q/K/V/output projections are random but fixed by
(seed, layer, role), so a run is a pure function of (config, features,
total_layers).

Wall-clock numbers are collected per layer for the stats CSV only; the JSON
report leaves them out so identical runs serialize to identical bytes.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .attention import AttentionResult, Rotary, attention_single, longdiff_attention
from .errors import ValidationError
from .keyframes import build_ifs_mask, detect_keyframes, pseudo_video
from .positions import group_config, relative_matrix, schedule
from .tensorio import RunConfig, derive_seed, standard_normals, write_tensor


@dataclass(frozen=True)
class LayerPlan:
    total_layers: int
    longdiff_layers: tuple


@dataclass
class LayerRecord:
    layer: int
    is_longdiff: bool
    mean_row_entropy: float
    min_weight: float
    max_weight: float
    key_frames: Optional[tuple]
    elapsed_ms: Optional[float]


@dataclass
class RunReport:
    config: RunConfig
    total_layers: int
    layers: list

    def to_dict(self, include_timing: bool = False) -> dict:
        layers = []
        for rec in self.layers:
            doc = {
                "layer": rec.layer,
                "is_longdiff": rec.is_longdiff,
                "mean_row_entropy_nats": rec.mean_row_entropy,
                "min_weight": rec.min_weight,
                "max_weight": rec.max_weight,
                "key_frames": list(rec.key_frames) if rec.key_frames is not None else None,
            }
            if include_timing:
                doc["elapsed_ms"] = rec.elapsed_ms
            layers.append(doc)
        return {
            "config": self.config.to_dict(),
            "total_layers": self.total_layers,
            "layers": layers,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        layers = [
            LayerRecord(
                layer=int(l["layer"]),
                is_longdiff=bool(l["is_longdiff"]),
                mean_row_entropy=float(l["mean_row_entropy_nats"]),
                min_weight=float(l["min_weight"]),
                max_weight=float(l["max_weight"]),
                key_frames=tuple(l["key_frames"]) if l.get("key_frames") is not None else None,
                elapsed_ms=l.get("elapsed_ms"),
            )
            for l in doc["layers"]
        ]
        return cls(config=RunConfig.from_dict(doc["config"]),
                   total_layers=int(doc["total_layers"]), layers=layers)


def plan_layers(total: int, replace_fraction: float) -> LayerPlan:
    """Evenly spaced layer selection: round(fraction * total) layers starting
    at index 0."""
    if total < 1:
        raise ValidationError("total must be >= 1")
    if not 0.0 <= replace_fraction <= 1.0:
        raise ValidationError("replace_fraction must lie in [0, 1]")
    count = int(math.floor(replace_fraction * total + 0.5))
    chosen = tuple(i * total // count for i in range(count))
    return LayerPlan(total_layers=total, longdiff_layers=chosen)


def _projection(seed: int, layer: int, role: int, fan_in: int, fan_out: int) -> np.ndarray:
    w = standard_normals(derive_seed(seed, 101, layer, role), fan_in * fan_out)
    return w.reshape(fan_in, fan_out) / math.sqrt(fan_in)


def _row_entropy_mean(A: np.ndarray) -> float:
    masked = np.where(A > 0, A, 1.0)  # 0 * ln 0 = 0
    return float(np.mean(-(A * np.log(masked)).sum(axis=1)))


def run_pipeline(cfg: RunConfig, features: np.ndarray, total_layers: int = 16,
                 head_dim: Optional[int] = None,
                 dump_dir=None) -> "tuple[RunReport, np.ndarray]":
    """Run the stack; returns the report and the final (N, C, hw) hidden states.

    ``head_dim`` defaults to the rotary head width (or 64 for bias encodings).
    With ``dump_dir`` set, per-layer averaged attention (and each longdiff
    layer's mask) is written as tensors.
    """
    cfg.validate()
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise ValidationError("features must have shape (N, C, hw)")
    N, C, hw = features.shape
    if N != cfg.N:
        raise ValidationError(f"features have {N} frames, config says {cfg.N}")
    if head_dim is None:
        head_dim = cfg.rpe.head_dim if isinstance(cfg.rpe, Rotary) else 64

    plan = plan_layers(total_layers, cfg.replace_fraction)
    longdiff_set = set(plan.longdiff_layers)
    sched = schedule(N, group_config(N, cfg.G))
    exact = relative_matrix(N)
    fan_in = C * hw

    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)

    X = features.reshape(N, fan_in)
    records = []
    for layer in range(total_layers):
        t0 = time.perf_counter()
        Wq = _projection(cfg.seed, layer, 1, fan_in, head_dim)
        Wk = _projection(cfg.seed, layer, 2, fan_in, head_dim)
        Wv = _projection(cfg.seed, layer, 3, fan_in, head_dim)
        Wo = _projection(cfg.seed, layer, 4, head_dim, fan_in)
        Q, K, V = X @ Wq, X @ Wk, X @ Wv

        keys = None
        if layer in longdiff_set:
            video = pseudo_video(X.reshape(N, C, hw))
            keys = tuple(detect_keyframes(video, cfg.n, cfg.alpha)) if cfg.n else ()
            mask = build_ifs_mask(N, cfg.L, keys)
            res = longdiff_attention(Q, K, V, sched, mask, rpe=cfg.rpe)
        else:
            A, O = attention_single(Q, K, V, exact, None, rpe=cfg.rpe)
            res = AttentionResult(averaged_attention=A, output=O)

        X = X + res.output @ Wo
        elapsed = (time.perf_counter() - t0) * 1e3
        records.append(LayerRecord(
            layer=layer,
            is_longdiff=layer in longdiff_set,
            mean_row_entropy=_row_entropy_mean(res.averaged_attention),
            min_weight=float(res.averaged_attention.min()),
            max_weight=float(res.averaged_attention.max()),
            key_frames=keys,
            elapsed_ms=elapsed,
        ))
        if dump_dir is not None:
            write_tensor(res.averaged_attention, dump_dir / f"layer_{layer:02d}_attention.ldt")
            if keys is not None:
                write_tensor(mask.allowed.astype(np.float64), dump_dir / f"layer_{layer:02d}_mask.ldt")

    report = RunReport(config=cfg, total_layers=total_layers, layers=records)
    return report, X.reshape(N, C, hw)


STATS_HEADER = ["layer", "is_longdiff", "mean_row_entropy_nats",
                "min_weight", "max_weight", "key_frames", "elapsed_ms"]


def emit_stats(report: RunReport, path) -> None:
    """One CSV row per layer; key frames are semicolon-joined."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_HEADER)
        for rec in report.layers:
            writer.writerow([
                rec.layer,
                "true" if rec.is_longdiff else "false",
                repr(rec.mean_row_entropy),
                repr(rec.min_weight),
                repr(rec.max_weight),
                ";".join(str(k) for k in rec.key_frames) if rec.key_frames else "",
                "" if rec.elapsed_ms is None else f"{rec.elapsed_ms:.3f}",
            ])
