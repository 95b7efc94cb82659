"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad arguments or contract
violations), 2 I/O or file-format error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels, analysis, attention, keyframes, pipeline, positions, tensorio
from .errors import LongDiffError, ValidationError


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; bad arguments are validation errors
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _common(sub, out_help: str, out_required: bool = True):
    sub.add_argument("--config", help="run config JSON")
    sub.add_argument("--seed", type=int, help="seed override")
    sub.add_argument("--out", required=out_required, help=out_help)


def _load_cfg(args) -> tensorio.RunConfig:
    if not args.config:
        raise ValidationError("this command needs --config")
    cfg = tensorio.load_config(args.config)
    if args.seed is not None:
        cfg = tensorio.RunConfig(**{**cfg.to_dict(), "seed": args.seed,
                                    "rpe": cfg.rpe}).validate()
    return cfg


def _write_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _cmd_gen_features(args) -> int:
    seed = args.seed if args.seed is not None else 0
    t = tensorio.synth_features(args.n, args.c, args.hw, seed)
    tensorio.write_tensor(t, args.out)
    print(f"wrote {args.out} dims {list(t.shape)}")
    return 0


def _cmd_position_map(args) -> int:
    cfg = positions.group_config(args.n, args.g)
    sched = positions.schedule(args.n, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for m, mat in enumerate(sched):
        tensorio.write_tensor(mat.astype(np.float64), out / f"positions_{m:03d}.ldt")
    print(f"N={args.n} G={args.g} S={cfg.S} M={cfg.M}: "
          f"wrote {len(sched)} matrices to {out}")
    return 0


def _cmd_attend(args) -> int:
    cfg = _load_cfg(args)
    Q = tensorio.read_tensor(args.q)
    K = tensorio.read_tensor(args.k)
    V = tensorio.read_tensor(args.v)
    if Q.ndim != 2 or Q.shape[0] != cfg.N:
        raise ValidationError(f"q must be ({cfg.N}, d), got {list(Q.shape)}")
    mask = None
    if args.mask:
        raw = tensorio.read_tensor(args.mask)
        if not np.all((raw == 0) | (raw == 1)):
            raise ValidationError("mask tensor must hold only 0/1 values")
        mask = raw.astype(bool)
    sched = positions.schedule(cfg.N, positions.group_config(cfg.N, cfg.G))
    res = attention.longdiff_attention(Q, K, V, sched, mask, rpe=cfg.rpe,
                                       mask_mode=args.mask_mode)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tensorio.write_tensor(res.averaged_attention, out / "averaged_attention.ldt")
    tensorio.write_tensor(res.output, out / "output.ldt")
    print(f"wrote averaged_attention.ldt and output.ldt to {out}")
    return 0


def _cmd_keyframes(args) -> int:
    F = tensorio.read_tensor(args.features)
    video = keyframes.pseudo_video(F)
    scores = keyframes.frame_scores(video, args.alpha, normalize_sad=not args.raw_sad)
    keys = keyframes.detect_keyframes(video, args.n, args.alpha,
                                      normalize_sad=not args.raw_sad)
    _write_json({
        "n_frames": int(video.shape[0]),
        "shots": args.n,
        "alpha": args.alpha,
        "sad_normalized": not args.raw_sad,
        "frames": [
            {"index": s.index, "entropy": s.entropy, "sad": s.sad, "score": s.score}
            for s in scores
        ],
        "key_frames": keys,
    }, args.out)
    print(f"key frames: {keys}")
    return 0


def _cmd_mask(args) -> int:
    keys = [int(v) for v in args.keys.split(",") if v.strip()] if args.keys else []
    mask = keyframes.build_ifs_mask(args.n, args.l, keys)
    tensorio.write_tensor(mask.allowed.astype(np.float64), args.out)
    print(f"wrote {args.out} ({int(mask.allowed.sum())} allowed entries)")
    return 0


def _read_heads(heads_dir: Path, rpe):
    qs = sorted(heads_dir.glob("head_*_q.ldt"))
    heads = []
    for qpath in qs:
        kpath = qpath.with_name(qpath.name[:-6] + "_k.ldt")
        if not kpath.exists():
            raise ValidationError(f"{qpath} has no matching *_k.ldt")
        heads.append((rpe, tensorio.read_tensor(qpath), tensorio.read_tensor(kpath)))
    if not heads:
        raise ValidationError(f"no head_*_q.ldt files in {heads_dir}")
    return heads


def _cmd_analyze_theorem1(args) -> int:
    if args.config:
        rpe = tensorio.load_config(args.config).rpe
    else:
        rpe = attention.Rotary(head_dim=args.head_dim, rotary_dims=args.rotary_dims)
    heads = _read_heads(Path(args.heads), rpe)
    reports = analysis.head_reports(heads, args.n)
    fraction = sum(1 for r in reports if r.satisfied) / len(reports)
    _write_json({
        "n": args.n,
        "g": 2 * args.n - 1,
        "epsilon_probe": analysis.epsilon_probe_kind(rpe),
        "sup_logit_is_lower_bound": True,
        "heads": [
            {
                "head": i,
                "sup_logit": r.sup_logit,
                "epsilon_uni": r.epsilon_uni,
                "r": r.r,
                "g": r.g,
                "rhs": r.rhs,
                "satisfied": r.satisfied,
                "sample_count": int(np.asarray(heads[i][1]).shape[0]),
            }
            for i, r in enumerate(reports)
        ],
        "fraction_satisfied": fraction,
    }, args.out)
    print(f"{len(reports)} heads, fraction satisfied: {fraction:.3f}")
    return 0


def _cmd_analyze_entropy(args) -> int:
    logits = tensorio.read_tensor(args.logits)
    if logits.ndim != 1:
        raise ValidationError(f"expected a 1-D logit vector, got {list(logits.shape)}")
    rep = analysis.entropy_check(logits)
    _write_json({
        "n": int(logits.size),
        "entropy": rep.entropy,
        "bound": rep.bound,
        "B": rep.B,
        "holds": rep.holds,
    }, args.out)
    print(f"entropy {rep.entropy:.6f} nats, bound {rep.bound:.6f}, "
          f"holds: {rep.holds}")
    return 0


def _cmd_pipeline(args) -> int:
    cfg = _load_cfg(args)
    if args.features:
        feats = tensorio.read_tensor(args.features)
    else:
        feats = tensorio.synth_features(cfg.N, args.c, args.hw, cfg.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report, hidden = pipeline.run_pipeline(
        cfg, feats, total_layers=args.layers,
        dump_dir=out / "layers" if args.dump else None,
    )
    tensorio.write_tensor(hidden, out / "output.ldt")
    _write_json(report.to_dict(include_timing=False), out / "report.json")
    pipeline.emit_stats(report, out / "stats.csv")
    total_ms = sum(r.elapsed_ms for r in report.layers)
    print(f"{args.layers} layers ({len(report.layers)} records) in "
          f"{total_ms:.1f} ms; outputs in {out}")
    return 0


def _cmd_stats(args) -> int:
    doc = json.loads(Path(args.report).read_text())
    report = pipeline.RunReport.from_dict(doc)
    pipeline.emit_stats(report, args.out)
    print(f"wrote {args.out} ({len(report.layers)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="longdiff",
                description="long-video attention toolkit "
                            f"(kernel backend: {_kernels.backend_name()})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen-features", help="write a synthetic feature tensor")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", type=int, default=4)
    s.add_argument("--hw", type=int, default=64)
    _common(s, "output .ldt path")
    s.set_defaults(fn=_cmd_gen_features)

    s = sub.add_parser("position-map", help="write the group/shift matrices")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--g", type=int, required=True)
    _common(s, "output directory")
    s.set_defaults(fn=_cmd_position_map)

    s = sub.add_parser("attend", help="schedule-averaged attention over Q/K/V files")
    s.add_argument("--q", required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--mask", help="optional 0/1 mask tensor")
    s.add_argument("--mask-mode", choices=attention.MASK_MODES,
                   default="renormalize")
    _common(s, "output directory")
    s.set_defaults(fn=_cmd_attend)

    s = sub.add_parser("keyframes", help="score frames and pick key frames")
    s.add_argument("--features", required=True)
    s.add_argument("--n", type=int, required=True, help="number of shots")
    s.add_argument("--alpha", type=float, default=2.0)
    s.add_argument("--raw-sad", action="store_true",
                   help="use the raw difference sum instead of the mean")
    _common(s, "output report JSON")
    s.set_defaults(fn=_cmd_keyframes)

    s = sub.add_parser("mask", help="write a frame-selection mask tensor")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--keys", default="", help="comma-separated key frames")
    _common(s, "output .ldt path")
    s.set_defaults(fn=_cmd_mask)

    s = sub.add_parser("analyze-theorem1",
                       help="distinguishability survey over stored head samples")
    s.add_argument("--heads", required=True,
                   help="directory of head_<i>_q.ldt / head_<i>_k.ldt pairs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--head-dim", type=int, default=64,
                   help="rotary width when no --config is given")
    s.add_argument("--rotary-dims", type=int, default=32)
    _common(s, "output report JSON")
    s.set_defaults(fn=_cmd_analyze_theorem1)

    s = sub.add_parser("analyze-entropy", help="softmax entropy floor check")
    s.add_argument("--logits", required=True, help="1-D logit tensor")
    _common(s, "output report JSON")
    s.set_defaults(fn=_cmd_analyze_entropy)

    s = sub.add_parser("pipeline", help="run the mock layer stack")
    s.add_argument("--features", help="input features (default: synthesized)")
    s.add_argument("--layers", type=int, default=16)
    s.add_argument("--c", type=int, default=4, help="channels when synthesizing")
    s.add_argument("--hw", type=int, default=64, help="spatial size when synthesizing")
    s.add_argument("--dump", action="store_true", help="dump per-layer tensors")
    _common(s, "output directory")
    s.set_defaults(fn=_cmd_pipeline)

    s = sub.add_parser("stats", help="render a run report as CSV")
    s.add_argument("--report", required=True, help="report.json from `pipeline`")
    _common(s, "output CSV path")
    s.set_defaults(fn=_cmd_stats)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LongDiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
