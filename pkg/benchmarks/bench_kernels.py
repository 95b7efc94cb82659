"""Benchmark the compiled attention kernels against the numpy fallback.

Times the individual kernels plus a full schedule-averaged attention at the
reference long-video setting (N=128, d=64, 32 rotary dims, G=16).

    python benchmarks/bench_kernels.py [--n N] [--d D] [--g G] [--repeat R]
"""
import argparse
import math
import time

import numpy as np

from longdiff import _kernels
from longdiff import (
    Rotary,
    build_ifs_mask,
    group_config,
    longdiff_attention,
    schedule,
    standard_normals,
)


def _time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(n, d, rotary_dims, g, repeat):
    rpe = Rotary(head_dim=d, rotary_dims=rotary_dims)
    Q = standard_normals(1, n * d).reshape(n, d)
    K = standard_normals(2, n * d).reshape(n, d)
    V = standard_normals(3, n * d).reshape(n, d)
    sched = schedule(n, group_config(n, g))
    mask = build_ifs_mask(n, 8, list(range(0, n, max(1, n // 8)))[:8])
    pos = np.ascontiguousarray(sched[0], dtype=np.float64)
    allowed = np.ascontiguousarray(mask.allowed, dtype=np.uint8)
    logits = standard_normals(4, n * n).reshape(n, n)

    names = sorted(_kernels.available_backends())
    rows = []
    for name in names:
        kern = _kernels.select(name)
        scale = 1.0 / math.sqrt(d)
        timings = {
            "rotary_logits": _time(lambda: kern.rotary_logits(Q, K, pos, rpe.freqs, scale), repeat),
            "masked_softmax": _time(lambda: kern.masked_softmax(logits, allowed), repeat),
            "matmul": _time(lambda: kern.matmul(logits, V), repeat),
            "schedule attention": _time(
                lambda: longdiff_attention(Q, K, V, sched, mask, rpe=rpe), repeat),
        }
        rows.append((name, timings))

    width = max(len(k) for _, t in rows for k in t)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{name:>12}" for name, _ in rows)
    timing = dict(rows)
    if len(rows) == 2:
        header += f"  {'native speedup':>15}"
    print(f"N={n} d={d} rotary_dims={rotary_dims} G={g} "
          f"(schedule of {len(sched)} matrices), best of {repeat}")
    print(header)
    print("-" * len(header))
    for key in rows[0][1]:
        line = f"{key:<{width}}  " + "  ".join(
            f"{t[key] * 1e3:>10.3f}ms" for _, t in rows)
        if len(rows) == 2:
            line += f"  {timing['python'][key] / timing['native'][key]:>14.2f}x"
        print(line)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--d", type=int, default=64)
    ap.add_argument("--rotary-dims", type=int, default=32)
    ap.add_argument("--g", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "native" not in _kernels.available_backends():
        print("note: compiled backend unavailable, timing the fallback only")
    run(args.n, args.d, args.rotary_dims, args.g, args.repeat)


if __name__ == "__main__":
    main()
