"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_backends.py --segments 2000

Both backends encode the same seeded segments; spike counts must agree.
"""

import argparse
import sys

from dpenc.bench import bench_segments, format_table, run_bench

STATEFUL = ("dp1", "dp12", "delta", "lc", "ctem", "ftem", "iftem")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--segments", type=int, default=2000)
    ap.add_argument("--encoders", default=",".join(STATEFUL))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    encoders = [e for e in args.encoders.split(",") if e]
    segs = bench_segments(args.segments, args.seed)
    fast = run_bench(encoders=encoders, backend="numba", segments=segs)
    slow = run_bench(encoders=encoders, backend="numpy", segments=segs)
    print(format_table(fast + slow))
    print()
    print(f"{'encoder':<10} {'speedup':>8}  counts")
    ok = True
    for f, s in zip(fast, slow):
        same = f.spikes == s.spikes
        ok &= same
        print(f"{f.encoder_id:<10} {s.seconds / f.seconds:>7.1f}x  {'match' if same else 'MISMATCH'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
