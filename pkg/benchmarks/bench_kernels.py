"""Benchmark the numba kernels against the pure-Python fallback.

Run: python benchmarks/bench_kernels.py [--sizes 64 128] [--repeat 3]

Each mode runs in its own interpreter because ``TFDA_NO_NUMBA`` is read at
import time. Numba timings exclude compilation (one warm-up call first).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best(func, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def worker(sizes, repeat):
    from tfda import _kernels, fieldio, morse, reeb
    from tfda._jit import NUMBA_ENABLED
    from tfda.pipeline import analyze_field

    # warm-up compiles (or loads cached) kernels
    analyze_field(fieldio.synth_field(32, 32, -3, 1, 4, 0))

    rows = []
    for n in sizes:
        field = fieldio.normalize(fieldio.synth_field(n, n, -3, 1, 8, 1))
        rank = _kernels.vertex_rank(field.values)
        points, report = morse.check_stability(field)
        if not report.stable:
            raise SystemExit(f"benchmark field at {n}x{n} is degenerate")
        saddles = np.array([p.flat_index(n) for p in points if p.kind == "saddle"], dtype=np.int64)
        classify = _kernels.classify if NUMBA_ENABLED else _kernels.classify_numpy
        rows.append({
            "n": n,
            "classify": _best(lambda: classify(rank, n, n), repeat),
            "trace": _best(lambda: _kernels.trace_all(rank, field.values.ravel(), n, n, saddles, 4 * n * n), repeat),
            "reeb": _best(lambda: reeb.build_reeb_graph(field, points), repeat),
            "pipeline": _best(lambda: analyze_field(field), repeat),
        })
    print(json.dumps({"numba": NUMBA_ENABLED, "rows": rows}))


def run_mode(no_numba, sizes, repeat):
    env = dict(os.environ)
    if no_numba:
        env["TFDA_NO_NUMBA"] = "1"
    else:
        env.pop("TFDA_NO_NUMBA", None)
    cmd = [sys.executable, __file__, "--worker", "--repeat", str(repeat), "--sizes", *map(str, sizes)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[64, 128])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        worker(args.sizes, args.repeat)
        return

    fast = run_mode(False, args.sizes, args.repeat)
    slow = run_mode(True, args.sizes, args.repeat)
    if not fast["numba"]:
        print("numba is not importable; both columns use the fallback")
    print(f"{'grid':>6s} {'stage':>9s} {'numba [s]':>11s} {'python [s]':>11s} {'speedup':>8s}")
    for a, b in zip(fast["rows"], slow["rows"]):
        for stage in ("classify", "trace", "reeb", "pipeline"):
            print(f"{a['n']:>5d}² {stage:>9s} {a[stage]:11.4f} {b[stage]:11.4f} {b[stage] / a[stage]:7.1f}x")


if __name__ == "__main__":
    main()
