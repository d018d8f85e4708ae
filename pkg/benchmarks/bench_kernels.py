"""Time the numeric kernels with numba and with the interpreted fallback.

Each backend runs in its own interpreter because the choice is made at import
time from MULTIRABI_DISABLE_NUMBA.

    python3 benchmarks/bench_kernels.py [--repeat 200]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

SIZES = (4, 8, 16, 32)


def measure(repeat):
    from multirabi import _accel, expm_series, tridiag_eigen
    from multirabi.ladder import coupling_matrix

    rng = np.random.default_rng(0)
    rows = []
    for n in SIZES:
        C = coupling_matrix(rng.uniform(0.1, 10.0, n - 1))
        dense = C.dense()
        tridiag_eigen(C)
        expm_series(dense, 3.0)  # compile / warm caches before timing
        tic = time.perf_counter()
        for _ in range(repeat):
            tridiag_eigen(C)
        eig = (time.perf_counter() - tic) / repeat
        tic = time.perf_counter()
        for _ in range(repeat):
            expm_series(dense, 3.0)
        series = (time.perf_counter() - tic) / repeat
        rows.append({"n": n, "tridiag_eigen": eig, "expm_series": series})
    return {"backend": _accel.backend_name(), "rows": rows}


def run_child(disable, repeat):
    env = dict(os.environ, MULTIRABI_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(measure(args.repeat)))
        return

    fast, slow = run_child(False, args.repeat), run_child(True, args.repeat)
    print(f"backends: {fast['backend']} vs {slow['backend']}  (mean time per call, {args.repeat} calls)")
    print(f"{'n':>3}  {'kernel':<14} {fast['backend']:>12} {slow['backend']:>12} {'speedup':>8}")
    for f, s in zip(fast["rows"], slow["rows"]):
        for kernel in ("tridiag_eigen", "expm_series"):
            a, b = f[kernel], s[kernel]
            print(f"{f['n']:>3}  {kernel:<14} {a * 1e6:>10.1f}us {b * 1e6:>10.1f}us {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
