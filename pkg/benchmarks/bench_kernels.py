"""Compare the compiled kernels against the numpy fallback.

Micro-benchmarks call both implementations directly; the end-to-end rows run
the benchmark config in subprocesses with DASCGD_KERNELS forcing each
backend.  Usage: python benchmarks/bench_kernels.py [--rounds 2000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from dascgd._kernels import _ref

try:
    from dascgd._kernels import _core
except ImportError:
    _core = None


def time_call(fn, *args, repeat=2000):
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / repeat)
    return best


def micro_rows():
    rng = np.random.default_rng(0)
    S, B, d = 100, 5, 32
    sp = rng.integers(0, S, (S, B)).astype(np.int64)
    rew = rng.standard_normal((S, B))
    proj = rng.standard_normal(S)
    feat = rng.random((S, d))
    x = rng.standard_normal(4224)
    u = rng.random(4224)

    rows = []
    py = time_call(_ref.rl_inner_eval, sp, rew, proj, feat, 0.95)
    c = time_call(_core.rl_inner_eval, sp, rew, proj, feat, 0.95) if _core else None
    rows.append(("rl_inner_eval (S=100, B=5, d=32)", py, c))
    py = time_call(_ref.quantize_values, x, u, 4)
    c = time_call(_core.quantize_values, x, u, 4) if _core else None
    rows.append(("quantize_values (m=4224, l=4)", py, c))
    return rows


def end_to_end(backend, rounds):
    env = dict(os.environ, DASCGD_KERNELS=backend)
    script = (
        "import time\n"
        "from dascgd import generate_instance, ring_weights, StepSizes, run, solve_optimal\n"
        "inst = generate_instance(6, 32, 100, seed=7)\n"
        "W = ring_weights(6)\n"
        "xs = solve_optimal(inst)\n"
        "sizes = StepSizes(alpha=0.01, beta=0.01, gamma=0.01)\n"
        f"start = time.perf_counter()\n"
        f"run(inst, W, 'dascgd', sizes, K={rounds}, batch=5, seed=0, x_star=xs, metric_every=50)\n"
        "print(time.perf_counter() - start)\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True
    )
    return float(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rounds", type=int, default=2000)
    args = parser.parse_args()

    print(f"{'kernel':<36} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, py, c in micro_rows():
        if c is None:
            print(f"{name:<36} {py * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
        else:
            print(f"{name:<36} {py * 1e6:>10.1f}us {c * 1e6:>10.1f}us {py / c:>8.1f}x")

    py = end_to_end("python", args.rounds)
    print(f"{'end-to-end run, K=' + str(args.rounds):<36} {py:>11.2f}s", end="")
    if _core is not None:
        c = end_to_end("c", args.rounds)
        print(f" {c:>11.2f}s {py / c:>8.2f}x")
    else:
        print(f" {'n/a':>12} {'n/a':>9}")


if __name__ == "__main__":
    main()
