"""Benchmark the compiled trajectory kernels against the numpy fallback.

Run from the repository root:

    python benchmarks/benchmark_kernels.py [--n 20000] [--grid 120] [--repeats 5]

Times the two batch kernels on a realistic workload (dense switching, fine
time grid) for every available backend and reports the speedup, then times
a full ensemble run under each backend for end-to-end context.  Both
backends produce bit-identical output, which is asserted along the way.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from rtdeph import _kernels, noise


def best_of(repeats, fn, *args):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def time_ensemble_subprocess(backend: str, n: int) -> float:
    """Time run_ensemble in a subprocess so the backend choice applies at import."""
    code = (
        "import time, numpy as np\n"
        "from rtdeph import analytic, engine, noise\n"
        "params = noise.RTParams(v=1.0, gamma=0.5)\n"
        "config = engine.RunConfig(system=analytic.SystemParams(rt=params),\n"
        f"    t_grid=np.linspace(0.0, 18.0, 60), n_trajectories={n}, master_seed=1)\n"
        "t0 = time.perf_counter(); engine.run_ensemble(config)\n"
        "print(time.perf_counter() - t0)\n"
    )
    env = dict(os.environ, RTDEPH_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20000, help="trajectories in the batch")
    parser.add_argument("--grid", type=int, default=120, help="time-grid points")
    parser.add_argument("--repeats", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    backends = _kernels.available_backends()
    print(f"backends available: {', '.join(backends)} (selected: {_kernels.BACKEND})")
    if "compiled" not in backends:
        print("note: compiled extension not built, benchmarking the fallback only")

    params = noise.RTParams(v=1.0, gamma=2.0)  # ~18 switches per trajectory
    horizon = 18.0
    print(f"sampling {args.n} trajectories (gamma={params.gamma}, horizon={horizon}) ...")
    t0 = time.perf_counter()
    batch = noise.sample_batch(params, horizon, args.n, master_seed=7)
    print(f"  sampling: {time.perf_counter() - t0:.3f} s "
          f"(mean switches {batch.counts.mean():.1f}, padded width {batch.switch_times.shape[1]})")
    grid = np.linspace(0.0, horizon, args.grid)

    for kernel_name in ("dwell_times", "levels_at_times"):
        kernel = getattr(_kernels, kernel_name)
        print(f"\n{kernel_name} on ({args.n} x {args.grid}):")
        results = {}
        for name, mod in backends.items():
            seconds, out = best_of(
                args.repeats, kernel, batch.levels, batch.switch_times, batch.counts, grid, mod
            )
            results[name] = (seconds, out)
            print(f"  {name:9s} {seconds * 1e3:10.2f} ms")
        if len(results) == 2:
            assert np.array_equal(results["pure"][1], results["compiled"][1]), "backends disagree"
            speedup = results["pure"][0] / results["compiled"][0]
            print(f"  speedup   {speedup:10.1f}x (outputs bit-identical)")

    print(f"\nend-to-end run_ensemble ({args.n} trajectories x 60 times, sampling included):")
    for name in backends:
        seconds = time_ensemble_subprocess(name, args.n)
        print(f"  {name:9s} {seconds:10.3f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
