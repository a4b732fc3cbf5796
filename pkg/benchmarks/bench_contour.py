"""Benchmark the contour-inversion engine on both execution backends.

The hot loop of every solve is the evaluation of gamma-factor products on
Gauss-Legendre blocks along the inversion contour.  That loop is compiled
with numba when available and falls back to pure numpy otherwise; the
STEREO_UNFOLD_NUMBA environment variable (set before import) picks the
backend explicitly.

Run with no arguments to time both backends and print a comparison table:

    python3 benchmarks/bench_contour.py

The script re-invokes itself in a subprocess per backend so each process
imports the package exactly once with the right flag.  Use --backend to
time a single backend in the current process instead.

Workload per repeat: one plane solve (uniform section areas against the
sphere kernel), one line solve (triangular chord lengths against the
sphere kernel), and a 500-point evaluation of each recovered distribution.
The first repeat in each process is discarded as warm-up (JIT compilation
and contour-block caching happen there).
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def run_workload(grid_points):
    """One full repeat of the benchmark workload.  Returns elapsed seconds."""
    from stereounfold import (
        solve_line,
        solve_plane,
        sphere_line_kernel,
        sphere_plane_kernel,
        triangle_density,
        uniform_density,
    )

    t0 = time.perf_counter()

    h_plane = uniform_density(np.pi)
    plane, _ = solve_plane(h_plane, sphere_plane_kernel())
    lo, hi = plane.support
    xs = np.linspace(lo + 1e-4 * (hi - lo), hi - 1e-4 * (hi - lo),
                     grid_points)
    plane.eval(xs)

    h_line = triangle_density()
    line, _ = solve_line(h_line, sphere_line_kernel(),
                         beta_mode="explicit", beta_value=1.0)
    lo, hi = line.support
    xs = np.linspace(lo + 1e-4 * (hi - lo), hi - 1e-4 * (hi - lo),
                     grid_points)
    line.eval(xs)

    return time.perf_counter() - t0


def run_single(backend, repeats, grid_points):
    """Time the workload in this process and print a RESULT line."""
    import stereounfold

    if backend == "numba" and not stereounfold.USE_NUMBA:
        print("error: numba backend requested but not active "
              "(is numba installed?)", file=sys.stderr)
        return 1
    if backend == "numpy" and stereounfold.USE_NUMBA:
        print("error: numpy backend requested but numba is active; "
              "set STEREO_UNFOLD_NUMBA=0 before import", file=sys.stderr)
        return 1

    warm = run_workload(grid_points)
    times = [run_workload(grid_points) for _ in range(repeats)]
    print(f"backend={backend} warmup={warm:.3f}s "
          + " ".join(f"{t:.3f}s" for t in times))
    print("RESULT " + json.dumps({
        "backend": backend,
        "warmup": warm,
        "times": times,
    }))
    return 0


def run_both(repeats, grid_points):
    """Re-invoke this script once per backend and print a comparison."""
    results = {}
    for backend, flag in (("numba", "1"), ("numpy", "0")):
        env = dict(os.environ)
        env["STEREO_UNFOLD_NUMBA"] = flag
        cmd = [sys.executable, os.path.abspath(__file__),
               "--backend", backend,
               "--repeats", str(repeats),
               "--grid", str(grid_points)]
        print(f"--- {backend} backend ---")
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        sys.stdout.write(proc.stdout)
        sys.stderr.write(proc.stderr)
        if proc.returncode != 0:
            print(f"{backend} run failed (exit {proc.returncode})",
                  file=sys.stderr)
            continue
        for line in proc.stdout.splitlines():
            if line.startswith("RESULT "):
                results[backend] = json.loads(line[len("RESULT "):])

    if not results:
        print("no backend produced results", file=sys.stderr)
        return 1

    print()
    print(f"{'backend':<8} {'warmup':>9} {'mean':>9} {'min':>9}")
    for backend in ("numba", "numpy"):
        if backend not in results:
            print(f"{backend:<8} {'(failed)':>9}")
            continue
        r = results[backend]
        times = r["times"]
        print(f"{backend:<8} {r['warmup']:>8.3f}s {np.mean(times):>8.3f}s "
              f"{np.min(times):>8.3f}s")
    if "numba" in results and "numpy" in results:
        ratio = np.mean(results["numpy"]["times"]) \
            / np.mean(results["numba"]["times"])
        print(f"\nnumpy/numba mean-time ratio: {ratio:.2f}x")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="time the contour-inversion engine on the numba and "
                    "pure-numpy backends")
    parser.add_argument("--backend", choices=("both", "numba", "numpy"),
                        default="both",
                        help="which backend to time (default: both, via "
                             "one subprocess per backend)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repeats after warm-up (default 3)")
    parser.add_argument("--grid", type=int, default=500,
                        help="evaluation grid points per solve (default 500)")
    args = parser.parse_args(argv)

    if args.repeats < 1:
        parser.error("--repeats must be positive")
    if args.grid < 2:
        parser.error("--grid must be at least 2")

    if args.backend == "both":
        return run_both(args.repeats, args.grid)
    return run_single(args.backend, args.repeats, args.grid)


if __name__ == "__main__":
    sys.exit(main())
