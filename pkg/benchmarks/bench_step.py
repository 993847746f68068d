"""Time the spectral stepper with the compiled and pure-numpy kernels.

Two views: the pointwise stage kernel alone (where the backends differ)
and the full step (dominated by the cosine transforms, so the end-to-end
gap narrows as the grid grows). The backend is chosen once, at import
time, so the full-step comparison reruns this script in two subprocesses,
one with SCLEROLAB_PURE_PYTHON=1.

    python3 benchmarks/bench_step.py --grid 64 --steps 2000
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import time


def run_child(grid: int, steps: int, repeat: int) -> dict:
    import sclerolab as sl
    from sclerolab import kernels

    config = sl.SimConfig(
        params=sl.ModelParams(a=3.0, chi=3.18, eps0=0.03125, delta=1.0, beta=1.0),
        grid=sl.Grid(sl.RectDomain(math.pi, math.pi), nx=grid, ny=grid),
        dt=1e-3,
        t_end=steps * 1e-3,
        ic=sl.EquilibriumPerturbation(amplitude=1e-3),
        seed=1236,
        monitors=sl.Monitors(series_every=steps),
    )
    sl.simulate(config)  # warm-up: transform plans, allocator, caches
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        sl.simulate(config)
        best = min(best, time.perf_counter() - t0)
    return {
        "backend": kernels.BACKEND,
        "grid": grid,
        "steps": steps,
        "seconds": best,
        "us_per_step": best / steps * 1e6,
    }


def bench_stage_kernel(grid: int) -> list[tuple[str, float]]:
    import numpy as np

    from sclerolab.kernels import _reference

    backends = [("python", _reference)]
    try:
        from sclerolab.kernels import _speedups

        backends.insert(0, ("compiled", _speedups))
    except ImportError:
        pass

    shape = (grid, grid)
    rng = np.random.default_rng(0)
    m = 1.0 + 0.1 * rng.standard_normal(shape)
    c = 2.0 + 0.1 * rng.standard_normal(shape)
    d = rng.random(shape)
    cx = rng.standard_normal(shape)
    cy = rng.standard_normal(shape)
    out = [np.empty(shape) for _ in range(5)]

    rows = []
    for name, mod in backends:
        call = lambda: mod.saturating_stage(
            m, c, d, cx, cy, 3.0, 1.0, 1.0, 1.0, *out
        )
        call()
        loops = 3000
        t0 = time.perf_counter()
        for _ in range(loops):
            call()
        rows.append((name, (time.perf_counter() - t0) / loops * 1e6))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", type=int, default=64, help="grid points per side")
    parser.add_argument("--steps", type=int, default=2000, help="time steps per pass")
    parser.add_argument("--repeat", type=int, default=3, help="passes; best one counts")
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        json.dump(run_child(args.grid, args.steps, args.repeat), sys.stdout)
        return 0

    print(f"stage kernel alone, {args.grid}x{args.grid}")
    stage = bench_stage_kernel(args.grid)
    for name, us in stage:
        print(f"  {name:>8}: {us:8.2f} us/call")
    if len(stage) == 2:
        print(f"  speedup: {stage[1][1] / stage[0][1]:.2f}x")

    results = []
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("SCLEROLAB_PURE_PYTHON", None)
        if pure:
            env["SCLEROLAB_PURE_PYTHON"] = "1"
        proc = subprocess.run(
            [
                sys.executable,
                os.path.abspath(__file__),
                "--child",
                "--grid",
                str(args.grid),
                "--steps",
                str(args.steps),
                "--repeat",
                str(args.repeat),
            ],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            return proc.returncode
        results.append(json.loads(proc.stdout))

    print(f"full step, grid {args.grid}x{args.grid}, {args.steps} steps, best of {args.repeat}")
    for res in results:
        print(f"  {res['backend']:>8}: {res['us_per_step']:8.1f} us/step")
    if results[0]["backend"] == results[1]["backend"]:
        print("  (extension not built: both children used the python backend)")
    else:
        ratio = results[1]["us_per_step"] / results[0]["us_per_step"]
        print(f"  speedup: {ratio:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
