#!/usr/bin/env python3
"""Stepping-rate benchmark: compiled kernels vs the numpy reference.

Runs the same small cavity-like problem on each available backend and
reports wall time per step and the speedup. A short throwaway run ahead
of the timed pass keeps JIT compilation out of the numbers.

Usage: python benchmarks/bench_step.py [--cells N] [--steps N]
"""

import argparse
import time

import numpy as np

from nanocav import backends
from nanocav.fdtd import (
    Absorbing,
    GaussianPulse,
    Probe,
    SimulationConfig,
    Source,
    run,
)
from nanocav.geometry import PermittivityGrid


def _grid(n: int, spacing: float = 10.0) -> PermittivityGrid:
    half = n * spacing / 2.0
    origin = (-half, -half, -half)
    coords = origin[0] + spacing * np.arange(n)

    def comp(ox, oy, oz):
        x = coords + ox * spacing
        y = coords + oy * spacing
        z = coords + oz * spacing
        r2 = x[:, None, None] ** 2 + y[None, :, None] ** 2 + z[None, None, :] ** 2
        return np.where(r2 < (n * spacing / 4.0) ** 2, 5.76, 1.0)

    return PermittivityGrid(
        spacing=spacing,
        origin=origin,
        eps_ex=comp(0.5, 0.0, 0.0),
        eps_ey=comp(0.0, 0.5, 0.0),
        eps_ez=comp(0.0, 0.0, 0.5),
        index=2.4,
    )


def time_backend(name: str, n: int, steps: int) -> float:
    grid = _grid(n)
    # keep source and probe clear of the 12-layer absorbers on small grids
    clear = (n / 2.0 - 12.0) * 10.0
    src = Source((min(15.0, 0.4 * clear), min(5.0, 0.2 * clear), min(5.0, 0.2 * clear)),
                 "ey", waveform=GaussianPulse(637.0, 0.3))
    probe = Probe((min(45.0, 0.6 * clear), min(5.0, 0.2 * clear), min(10.0, 0.3 * clear)), "ey")
    cfg_warm = SimulationConfig(num_steps=2, boundaries=(Absorbing(),) * 3)
    run(grid, cfg_warm, src, [probe], backend=name)  # JIT warmup
    cfg = SimulationConfig(num_steps=steps, boundaries=(Absorbing(),) * 3)
    t0 = time.perf_counter()
    run(grid, cfg, src, [probe], backend=name)
    return (time.perf_counter() - t0) / steps


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=96, help="cells per axis")
    ap.add_argument("--steps", type=int, default=60, help="timed steps")
    args = ap.parse_args()
    if args.cells < 28:
        ap.error("--cells must be at least 28 to fit the absorbing layers")

    names = backends.available()
    print(f"domain {args.cells}^3 cells, {args.steps} steps, backends: {names}")
    per_step = {}
    for name in names:
        dt = time_backend(name, args.cells, args.steps)
        per_step[name] = dt
        mcups = args.cells**3 / dt / 1e6
        print(f"{name:8s} {dt * 1e3:8.2f} ms/step   {mcups:8.1f} Mcell-updates/s")
    if "numba" in per_step and "numpy" in per_step:
        print(f"speedup numba/numpy: {per_step['numpy'] / per_step['numba']:.2f}x")


if __name__ == "__main__":
    main()
