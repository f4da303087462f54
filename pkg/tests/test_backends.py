"""The jitted kernels and the numpy fallback must agree bitwise."""

import os
import subprocess
import sys

import numpy as np
import pytest

from nanocav import backends
from nanocav.fdtd import (
    GaussianPulse,
    Mirror,
    Periodic,
    Probe,
    SimulationConfig,
    Source,
    run,
)
from nanocav.geometry import DeviceSpec, build_hole_list, rasterize
from tests.test_boundaries import sphere_grid


def test_backend_selection():
    assert "numpy" in backends.available()
    assert backends.get_kernels("numpy") is not None
    with pytest.raises(ValueError):
        backends.get_kernels("cuda")


@pytest.mark.skipif(not backends.HAS_NUMBA, reason="numba not installed")
def test_env_flag_selects_backend(monkeypatch):
    monkeypatch.setenv(backends.ENV_VAR, "numpy")
    assert backends.default_backend() == "numpy"
    monkeypatch.setenv(backends.ENV_VAR, "numba")
    assert backends.default_backend() == "numba"
    monkeypatch.setenv(backends.ENV_VAR, "tpu")
    with pytest.raises(ValueError):
        backends.default_backend()


@pytest.mark.skipif(not backends.HAS_NUMBA, reason="numba not installed")
def test_rasterize_bitwise_identical():
    spec = DeviceSpec(mirror_pairs=2, taper_holes=2)
    holes = build_hole_list(spec)
    g_nb = rasterize(holes, spec, 15.0, (60.0, 60.0, 60.0), backend="numba")
    g_np = rasterize(holes, spec, 15.0, (60.0, 60.0, 60.0), backend="numpy")
    assert np.array_equal(g_nb.eps_ex, g_np.eps_ex)
    assert np.array_equal(g_nb.eps_ey, g_np.eps_ey)
    assert np.array_equal(g_nb.eps_ez, g_np.eps_ez)


@pytest.mark.skipif(not backends.HAS_NUMBA, reason="numba not installed")
def test_fdtd_step_bitwise_identical():
    # dielectric sphere, absorber in x, mirror in y, periodic z: exercises
    # every kernel branch in one stroke
    grid = sphere_grid(32, 10.0, 30.0, 5.76)
    cfg = SimulationConfig(
        num_steps=250,
        boundaries=(Periodic(), Mirror(parity=-1), Periodic()),
    )
    pulse = GaussianPulse(wavelength_nm=500.0, fractional_bandwidth=0.6)
    src = [Source((15.0, 0.5 * 10.0, 0.0), "ey", waveform=pulse)]
    probes = [Probe((25.0, 5.0, 20.0), "ey"), Probe((-40.0, 15.0, 30.0), "ez")]
    res_nb = run(grid, cfg, src, probes, backend="numba")
    res_np = run(grid, cfg, src, probes, backend="numpy")
    for a, b in zip(res_nb.probes, res_np.probes):
        assert np.array_equal(a.values, b.values)


@pytest.mark.skipif(not backends.HAS_NUMBA, reason="numba not installed")
def test_fdtd_absorber_bitwise_identical():
    grid = sphere_grid(32, 10.0, 30.0, 5.76)
    cfg = SimulationConfig(num_steps=200)  # absorbing on all axes
    pulse = GaussianPulse(wavelength_nm=500.0, fractional_bandwidth=0.6)
    src = [Source((15.0, 5.0, 0.0), "ey", waveform=pulse)]
    probes = [Probe((25.0, 5.0, 20.0), "ey")]
    res_nb = run(grid, cfg, src, probes, backend="numba")
    res_np = run(grid, cfg, src, probes, backend="numpy")
    assert np.array_equal(res_nb.probes[0].values, res_np.probes[0].values)


def test_benchmark_script_runs():
    script = os.path.join(
        os.path.dirname(__file__), os.pardir, "benchmarks", "bench_step.py"
    )
    out = subprocess.run(
        [sys.executable, script, "--cells", "32", "--steps", "30"],
        capture_output=True, text=True, timeout=600,
    )
    assert out.returncode == 0, out.stderr
    assert "numpy" in out.stdout
