"""Boundary behavior: Bloch wrap, mirror halves, absorber reflection."""

import math

import numpy as np
import pytest

from nanocav.fdtd import (
    Absorbing,
    GaussianPulse,
    Mirror,
    Periodic,
    Probe,
    SimulationConfig,
    Source,
    expand_sources_full_domain,
    run,
    stability_dt,
)
from nanocav.geometry import PermittivityGrid
from nanocav.spectra import harmonic_inversion
from tests.test_fdtd import vacuum_grid, yee_mode_frequency


def sphere_grid(n, dx, radius, eps_in):
    """Staircased dielectric ball centered in an n^3 vacuum box."""
    half = n * dx / 2.0
    offs = {"ex": (0.5, 0.0, 0.0), "ey": (0.0, 0.5, 0.0), "ez": (0.0, 0.0, 0.5)}
    arrays = {}
    idx = np.arange(n)
    for c, (ox, oy, oz) in offs.items():
        x = (idx + ox) * dx - half
        y = (idx + oy) * dx - half
        z = (idx + oz) * dx - half
        r2 = (
            x[:, None, None] ** 2 + y[None, :, None] ** 2 + z[None, None, :] ** 2
        )
        arrays[c] = np.where(r2 <= radius**2, eps_in, 1.0)
    return PermittivityGrid(
        spacing=dx, origin=(-half, -half, -half),
        eps_ex=arrays["ex"], eps_ey=arrays["ey"], eps_ez=arrays["ez"],
        index=math.sqrt(eps_in),
    )


def test_periodic_wraparound_bitwise():
    # one periodic cell vs three tiled copies: identical trajectories
    dx = 10.0
    nx, nt = 12, 3
    small = vacuum_grid(nx, 4, 4, dx)
    big = vacuum_grid(nx * nt, 4, 4, dx)
    pulse = GaussianPulse(wavelength_nm=400.0, fractional_bandwidth=0.5)
    cfg_s = SimulationConfig(num_steps=220, boundaries=(Periodic(), Periodic(), Periodic()))
    src_s = [Source((45.0, 25.0, 15.0), "ey", waveform=pulse)]
    src_b = [
        Source((45.0 + i * nx * dx, 25.0, 15.0), "ey", waveform=pulse)
        for i in range(nt)
    ]
    res_s = run(small, cfg_s, src_s, [Probe((85.0, 25.0, 25.0), "ey")])
    res_b = run(big, cfg_s, src_b, [Probe((85.0 + nx * dx, 25.0, 25.0), "ey")])
    a = res_s.probes[0].values
    b = res_b.probes[0].values
    assert np.array_equal(np.real(a), np.real(b))


def test_bloch_phase_lines_on_dispersion():
    # fractional Bloch phase shifts the allowed k set to (phi + 2 pi m)/L;
    # every ring-down line must land on the discrete dispersion for that set
    dx = 10.0
    nx = 48
    phi = 0.3 * 2.0 * math.pi
    g = vacuum_grid(nx, 1, 1, dx)
    pulse = GaussianPulse(wavelength_nm=500.0, fractional_bandwidth=1.0)
    cfg = SimulationConfig(
        num_steps=5000, boundaries=(Periodic(phi), Periodic(), Periodic())
    )
    res = run(
        g, cfg,
        [Source((135.0, 0.0, 0.0), "ey", waveform=pulse)],
        [Probe((325.0, 0.0, 0.0), "ey")],
    )
    dt = res.dt
    rec = res.probes[0]
    found = harmonic_inversion(
        rec, (res.turn_off_step + 8, 5000), (200.0, 2400.0),
        max_samples=5000, amplitude_floor=3e-3,
    )
    assert len(found) >= 2
    allowed = []
    for m in range(-4, 5):
        k = (phi + 2.0 * math.pi * m) / (nx * dx)
        w = (2.0 / dt) * math.asin(dt * abs(math.sin(0.5 * k * dx)) / dx)
        allowed.append(w)
    allowed = np.array(sorted(set(allowed)))
    for mode in found:
        rel = np.min(np.abs(allowed - mode.omega.real)) / mode.omega.real
        assert rel < 1e-7, f"line {mode.wavelength_nm:.2f} nm off by {rel:.2e}"


def test_mirror_half_equals_full_run():
    grid = sphere_grid(32, 10.0, 30.0, 5.76)
    dx = 10.0
    pulse = GaussianPulse(wavelength_nm=637.0, fractional_bandwidth=0.5)
    base = [Source((15.0, 0.5 * dx, 0.0), "ey", waveform=pulse)]
    probes = [
        Probe((25.0, 0.5 * dx, 20.0), "ey"),
        Probe((20.0, 2 * dx, 10.0), "ez"),
    ]
    cfg_half = SimulationConfig(
        num_steps=700, boundaries=(Absorbing(), Mirror(parity=-1), Absorbing())
    )
    cfg_full = SimulationConfig(
        num_steps=700, boundaries=(Absorbing(), Absorbing(), Absorbing())
    )
    full_sources = expand_sources_full_domain(base, (1, -1, 1), dx, axes=(1,))
    assert len(full_sources) == 2
    res_h = run(grid, cfg_half, base, probes)
    res_f = run(grid, cfg_full, full_sources, probes)
    for rh, rf in zip(res_h.probes, res_f.probes):
        scale = float(np.max(np.abs(rf.values)))
        assert np.max(np.abs(rh.values - rf.values)) / scale < 1e-10


def test_mirror_requires_even_cells():
    g = vacuum_grid(11, 8, 8)  # odd x count cannot split
    cfg = SimulationConfig(
        num_steps=4, boundaries=(Mirror(parity=1), Periodic(), Periodic())
    )
    with pytest.raises(ValueError, match="even"):
        run(g, cfg, [Source((5.0, 40.0, 40.0))])


def test_mirror_parity_validation():
    with pytest.raises(ValueError):
        Mirror(parity=0)


def test_absorber_reflection_small():
    # 1D normal incidence: reflected power under 1e-6 of incident even in
    # this short 700-cell version of the validation check
    dx = 10.0
    n = 700
    g = vacuum_grid(n, 1, 1, dx)
    pulse = GaussianPulse(wavelength_nm=637.0, fractional_bandwidth=0.3)
    src = Source((1000.0, 0.5 * dx, 0.0), "ey", waveform=pulse)
    probe = Probe((4000.0, 0.5 * dx, 0.0), "ey")
    dt = stability_dt(dx, 1, 0.5)
    t_inc_end = 3000.0 + pulse.turn_off_time + 800.0
    t_end = t_inc_end + 2.0 * (n * dx - 120.0 - 4000.0) + 2000.0
    cfg = SimulationConfig(
        num_steps=int(t_end / dt),
        boundaries=(Absorbing(), Periodic(), Periodic()),
    )
    res = run(g, cfg, src, [probe])
    v = np.abs(np.real(res.probes[0].values)) ** 2
    split = int(t_inc_end / dt)
    p_inc = float(np.sum(v[:split]))
    p_ref = float(np.sum(v[split:]))
    assert p_inc > 0
    assert p_ref / p_inc < 1e-6
