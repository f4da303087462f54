"""Core solver checks: dispersion, conservation, stability, probes."""

import math

import numpy as np
import pytest

from nanocav.fdtd import (
    EnergyMonitor,
    GaussianPulse,
    Periodic,
    Probe,
    SimulationConfig,
    Source,
    run,
    stability_dt,
)
from nanocav.geometry import PermittivityGrid
from nanocav.spectra import harmonic_inversion


def vacuum_grid(nx, ny, nz, dx=10.0):
    eps = np.ones((nx, ny, nz))
    return PermittivityGrid(
        spacing=dx, origin=(0.0, 0.0, 0.0),
        eps_ex=eps.copy(), eps_ey=eps.copy(), eps_ez=eps.copy(), index=1.0,
    )


PERIODIC3 = (Periodic(), Periodic(), Periodic())


def test_stability_dt_formula():
    assert stability_dt(10.0, 3, 0.5) == pytest.approx(5.0 / math.sqrt(3))
    assert stability_dt(10.0, 1, 0.5) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        stability_dt(10.0, 4, 0.5)
    with pytest.raises(ValueError):
        stability_dt(10.0, 3, 0.0)


def test_dt_counts_only_extended_axes():
    # a (n, 1, 1) grid is one dimensional; dt uses sqrt(1)
    g = vacuum_grid(64, 1, 1)
    cfg = SimulationConfig(num_steps=8, boundaries=PERIODIC3)
    res = run(g, cfg, [Source(position=(320.0, 0.0, 0.0))])
    assert res.dt == pytest.approx(stability_dt(10.0, 1, 0.5))
    g3 = vacuum_grid(8, 8, 8)
    res3 = run(g3, cfg, [Source(position=(40.0, 40.0, 40.0))])
    assert res3.dt == pytest.approx(stability_dt(10.0, 3, 0.5))


def yee_mode_frequency(m, dims, dx, dt):
    """Exact eigenfrequency of the discrete vacuum plane-wave mode m.

    The leapfrog Yee update on a periodic box satisfies
    sin^2(omega dt / 2) / dt^2 = sum_i sin^2(k_i dx / 2) / dx^2
    with k_i = 2 pi m_i / (n_i dx).
    """
    s = 0.0
    for mi, ni in zip(m, dims):
        k = 2.0 * math.pi * mi / (ni * dx)
        s += (math.sin(0.5 * k * dx) / dx) ** 2
    return (2.0 / dt) * math.asin(dt * math.sqrt(s))


def test_periodic_box_matches_discrete_dispersion_exactly():
    # absolute 3D frequency oracle: every ring-down line of a lossless
    # periodic vacuum box must sit on the known discrete dispersion
    dims = (20, 16, 12)
    dx = 10.0
    g = vacuum_grid(*dims, dx=dx)
    # narrow pulse: keeps the dense short-wavelength mode forest dark so
    # the fit only sees the sparse low-frequency lines
    pulse = GaussianPulse(wavelength_nm=150.0, fractional_bandwidth=0.7)
    src = [
        Source(position=(35.0, 20.0, 45.0), component="ey", waveform=pulse),
        Source(position=(120.0, 70.0, 15.0), component="ez", amplitude=0.6,
               waveform=pulse),
    ]
    probes = [Probe(position=(75.0, 105.0, 30.0), component="ey")]
    cfg = SimulationConfig(num_steps=6000, boundaries=PERIODIC3)
    res = run(g, cfg, src, probes)

    window = (res.turn_off_step + 16, 6000)
    found = harmonic_inversion(
        res.probes[0], window, (110.0, 2000.0),
        max_samples=6000, amplitude_floor=3e-3,
    )
    assert len(found) >= 3
    allowed = set()
    for mx in range(0, 4):
        for my in range(0, 4):
            for mz in range(0, 4):
                if mx == my == mz == 0:
                    continue
                w = yee_mode_frequency((mx, my, mz), dims, dx, res.dt)
                allowed.add(w)
    allowed = np.array(sorted(allowed))
    for m in found:
        w = m.omega.real
        rel = np.min(np.abs(allowed - w)) / w
        assert rel < 1e-6, f"line at lam={m.wavelength_nm:.2f} off the lattice: {rel:.2e}"


def test_energy_conserved_after_source_off():
    g = vacuum_grid(16, 16, 16)
    mon = EnergyMonitor(name="u", kind="conserved", every=25)
    pulse = GaussianPulse(wavelength_nm=120.0, fractional_bandwidth=0.8)
    cfg = SimulationConfig(num_steps=2500, boundaries=PERIODIC3)
    res = run(g, cfg, [Source(position=(45.0, 85.0, 35.0), waveform=pulse)],
              monitors=[mon])
    tr = res.monitors["u"]
    u = tr.values[tr.steps >= res.turn_off_step]
    assert u.size > 10
    drift = (u.max() - u.min()) / u.max()
    assert drift < 1e-12


def test_blowup_detected_beyond_stability_limit():
    g = vacuum_grid(12, 12, 12)
    cfg = SimulationConfig(num_steps=4000, courant_factor=0.99, boundaries=PERIODIC3)
    # 0.99 of the limit is stable in vacuum
    res = run(g, cfg, [Source(position=(45.0, 45.0, 45.0))],
              [Probe(position=(85.0, 45.0, 85.0))])
    assert np.all(np.isfinite(res.probes[0].values))
    with pytest.raises(ValueError):
        SimulationConfig(num_steps=10, courant_factor=1.01, boundaries=PERIODIC3)


def test_probe_records_every_step_and_snaps():
    g = vacuum_grid(16, 8, 8)
    cfg = SimulationConfig(num_steps=300, boundaries=PERIODIC3)
    res = run(g, cfg, [Source(position=(42.0, 40.0, 40.0))],
              [Probe(position=(81.0, 38.0, 41.0), component="ey")])
    rec = res.probes[0]
    assert rec.values.shape == (300,)
    assert rec.times[0] == pytest.approx(res.dt)
    # position snapped onto the ey lattice: integer x, half-integer y, integer z
    x, y, z = rec.position
    assert x / 10.0 == pytest.approx(round(x / 10.0))
    assert (y / 10.0 - 0.5) == pytest.approx(round(y / 10.0 - 0.5))
    assert z / 10.0 == pytest.approx(round(z / 10.0))


def test_source_requires_valid_component():
    with pytest.raises(ValueError):
        Source(position=(0.0, 0.0, 0.0), component="bogus")
    with pytest.raises(ValueError):
        Probe(position=(0.0, 0.0, 0.0), component="qq")


def test_run_requires_a_source():
    g = vacuum_grid(8, 8, 8)
    cfg = SimulationConfig(num_steps=10, boundaries=PERIODIC3)
    with pytest.raises(ValueError):
        run(g, cfg, [])


def test_gaussian_pulse_turns_off_exactly():
    p = GaussianPulse(wavelength_nm=637.0, fractional_bandwidth=0.1)
    t_off = p.turn_off_time
    assert p.sample(t_off + 1e-9) == 0.0
    assert p.sample(t_off - 100.0) != 0.0
    # odd (sine) modulation about the envelope peak: no dc content
    t = np.linspace(0.0, t_off, 20001)
    y = p.sample(t)
    assert abs(np.trapezoid(y, t)) < 1e-6 * np.abs(y).max() * t_off


def test_monitor_validation():
    with pytest.raises(ValueError):
        EnergyMonitor(kind="bogus")
    with pytest.raises(ValueError):
        EnergyMonitor(every=0)
