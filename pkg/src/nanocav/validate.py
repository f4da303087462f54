"""Self-contained oracle suite: cheap runs with independently known answers.

Each check builds its own small problem, runs the solver (or an analysis
routine) and compares against an analytic or closed-form result. The
suite is the CLI's `validate` command; failures there mean the build
cannot be trusted for the expensive cavity runs.

`fault="bloch_phase"` deliberately corrupts the periodic wrap phase in
the wraparound check so its failure path stays testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tmm
from .fdtd import (
    Absorbing,
    GaussianPulse,
    EnergyMonitor,
    Mirror,
    Periodic,
    Probe,
    ProbeRecord,
    SimulationConfig,
    Source,
    expand_sources_full_domain,
    run,
    stability_dt,
)
from .geometry import PermittivityGrid
from .spectra import harmonic_inversion

VACUUM_EPS = 1.0
DIAMOND_N = 2.4


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    limit: str

    def line(self) -> str:
        tag = "pass" if self.passed else "FAIL"
        return f"{tag:4s}  {self.name:32s} {self.measured}  (limit {self.limit})"


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def table(self) -> str:
        lines = [c.line() for c in self.checks]
        n_fail = sum(not c.passed for c in self.checks)
        lines.append(
            f"{len(self.checks)} checks, "
            + ("all passed" if n_fail == 0 else f"{n_fail} FAILED")
        )
        return "\n".join(lines)


def _uniform_grid(dims, spacing, eps=1.0, origin=(0.0, 0.0, 0.0)) -> PermittivityGrid:
    shape = tuple(dims)
    make = lambda: np.full(shape, float(eps), dtype=np.float64)
    return PermittivityGrid(
        spacing=spacing,
        origin=origin,
        eps_ex=make(),
        eps_ey=make(),
        eps_ez=make(),
        index=math.sqrt(eps),
    )


def _sphere_grid(n: int, spacing: float, radius_nm: float, eps: float) -> PermittivityGrid:
    """Cube of vacuum with a centered dielectric ball (staircased; the
    shape only needs to be symmetric, not smooth)."""
    half = n * spacing / 2.0
    origin = (-half, -half, -half)
    axes = [origin[0] + spacing * np.arange(n) for _ in range(3)]

    def for_offsets(ox, oy, oz):
        x = axes[0] + ox * spacing
        y = axes[1] + oy * spacing
        z = axes[2] + oz * spacing
        r2 = (
            x[:, None, None] ** 2 + y[None, :, None] ** 2 + z[None, None, :] ** 2
        )
        return np.where(r2 < radius_nm**2, eps, 1.0)

    return PermittivityGrid(
        spacing=spacing,
        origin=origin,
        eps_ex=for_offsets(0.5, 0.0, 0.0),
        eps_ey=for_offsets(0.0, 0.5, 0.0),
        eps_ez=for_offsets(0.0, 0.0, 0.5),
        index=math.sqrt(eps),
    )


def _avg_eps(a: float, b: float, edges, seg_eps, eps_in: float, eps_out: float) -> float:
    """Mean of a piecewise-constant eps(x) over [a, b]."""
    cuts = [a] + [e for e in edges if a < e < b] + [b]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        if mid < edges[0]:
            e = eps_in
        elif mid >= edges[-1]:
            e = eps_out
        else:
            e = seg_eps[int(np.searchsorted(edges, mid, side="right")) - 1]
        total += e * (hi - lo)
    return total / (b - a)


def _stack_grid_x(
    stack: tmm.LayerStack, spacing: float, pad_nm: float
) -> tuple[PermittivityGrid, float]:
    """1D grid (nx, 1, 1) of a layer stack along x; returns the grid and
    the x coordinate where the first layer starts."""
    x_start = pad_nm
    edges = [x_start]
    seg_eps = []
    for n_layer, d in stack.layers:
        edges.append(edges[-1] + d)
        seg_eps.append(n_layer**2)
    total = edges[-1] + pad_nm
    nx = int(round(total / spacing))
    eps_in = stack.n_in**2
    eps_out = stack.n_out**2

    def sample(offset: float) -> np.ndarray:
        out = np.empty((nx, 1, 1), dtype=np.float64)
        for i in range(nx):
            c = (i + offset) * spacing
            out[i, 0, 0] = _avg_eps(
                c - spacing / 2.0, c + spacing / 2.0, edges, seg_eps, eps_in, eps_out
            )
        return out

    grid = PermittivityGrid(
        spacing=spacing,
        origin=(0.0, 0.0, 0.0),
        eps_ex=sample(0.5),
        eps_ey=sample(0.0),
        eps_ez=sample(0.0),
        index=max(stack.n_in, stack.n_out, *(n for n, _ in stack.layers)),
    )
    return grid, x_start


_1D_BC = (Absorbing(), Periodic(0.0), Periodic(0.0))


def _pulse_speed(eps: float, wavelength_nm: float, bandwidth: float, backend) -> float:
    """Envelope-centroid speed between two probes in a uniform medium."""
    dx = 10.0
    nx = 1500
    grid = _uniform_grid((nx, 1, 1), dx, eps)
    pulse = GaussianPulse(wavelength_nm, bandwidth)
    src = Source((1000.0, 0.5 * dx, 0.0), "ey", waveform=pulse)
    x1, x2 = 4000.0, 12000.0
    probes = [Probe((x1, 0.5 * dx, 0.0), "ey"), Probe((x2, 0.5 * dx, 0.0), "ey")]
    dt = stability_dt(dx, 1, 0.5)
    travel = (x2 - 1000.0) * math.sqrt(eps)
    steps = int((pulse.turn_off_time + travel + 2000.0) / dt)
    cfg = SimulationConfig(num_steps=steps, boundaries=_1D_BC)
    res = run(grid, cfg, src, probes, backend=backend)
    t_c = []
    for rec in res.probes:
        w = np.abs(rec.values) ** 2
        t_c.append(float(np.sum(rec.times * w) / np.sum(w)))
    return (x2 - x1) / (t_c[1] - t_c[0])


def check_vacuum_speed(backend=None) -> CheckResult:
    v = _pulse_speed(1.0, 637.0, 0.3, backend)
    err = abs(v - 1.0)
    return CheckResult("vacuum_speed", err < 0.01, f"c error {err:.2e}", "1e-2")


def check_dielectric_speed(backend=None) -> CheckResult:
    v = _pulse_speed(DIAMOND_N**2, 800.0, 0.2, backend)
    err = abs(v * DIAMOND_N - 1.0)
    return CheckResult(
        "dielectric_speed", err < 0.01, f"c/n error {err:.2e}", "1e-2"
    )


def check_bragg_closed_form(backend=None) -> CheckResult:
    worst = 0.0
    for pairs in range(1, 9):
        stack = tmm.quarter_wave_stack(DIAMOND_N, 1.0, 637.0, pairs)
        r, _ = tmm.stack_rt(stack, 637.0)
        r_ref = tmm.quarter_wave_mirror_reflectance(1.0, DIAMOND_N, 1.0, 1.0, pairs)
        worst = max(worst, abs(r - r_ref))
    return CheckResult(
        "bragg_closed_form", worst < 1e-10, f"max |dR| {worst:.2e}", "1e-10"
    )


def _spectrum(values: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    spec = np.fft.rfft(np.real(values))
    freq = np.fft.rfftfreq(values.size, d=dt)
    return freq, np.abs(spec) ** 2


def check_solver_vs_tmm_spectrum(backend=None) -> CheckResult:
    """R(lambda), T(lambda) of a quarter-wave mirror: solver (two-run
    normalization) against the transfer-matrix oracle, compared across
    the source band (incident power >= half of peak)."""
    dx = 2.0
    stack = tmm.quarter_wave_stack(DIAMOND_N, 1.0, 637.0, 6)
    grid, x_start = _stack_grid_x(stack, dx, pad_nm=800.0)
    ref = _uniform_grid(grid.dims, dx, 1.0)
    pulse = GaussianPulse(637.0, 0.3)
    src = Source((300.0, 0.0, 0.0), "ey", waveform=pulse)
    x_b = x_start + stack.total_thickness + 300.0
    probes = [Probe((500.0, 0.0, 0.0), "ey"), Probe((x_b, 0.0, 0.0), "ey")]
    dt = stability_dt(dx, 1, 0.5)
    steps = int((pulse.turn_off_time + 3.0 * grid.dims[0] * dx) / dt)
    cfg = SimulationConfig(num_steps=steps, boundaries=_1D_BC)
    res_s = run(grid, cfg, src, probes, backend=backend)
    res_r = run(ref, cfg, src, probes, backend=backend)

    freq, p_inc = _spectrum(res_r.probes[0].values, dt)
    _, p_tot = _spectrum(
        np.real(res_s.probes[0].values) - np.real(res_r.probes[0].values), dt
    )
    _, p_trn = _spectrum(res_s.probes[1].values, dt)
    _, p_inc_b = _spectrum(res_r.probes[1].values, dt)

    band = p_inc >= 0.5 * p_inc.max()
    band &= freq > 0
    worst = 0.0
    for i in np.nonzero(band)[0]:
        lam = 1.0 / freq[i]
        r_o, t_o = tmm.stack_rt(stack, lam)
        r_f = p_tot[i] / p_inc[i]
        t_f = p_trn[i] / p_inc_b[i]
        worst = max(worst, abs(r_f - r_o), abs(t_f - t_o))
    return CheckResult(
        "solver_vs_tmm_spectrum", worst < 0.02, f"max |dR,dT| {worst:.2e}", "2e-2"
    )


def check_solver_vs_tmm_defect_q(backend=None) -> CheckResult:
    """Ring-down Q of a mirror-spacer-mirror stack vs the oracle's
    transmission-linewidth Q."""
    dx = 2.0
    stack = tmm.defect_stack(DIAMOND_N, 1.0, 637.0, pairs_per_side=4)
    lam_o, q_o = tmm.stack_resonance(stack, (600.0, 680.0))
    grid, x_start = _stack_grid_x(stack, dx, pad_nm=600.0)
    # spacer is the middle layer
    half = sum(d for _, d in stack.layers[: len(stack.layers) // 2])
    spacer_n, spacer_d = stack.layers[len(stack.layers) // 2]
    x_mid = x_start + half + 0.5 * spacer_d
    pulse = GaussianPulse(lam_o, 0.2)
    src = Source((x_mid + 40.0, 0.0, 0.0), "ey", waveform=pulse)
    probe = Probe((x_mid - 60.0, 0.0, 0.0), "ey")
    dt = stability_dt(dx, 1, 0.5)
    off = int(math.ceil(pulse.turn_off_time / dt))
    steps = off + 16384
    cfg = SimulationConfig(num_steps=steps, boundaries=_1D_BC)
    res = run(grid, cfg, src, [probe], backend=backend)
    modes = harmonic_inversion(
        res.probes[0], (off + 64, steps), (0.9 * lam_o, 1.1 * lam_o)
    )
    if not modes:
        return CheckResult(
            "solver_vs_tmm_defect_q", False, "no mode found", "1e-1"
        )
    err = abs(modes[0].q - q_o) / q_o
    return CheckResult(
        "solver_vs_tmm_defect_q",
        err < 0.10,
        f"Q {modes[0].q:.0f} vs {q_o:.0f} ({err:.1%})",
        "10%",
    )


def check_energy_conservation(backend=None) -> CheckResult:
    """Closed (periodic) lossless box: the staggered energy invariant must
    hold to a relative drift below 1e-6 over 1e4 post-source steps."""
    grid = _sphere_grid(32, 10.0, 60.0, DIAMOND_N**2)
    pulse = GaussianPulse(637.0, 0.3)
    src = Source((15.0, 5.0, 5.0), "ey", waveform=pulse)
    dt = stability_dt(10.0, 3, 0.5)
    off = int(math.ceil(pulse.turn_off_time / dt))
    steps = off + 10_000
    mon = EnergyMonitor("box", kind="conserved", every=50)
    cfg = SimulationConfig(
        num_steps=steps,
        boundaries=(Periodic(0.0), Periodic(0.0), Periodic(0.0)),
    )
    res = run(grid, cfg, src, monitors=[mon], backend=backend)
    tr = res.monitors["box"]
    sel = tr.steps > off
    u = tr.values[sel]
    drift = float(np.max(np.abs(u - u[0])) / u[0])
    return CheckResult(
        "energy_conservation", drift < 1e-6, f"rel drift {drift:.2e}", "1e-6"
    )


def check_courant_ceiling(backend=None) -> CheckResult:
    """Vacuum run at 0.99 of the stability limit stays finite for 1e5 steps."""
    grid = _uniform_grid((24, 24, 24), 10.0, 1.0)
    src = Source((125.0, 115.0, 115.0), "ey", waveform=GaussianPulse(637.0, 0.3))
    cfg = SimulationConfig(
        num_steps=100_000,
        courant_factor=0.99,
        boundaries=(Periodic(0.0), Periodic(0.0), Periodic(0.0)),
    )
    try:
        res = run(grid, cfg, src, [Probe((65.0, 65.0, 65.0), "ey")], backend=backend)
    except Exception as exc:  # InstabilityError or numerical trouble
        return CheckResult("courant_ceiling", False, f"aborted: {exc}", "finite")
    peak = float(np.max(np.abs(res.probes[0].values)))
    ok = math.isfinite(peak)
    return CheckResult("courant_ceiling", ok, f"max |E| {peak:.3g}", "finite")


def check_harmonic_inversion(backend=None) -> CheckResult:
    """Synthetic damped sinusoids with known (lambda, Q)."""
    worst = []
    for q_true, n, q_tol in ((1e5, 8192, 0.01), (1e6, 16384, 0.05)):
        dt = 1.0
        lam = 637.0
        om = 2.0 * math.pi / lam
        t = np.arange(n) * dt
        y = np.exp(-om * t / (2.0 * q_true)) * np.cos(om * t)
        rec = ProbeRecord((0.0, 0.0, 0.0), "ey", dt, y)
        modes = harmonic_inversion(rec, (0, n), (600.0, 680.0))
        if not modes:
            return CheckResult("harmonic_inversion", False, "no mode", "")
        m = modes[0]
        lam_err = abs(m.wavelength_nm - lam) / lam
        q_err = abs(m.q - q_true) / q_true
        worst.append((lam_err, q_err, q_tol))
        if lam_err > 1e-3 or q_err > q_tol:
            return CheckResult(
                "harmonic_inversion",
                False,
                f"Q={q_true:.0e}: lam err {lam_err:.1e}, Q err {q_err:.1e}",
                f"1e-3 / {q_tol}",
            )
    msg = ", ".join(f"Q err {q:.1e} (tol {tol})" for _, q, tol in worst)
    return CheckResult("harmonic_inversion", True, msg, "per-case")


def check_bloch_wraparound(backend=None, fault: str | None = None) -> CheckResult:
    """Periodic unit run must equal a 3x tiled run bit for bit (phase 0).

    With fault="bloch_phase" the unit run's wrap phase is corrupted; the
    check must then fail.
    """
    dx = 10.0
    nx, nt = 16, 3
    phase = 0.3 if fault == "bloch_phase" else 0.0
    small = _uniform_grid((nx, 4, 4), dx)
    big = _uniform_grid((nx * nt, 4, 4), dx)
    pulse = GaussianPulse(637.0, 0.5)
    steps = 300
    off = (55.0, 25.0, 15.0)
    small_cfg = SimulationConfig(
        num_steps=steps,
        boundaries=(Periodic(phase), Periodic(0.0), Periodic(0.0)),
    )
    big_cfg = SimulationConfig(
        num_steps=steps,
        boundaries=(Periodic(0.0), Periodic(0.0), Periodic(0.0)),
    )
    srcs_small = [Source(off, "ey", waveform=pulse)]
    srcs_big = [
        Source((off[0] + i * nx * dx, off[1], off[2]), "ey", waveform=pulse)
        for i in range(nt)
    ]
    p_small = [Probe((95.0, 25.0, 25.0), "ey")]
    p_big = [
        Probe((95.0 + i * nx * dx, 25.0, 25.0), "ey") for i in range(nt)
    ]
    res_s = run(small, small_cfg, srcs_small, p_small, backend=backend)
    res_b = run(big, big_cfg, srcs_big, p_big, backend=backend)
    a = res_s.probes[0].values
    diff = max(
        float(np.max(np.abs(np.real(a) - np.real(b.values))))
        for b in res_b.probes
    )
    if np.iscomplexobj(a):
        diff = max(diff, float(np.max(np.abs(np.imag(a)))))
    return CheckResult(
        "bloch_wraparound", diff == 0.0, f"max |diff| {diff:.2e}", "bitwise"
    )


def check_mirror_equivalence(backend=None) -> CheckResult:
    """Half-domain mirror run vs full-domain run of a symmetric scatterer;
    shared probes must agree to 1e-10 relative."""
    grid = _sphere_grid(36, 10.0, 40.0, DIAMOND_N**2)
    dx = 10.0
    pulse = GaussianPulse(637.0, 0.5)
    base = [Source((15.0, 0.5 * dx, 0.0), "ey", waveform=pulse)]
    probes = [
        Probe((35.0, 0.5 * dx, 20.0), "ey"),
        Probe((20.0, 4 * dx, 10.0), "ez"),
    ]
    steps = 1200
    mirror_cfg = SimulationConfig(
        num_steps=steps,
        boundaries=(Absorbing(), Mirror(parity=-1), Absorbing()),
    )
    full_cfg = SimulationConfig(
        num_steps=steps,
        boundaries=(Absorbing(), Absorbing(), Absorbing()),
    )
    full_sources = expand_sources_full_domain(base, (1, -1, 1), dx, axes=(1,))
    res_h = run(grid, mirror_cfg, base, probes, backend=backend)
    res_f = run(grid, full_cfg, full_sources, probes, backend=backend)
    worst = 0.0
    for rh, rf in zip(res_h.probes, res_f.probes):
        scale = float(np.max(np.abs(rf.values))) or 1.0
        worst = max(
            worst, float(np.max(np.abs(rh.values - rf.values))) / scale
        )
    return CheckResult(
        "mirror_equivalence", worst < 1e-10, f"rel diff {worst:.2e}", "1e-10"
    )


def check_pml_reflection(backend=None) -> CheckResult:
    """Normally incident 1D pulse onto the absorber, each axis in turn:
    reflected power below 1e-6 of incident at the probe."""
    dx = 10.0
    n = 2000
    pol = {0: "ey", 1: "ez", 2: "ex"}
    worst = 0.0
    for axis in range(3):
        dims = [1, 1, 1]
        dims[axis] = n
        grid = _uniform_grid(tuple(dims), dx)
        bcs = [Periodic(0.0), Periodic(0.0), Periodic(0.0)]
        bcs[axis] = Absorbing()
        pulse = GaussianPulse(637.0, 0.3)

        def at(coord):
            pos = [0.0, 0.0, 0.0]
            # transverse half-offsets so the sample sits on the component
            comp = pol[axis]
            offs = {"ex": (0.5, 0, 0), "ey": (0, 0.5, 0), "ez": (0, 0, 0.5)}[comp]
            for a in range(3):
                pos[a] = coord if a == axis else offs[a] * dx
            return tuple(pos)

        src = Source(at(2000.0), pol[axis], waveform=pulse)
        probe = Probe(at(12000.0), pol[axis])
        dt = stability_dt(dx, 1, 0.5)
        t_inc_end = 10_000.0 + pulse.turn_off_time + 1000.0
        t_end = t_inc_end + 2.0 * (n * dx - 120.0 - 12000.0) + 4000.0
        cfg = SimulationConfig(num_steps=int(t_end / dt), boundaries=tuple(bcs))
        res = run(grid, cfg, src, [probe], backend=backend)
        rec = res.probes[0]
        v = np.abs(np.real(rec.values)) ** 2
        split = int(t_inc_end / dt)
        p_inc = float(np.sum(v[:split]))
        p_ref = float(np.sum(v[split:]))
        worst = max(worst, p_ref / p_inc)
    return CheckResult(
        "pml_reflection", worst < 1e-6, f"power ratio {worst:.2e}", "1e-6"
    )


_CHECKS = (
    check_vacuum_speed,
    check_dielectric_speed,
    check_bragg_closed_form,
    check_solver_vs_tmm_spectrum,
    check_solver_vs_tmm_defect_q,
    check_energy_conservation,
    check_courant_ceiling,
    check_harmonic_inversion,
    check_bloch_wraparound,
    check_mirror_equivalence,
    check_pml_reflection,
)


def run_validation(
    backend: str | None = None,
    fault: str | None = None,
    names: tuple[str, ...] | None = None,
) -> ValidationReport:
    """Run the oracle checks (optionally a named subset) and collect a
    report. `fault` feeds the failure-injection hooks."""
    checks = []
    for fn in _CHECKS:
        name = fn.__name__.removeprefix("check_")
        if names is not None and name not in names:
            continue
        if fn is check_bloch_wraparound:
            checks.append(fn(backend=backend, fault=fault))
        else:
            checks.append(fn(backend=backend))
    return ValidationReport(checks)
