"""Resonance extraction from time series and field snapshots.

The workhorse is matrix-pencil harmonic inversion: fit a short ring-down
record as a sum of complex exponentials A_k z_k^n, z_k = exp((i Omega_k -
gamma_k) dt), via an SVD-filtered generalized eigenproblem on shifted
Hankel matrices. Wavelength lambda = 2 pi c / Omega (c = 1 in these
units) and Q = Omega / (2 gamma). This resolves Q far beyond the record
length, where a plain DFT’s resolution limit would be hopeless; the DFT
spectrum is kept as a coarse cross-check and for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fdtd import E_COMPONENTS, OFFSETS, ProbeRecord, Snapshot


class IllConditionedFitError(RuntimeError):
    """Pencil eigenproblem too ill-conditioned to trust."""

    def __init__(self, cond: float):
        self.cond = cond
        super().__init__(
            f"matrix pencil condition number {cond:.3e} exceeds 1e13; "
            "shorten the window, reduce decimation, or lower the model order"
        )


class NoModeFoundError(RuntimeError):
    """No resonance surfaced in the requested band.

    Carries the probe record and analysis window (when available) so the
    caller can dump a diagnostic spectrum.
    """

    def __init__(self, message: str, record=None, window=None):
        super().__init__(message)
        self.record = record
        self.window = window


@dataclass(frozen=True)
class Mode:
    wavelength_nm: float
    q: float
    amplitude: float
    phase: float
    omega: complex  # Omega - i*gamma

    @property
    def decay_rate(self) -> float:
        return -self.omega.imag


def _window_slice(values: np.ndarray, window) -> np.ndarray:
    start, stop = int(window[0]), int(window[1])
    if not (0 <= start < stop <= values.size):
        raise ValueError(f"window {window} outside the record of {values.size} samples")
    return values[start:stop]


def dft_spectrum(record: ProbeRecord, window) -> tuple[np.ndarray, np.ndarray]:
    """Hann-windowed power spectrum of a probe segment.

    Returns (wavelength_nm, power) over the positive-frequency bins,
    wavelength ascending. Resolution is the reciprocal record length;
    use harmonic inversion for linewidths.
    """
    y = _window_slice(record.values, window)
    n = y.size
    if n < 64:
        raise ValueError("need at least 64 samples for a spectrum")
    w = np.hanning(n)
    spec = np.fft.rfft(y * w)
    freq = np.fft.rfftfreq(n, d=record.dt)  # cycles per nm/c
    power = np.abs(spec) ** 2
    keep = freq > 0
    lam = 1.0 / freq[keep]
    return lam[::-1], power[keep][::-1]


def _decimation(n: int, dt: float, lam_min: float, max_samples: int) -> int:
    """Largest stride that keeps >= 4 samples per shortest period and
    shrinks the record toward max_samples."""
    d_alias = max(1, int(math.floor(lam_min / (4.0 * dt))))
    d_size = max(1, int(math.ceil(n / max_samples)))
    return max(1, min(d_alias, d_size))


def matrix_pencil(
    values: np.ndarray,
    dt: float,
    svd_rel_threshold: float = 1e-8,
    max_order: int = 40,
    pencil_fraction: float = 1.0 / 3.0,
) -> list[Mode]:
    """Damped-exponential decomposition of a uniformly sampled series.

    Singular values below svd_rel_threshold * s_max are treated as noise;
    the surviving subspace (capped at max_order) fixes the model order.
    Only positive-frequency poles are returned. Residues come from a
    Vandermonde least-squares solve on the full window.
    """
    y = np.asarray(values)
    n = y.size
    if n < 32:
        raise ValueError("need at least 32 samples for the pencil")
    ell = int(n * pencil_fraction)
    ell = max(8, min(ell, 600, n - 8))
    rows = n - ell
    hank = np.lib.stride_tricks.sliding_window_view(y, ell + 1)[:rows]

    u, s, vh = np.linalg.svd(hank, full_matrices=False)
    if s[0] == 0.0:
        return []
    order = int(np.sum(s > svd_rel_threshold * s[0]))
    order = max(1, min(order, max_order))
    v = vh.conj().T[:, :order]
    v1 = v[:-1, :]
    v2 = v[1:, :]

    sv = np.linalg.svd(v1, compute_uv=False)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    if cond > 1e13:
        raise IllConditionedFitError(float(cond))

    z = np.linalg.eigvals(np.linalg.pinv(v1) @ v2)
    z = z[np.isfinite(z) & (np.abs(z) > 1e-12)]
    if z.size == 0:
        return []

    ln_z = np.log(z)
    omega = ln_z.imag / dt
    gamma = -ln_z.real / dt

    # residues on the full window
    steps = np.arange(n)
    vand = np.exp(np.outer(steps, ln_z))
    resid, *_ = np.linalg.lstsq(vand, y, rcond=None)

    modes = []
    for k in range(z.size):
        if omega[k] <= 0:
            continue  # keep one of each conjugate pair (real input)
        q = omega[k] / (2.0 * abs(gamma[k])) if gamma[k] != 0 else math.inf
        modes.append(
            Mode(
                wavelength_nm=2.0 * math.pi / omega[k],
                q=float(q),
                amplitude=float(np.abs(resid[k])),
                phase=float(np.angle(resid[k])),
                omega=complex(omega[k], -gamma[k]),
            )
        )
    modes.sort(key=lambda m: m.amplitude, reverse=True)
    return modes


def harmonic_inversion(
    record: ProbeRecord,
    window,
    band_nm: tuple[float, float],
    max_samples: int = 2048,
    amplitude_floor: float = 1e-4,
    svd_rel_threshold: float = 1e-8,
    max_order: int = 40,
) -> list[Mode]:
    """Modes of a probe ring-down restricted to a wavelength band.

    The segment is decimated (alias-safely for the band) before the
    pencil. Modes outside band_nm or with amplitude below
    amplitude_floor * (largest in-band amplitude) are dropped; the result
    is sorted by amplitude, dominant first.
    """
    lam_lo, lam_hi = band_nm
    if not (0 < lam_lo < lam_hi):
        raise ValueError("band must satisfy 0 < lam_lo < lam_hi")
    y = _window_slice(record.values, window)
    if y.size < 512:
        raise ValueError("need at least 512 samples for harmonic inversion")
    if record.dt > lam_lo / 2.0:
        raise ValueError("time step too coarse to resolve the requested band")
    d = _decimation(y.size, record.dt, lam_lo, max_samples)
    y = y[::d]
    modes = matrix_pencil(
        y,
        record.dt * d,
        svd_rel_threshold=svd_rel_threshold,
        max_order=max_order,
    )
    in_band = [m for m in modes if lam_lo <= m.wavelength_nm <= lam_hi]
    if not in_band:
        return []
    a_max = max(m.amplitude for m in in_band)
    return [m for m in in_band if m.amplitude >= amplitude_floor * a_max]


def q_from_decay(values: np.ndarray, dt: float, lambda0_nm: float) -> float:
    """Q from the energy ring-down slope: U(t) ~ exp(-omega0 t / Q).

    Least-squares line through ln U against t = k*dt; Q = omega0/|slope|
    with omega0 = 2 pi c / lambda0. Samples at or below zero energy and
    non-decaying traces are rejected.
    """
    u = np.asarray(values, dtype=np.float64)
    if u.size < 4:
        raise ValueError("need at least 4 energy samples")
    if dt <= 0 or lambda0_nm <= 0:
        raise ValueError("dt and lambda0_nm must be positive")
    if np.any(u <= 0):
        raise ValueError("energy trace must be positive for a log fit")
    t = np.arange(u.size, dtype=np.float64) * dt
    slope, _ = np.polyfit(t, np.log(u), 1)
    if slope >= 0:
        raise ValueError("energy trace does not decay; cannot fit a lifetime")
    omega0 = 2.0 * math.pi / lambda0_nm
    return float(omega0 / -slope)


def mode_volume(snapshot: Snapshot, wavelength_nm: float, index: float) -> float:
    """Purcell-convention mode volume in (lambda/n)^3 units.

    V = integral(eps |E|^2) / max(eps |E|^2) on cell-centered energy
    density: each E component is averaged onto cell centers along its
    staggered axes before weighting by the local eps, so the peak search
    and the integral see the same colocated samples. Absorbing-layer
    cells are excluded. Mirror axes contribute their reflected half by
    doubling the integral (cell centers tile the half-domain exactly).
    """
    dom = snapshot.domain
    interior = dom.interior_slices()
    eps_by_comp = {"ex": dom.eps_ex, "ey": dom.eps_ey, "ez": dom.eps_ez}
    fields = {"ex": snapshot.ex, "ey": snapshot.ey, "ez": snapshot.ez}

    u = None
    for c in E_COMPONENTS:
        e = fields[c]
        dens = np.real(eps_by_comp[c] * (e * np.conj(e)))
        # average the two samples adjacent to each cell center along the
        # axes where the component sits on integer planes
        for a in range(3):
            if OFFSETS[c][a] == 0.0:
                lo = [slice(None)] * 3
                hi = [slice(None)] * 3
                lo[a] = slice(0, dens.shape[a] - 1)
                hi[a] = slice(1, dens.shape[a])
                dens = 0.5 * (dens[tuple(lo)] + dens[tuple(hi)])
                pad = [(0, 0)] * 3
                pad[a] = (0, 1)
                dens = np.pad(dens, pad)  # last cell has no partner; zero-pad
        u = dens if u is None else u + dens

    u_in = u[interior]
    peak = float(u_in.max())
    if peak <= 0.0:
        raise ValueError("snapshot contains no field energy")
    dv = dom.spacing**3
    total = float(u_in.sum()) * dv * (2.0 ** sum(dom.mirror_axes))
    v_phys = total / peak
    return v_phys / (wavelength_nm / index) ** 3
