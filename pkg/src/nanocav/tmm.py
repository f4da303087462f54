"""1D transfer-matrix oracle for layered dielectric stacks.

Normal incidence, lossless non-magnetic layers between semi-infinite
entry/exit media. Used as the independent reference the FDTD solver is
validated against, and for closed-form mirror reflectances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LayerStack:
    """Finite stack: semi-infinite n_in | layers (n, d_nm) ... | n_out."""

    n_in: float
    n_out: float
    layers: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1:
            raise ValueError("entry/exit indices must be >= 1")
        for n, d in self.layers:
            if n < 1:
                raise ValueError("layer index must be >= 1")
            if d <= 0:
                raise ValueError("layer thickness must be positive")

    @property
    def total_thickness(self) -> float:
        return sum(d for _, d in self.layers)


def _characteristic_matrix(stack: LayerStack, lam: float) -> np.ndarray:
    m = np.eye(2, dtype=np.complex128)
    for n, d in stack.layers:
        delta = 2.0 * math.pi * n * d / lam
        c, s = math.cos(delta), math.sin(delta)
        m = m @ np.array([[c, 1j * s / n], [1j * n * s, c]], dtype=np.complex128)
    return m


def stack_rt(stack: LayerStack, lam: float) -> tuple[float, float]:
    """Power reflectance and transmittance at wavelength lam (nm).

    R + T == 1 to roundoff for these lossless stacks.
    """
    if lam <= 0:
        raise ValueError("wavelength must be positive")
    m = _characteristic_matrix(stack, lam)
    ni, no = stack.n_in, stack.n_out
    b = m[0, 0] + m[0, 1] * no
    c = m[1, 0] + m[1, 1] * no
    denom = ni * b + c
    r = (ni * b - c) / denom
    t = 2.0 * ni / denom
    big_r = float(np.abs(r) ** 2)
    big_t = float((no / ni) * np.abs(t) ** 2)
    return big_r, big_t


def fresnel_normal(n1: float, n2: float) -> float:
    """Single-interface power reflectance ((n1-n2)/(n1+n2))^2."""
    return ((n1 - n2) / (n1 + n2)) ** 2


def quarter_wave_layer(n: float, lam0: float) -> tuple[float, float]:
    return (n, lam0 / (4.0 * n))


def quarter_wave_stack(
    n_h: float,
    n_l: float,
    lam0: float,
    pairs: int,
    n_in: float = 1.0,
    n_out: float = 1.0,
) -> LayerStack:
    """pairs x (high, low) quarter-wave mirror tuned to lam0."""
    layers = []
    for _ in range(pairs):
        layers.append(quarter_wave_layer(n_h, lam0))
        layers.append(quarter_wave_layer(n_l, lam0))
    return LayerStack(n_in=n_in, n_out=n_out, layers=tuple(layers))


def quarter_wave_mirror_reflectance(
    n_in: float, n_h: float, n_l: float, n_out: float, pairs: int
) -> float:
    """Closed-form design-wavelength reflectance of a quarter-wave mirror.

    Each (H, L) pair transforms the exit admittance by (n_h/n_l)^2, so
    Y = (n_h/n_l)^(2*pairs) * n_out and R = ((n_in - Y)/(n_in + Y))^2.
    """
    y = (n_h / n_l) ** (2 * pairs) * n_out
    return ((n_in - y) / (n_in + y)) ** 2


def defect_stack(
    n_h: float,
    n_l: float,
    lam0: float,
    pairs_per_side: int,
    spacer_n: float = 1.0,
    spacer_halves: int = 1,
    n_in: float = 1.0,
    n_out: float = 1.0,
) -> LayerStack:
    """Two quarter-wave mirrors around a half-wave (xN) spacer."""
    mirror = []
    for _ in range(pairs_per_side):
        mirror.append(quarter_wave_layer(n_h, lam0))
        mirror.append(quarter_wave_layer(n_l, lam0))
    spacer = (spacer_n, spacer_halves * lam0 / (2.0 * spacer_n))
    layers = tuple(mirror) + (spacer,) + tuple(mirror[::-1])
    return LayerStack(n_in=n_in, n_out=n_out, layers=layers)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Golden-section maximizer of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def stack_resonance(
    stack: LayerStack, band_nm: tuple[float, float], scan_points: int = 400
) -> tuple[float, float]:
    """Transmission resonance (lam_res, Q) inside band_nm.

    Coarse scan locates the tallest transmission peak, golden-section
    refines it, and Q = lam_res / FWHM with the half-max crossings found
    by bisection on either side.
    """
    lo, hi = band_nm
    if not (0 < lo < hi):
        raise ValueError("band must satisfy 0 < lo < hi")
    lam = np.linspace(lo, hi, scan_points)
    t = np.array([stack_rt(stack, x)[1] for x in lam])
    i = int(np.argmax(t))
    if i == 0 or i == scan_points - 1:
        raise ValueError("transmission peak sits on the band edge; widen the band")

    def tfun(x):
        return stack_rt(stack, x)[1]

    lam_res = _golden_max(tfun, lam[i - 1], lam[i + 1])
    t_peak = tfun(lam_res)
    half = 0.5 * t_peak

    def _cross(a, b):
        fa = tfun(a) - half
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = tfun(m) - half
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
            if abs(b - a) < 1e-9:
                break
        return 0.5 * (a + b)

    # walk outward until transmission drops below half max
    step = (hi - lo) / scan_points
    right = lam_res + step
    while tfun(right) > half:
        right += step
        if right > hi + (hi - lo):
            raise ValueError("could not bracket the right half-max crossing")
    left = lam_res - step
    while tfun(left) > half:
        left -= step
        if left < lo - (hi - lo):
            raise ValueError("could not bracket the left half-max crossing")
    lam_hi = _cross(lam_res, right)
    lam_lo = _cross(lam_res, left)
    fwhm = abs(lam_hi - lam_lo)
    if fwhm <= 0:
        raise ValueError("degenerate resonance width")
    return float(lam_res), float(lam_res / fwhm)
