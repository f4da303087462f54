"""Convolutional absorbing-layer profiles and update coefficients.

Graded conductivity sigma(u) = sigma_max * u^m over the layer depth, with
sigma_max = -(m+1) ln(R0) / (2 * L) for target normal-incidence reflection
R0 over depth L (impedance 1 in these units). Per-sample recursion
coefficients follow the standard convolutional form

    b = exp(-(sigma/kappa + alpha) dt)
    c = sigma (b - 1) / (kappa (sigma + kappa alpha))

evaluated at integer grid planes for the E-side update and half planes for
the H-side. kappa defaults to 1 everywhere (no coordinate stretching), in
which case the inverse-kappa arrays are uniform 1/dx.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AbsorberSpec:
    """Absorbing boundary parameters for one axis side pair."""

    layers: int = 12
    grading_order: float = 3.0
    target_reflection: float = 1e-8
    kappa_max: float = 1.0
    alpha_max: float = 0.0

    def __post_init__(self):
        if self.layers < 8:
            raise ValueError("absorbing boundaries need at least 8 layers")
        if not (0 < self.target_reflection < 1):
            raise ValueError("target reflection must lie in (0, 1)")
        if self.grading_order < 1:
            raise ValueError("grading order must be >= 1")
        if self.kappa_max < 1:
            raise ValueError("kappa_max must be >= 1")


def _profile(u: np.ndarray, spec: AbsorberSpec, dx: float, dt: float):
    """b, c, kappa at fractional depths u (0 at interface, 1 at wall)."""
    m = spec.grading_order
    sigma_max = -(m + 1) * np.log(spec.target_reflection) / (2.0 * spec.layers * dx)
    sigma = sigma_max * u**m
    kappa = 1.0 + (spec.kappa_max - 1.0) * u**m
    alpha = spec.alpha_max * (1.0 - u)
    b = np.exp(-(sigma / kappa + alpha) * dt)
    denom = kappa * (sigma + kappa * alpha)
    c = np.zeros_like(sigma)
    nz = denom > 0
    c[nz] = sigma[nz] * (b[nz] - 1.0) / denom[nz]
    return b, c, kappa


@dataclass
class AxisAbsorber:
    """Precomputed slab coefficients for one absorbing axis.

    Slab arrays are indexed by depth sample s; `lo`/`hi` flag which sides
    absorb. inv_kappa_e / inv_kappa_h fold 1/(kappa dx) for the whole axis
    (ghost-padded, so they index like the matching field axis).
    """

    layers: int
    lo: bool
    hi: bool
    be_lo: np.ndarray = field(default=None, repr=False)
    ce_lo: np.ndarray = field(default=None, repr=False)
    bh_lo: np.ndarray = field(default=None, repr=False)
    ch_lo: np.ndarray = field(default=None, repr=False)
    be_hi: np.ndarray = field(default=None, repr=False)
    ce_hi: np.ndarray = field(default=None, repr=False)
    bh_hi: np.ndarray = field(default=None, repr=False)
    ch_hi: np.ndarray = field(default=None, repr=False)
    inv_kappa_e: np.ndarray = field(default=None, repr=False)
    inv_kappa_h: np.ndarray = field(default=None, repr=False)


def build_axis_absorber(
    n: int,
    dx: float,
    dt: float,
    spec: AbsorberSpec,
    lo: bool,
    hi: bool,
) -> AxisAbsorber:
    npml = spec.layers
    if (lo + hi) * npml >= n:
        raise ValueError(
            f"axis with {n} cells cannot host {npml}-layer absorbers on "
            f"{'both sides' if lo and hi else 'one side'}"
        )
    ax = AxisAbsorber(layers=npml, lo=lo, hi=hi)
    inv_ke = np.full(n + 2, 1.0 / dx)
    inv_kh = np.full(n + 2, 1.0 / dx)
    s = np.arange(npml, dtype=np.float64)
    if lo:
        # slab cell s has interior index i = 1 + s; integer plane depth
        # (npml - s)/npml, half plane depth (npml - s - 1/2)/npml
        u_e = (npml - s) / npml
        u_h = (npml - s - 0.5) / npml
        ax.be_lo, ax.ce_lo, k_e = _profile(u_e, spec, dx, dt)
        ax.bh_lo, ax.ch_lo, k_h = _profile(u_h, spec, dx, dt)
        inv_ke[1 : npml + 1] = 1.0 / (k_e * dx)
        inv_kh[1 : npml + 1] = 1.0 / (k_h * dx)
    if hi:
        # slab cell s has interior index i = n - npml + 1 + s
        u_e = s / npml
        u_h = (s + 0.5) / npml
        ax.be_hi, ax.ce_hi, k_e = _profile(u_e, spec, dx, dt)
        ax.bh_hi, ax.ch_hi, k_h = _profile(u_h, spec, dx, dt)
        inv_ke[n - npml + 1 : n + 1] = 1.0 / (k_e * dx)
        inv_kh[n - npml + 1 : n + 1] = 1.0 / (k_h * dx)
    ax.inv_kappa_e = inv_ke
    ax.inv_kappa_h = inv_kh
    return ax
