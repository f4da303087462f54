"""Pure-numpy twins of the jitted field kernels.

Every function here performs, element for element, the same floating point
operations in the same order as its numba counterpart, so the two backends
produce bitwise-identical results. This module doubles as the executable
reference for the loop kernels.

Array layout: field arrays carry one ghost cell per face, shape
(nx+2, ny+2, nz+2); interior indices run 1..n inclusive. Coefficient
vectors (axe, aye, ...) are ghost-padded 1D arrays indexed like the
matching field axis.
"""

from __future__ import annotations

import numpy as np

_CORE = (slice(1, -1), slice(1, -1), slice(1, -1))


def update_e(ex, ey, ez, hx, hy, hz, cex, cey, cez, axe, aye, aze):
    """E += (dt/eps) * curl(H), backward differences.

    The 1/(kappa*dx) factors live in axe/aye/aze so the plain update is
    also correct inside graded-kappa absorber regions.
    """
    c = _CORE
    ax = axe[1:-1][:, None, None]
    ay = aye[1:-1][None, :, None]
    az = aze[1:-1][None, None, :]
    ex[c] += cex[c] * (
        (hz[1:-1, 1:-1, 1:-1] - hz[1:-1, :-2, 1:-1]) * ay
        - (hy[1:-1, 1:-1, 1:-1] - hy[1:-1, 1:-1, :-2]) * az
    )
    ey[c] += cey[c] * (
        (hx[1:-1, 1:-1, 1:-1] - hx[1:-1, 1:-1, :-2]) * az
        - (hz[1:-1, 1:-1, 1:-1] - hz[:-2, 1:-1, 1:-1]) * ax
    )
    ez[c] += cez[c] * (
        (hy[1:-1, 1:-1, 1:-1] - hy[:-2, 1:-1, 1:-1]) * ax
        - (hx[1:-1, 1:-1, 1:-1] - hx[1:-1, :-2, 1:-1]) * ay
    )


def update_h(ex, ey, ez, hx, hy, hz, dt, axh, ayh, azh):
    """H -= dt * curl(E), forward differences (adjoint of update_e)."""
    c = _CORE
    ax = axh[1:-1][:, None, None]
    ay = ayh[1:-1][None, :, None]
    az = azh[1:-1][None, None, :]
    hx[c] -= dt * (
        (ez[1:-1, 2:, 1:-1] - ez[1:-1, 1:-1, 1:-1]) * ay
        - (ey[1:-1, 1:-1, 2:] - ey[1:-1, 1:-1, 1:-1]) * az
    )
    hy[c] -= dt * (
        (ex[1:-1, 1:-1, 2:] - ex[1:-1, 1:-1, 1:-1]) * az
        - (ez[2:, 1:-1, 1:-1] - ez[1:-1, 1:-1, 1:-1]) * ax
    )
    hz[c] -= dt * (
        (ey[2:, 1:-1, 1:-1] - ey[1:-1, 1:-1, 1:-1]) * ax
        - (ex[1:-1, 2:, 1:-1] - ex[1:-1, 1:-1, 1:-1]) * ay
    )


# Convolutional absorber recursions. One slab per call; `i0` is the first
# interior index of the slab along the absorbing axis and b/c are the slab
# profile coefficients ordered to match. psi arrays are ghost-padded on the
# transverse axes so indexing matches the fields.


def pml_e_x(ey, ez, hy, hz, cey, cez, psi_y, psi_z, b, c, i0, inv_dx):
    ns = b.shape[0]
    sl = slice(i0, i0 + ns)
    sm = slice(i0 - 1, i0 + ns - 1)
    J, K = slice(1, -1), slice(1, -1)
    bb = b[:, None, None]
    cc = c[:, None, None]
    dhz = (hz[sl, J, K] - hz[sm, J, K]) * inv_dx
    psi_y[:, J, K] = bb * psi_y[:, J, K] + cc * dhz
    ey[sl, J, K] -= cey[sl, J, K] * psi_y[:, J, K]
    dhy = (hy[sl, J, K] - hy[sm, J, K]) * inv_dx
    psi_z[:, J, K] = bb * psi_z[:, J, K] + cc * dhy
    ez[sl, J, K] += cez[sl, J, K] * psi_z[:, J, K]


def pml_h_x(ey, ez, hy, hz, dt, psi_y, psi_z, b, c, i0, inv_dx):
    ns = b.shape[0]
    sl = slice(i0, i0 + ns)
    sp = slice(i0 + 1, i0 + ns + 1)
    J, K = slice(1, -1), slice(1, -1)
    bb = b[:, None, None]
    cc = c[:, None, None]
    dez = (ez[sp, J, K] - ez[sl, J, K]) * inv_dx
    psi_y[:, J, K] = bb * psi_y[:, J, K] + cc * dez
    hy[sl, J, K] += dt * psi_y[:, J, K]
    dey = (ey[sp, J, K] - ey[sl, J, K]) * inv_dx
    psi_z[:, J, K] = bb * psi_z[:, J, K] + cc * dey
    hz[sl, J, K] -= dt * psi_z[:, J, K]


def pml_e_y(ex, ez, hx, hz, cex, cez, psi_x, psi_z, b, c, j0, inv_dx):
    ns = b.shape[0]
    sl = slice(j0, j0 + ns)
    sm = slice(j0 - 1, j0 + ns - 1)
    I, K = slice(1, -1), slice(1, -1)
    bb = b[None, :, None]
    cc = c[None, :, None]
    dhz = (hz[I, sl, K] - hz[I, sm, K]) * inv_dx
    psi_x[I, :, K] = bb * psi_x[I, :, K] + cc * dhz
    ex[I, sl, K] += cex[I, sl, K] * psi_x[I, :, K]
    dhx = (hx[I, sl, K] - hx[I, sm, K]) * inv_dx
    psi_z[I, :, K] = bb * psi_z[I, :, K] + cc * dhx
    ez[I, sl, K] -= cez[I, sl, K] * psi_z[I, :, K]


def pml_h_y(ex, ez, hx, hz, dt, psi_x, psi_z, b, c, j0, inv_dx):
    ns = b.shape[0]
    sl = slice(j0, j0 + ns)
    sp = slice(j0 + 1, j0 + ns + 1)
    I, K = slice(1, -1), slice(1, -1)
    bb = b[None, :, None]
    cc = c[None, :, None]
    dez = (ez[I, sp, K] - ez[I, sl, K]) * inv_dx
    psi_x[I, :, K] = bb * psi_x[I, :, K] + cc * dez
    hx[I, sl, K] -= dt * psi_x[I, :, K]
    dex = (ex[I, sp, K] - ex[I, sl, K]) * inv_dx
    psi_z[I, :, K] = bb * psi_z[I, :, K] + cc * dex
    hz[I, sl, K] += dt * psi_z[I, :, K]


def pml_e_z(ex, ey, hx, hy, cex, cey, psi_x, psi_y, b, c, k0, inv_dx):
    ns = b.shape[0]
    sl = slice(k0, k0 + ns)
    sm = slice(k0 - 1, k0 + ns - 1)
    I, J = slice(1, -1), slice(1, -1)
    bb = b[None, None, :]
    cc = c[None, None, :]
    dhy = (hy[I, J, sl] - hy[I, J, sm]) * inv_dx
    psi_x[I, J, :] = bb * psi_x[I, J, :] + cc * dhy
    ex[I, J, sl] -= cex[I, J, sl] * psi_x[I, J, :]
    dhx = (hx[I, J, sl] - hx[I, J, sm]) * inv_dx
    psi_y[I, J, :] = bb * psi_y[I, J, :] + cc * dhx
    ey[I, J, sl] += cey[I, J, sl] * psi_y[I, J, :]


def pml_h_z(ex, ey, hx, hy, dt, psi_x, psi_y, b, c, k0, inv_dx):
    ns = b.shape[0]
    sl = slice(k0, k0 + ns)
    sp = slice(k0 + 1, k0 + ns + 1)
    I, J = slice(1, -1), slice(1, -1)
    bb = b[None, None, :]
    cc = c[None, None, :]
    dey = (ey[I, J, sp] - ey[I, J, sl]) * inv_dx
    psi_x[I, J, :] = bb * psi_x[I, J, :] + cc * dey
    hx[I, J, sl] += dt * psi_x[I, J, :]
    dex = (ex[I, J, sp] - ex[I, J, sl]) * inv_dx
    psi_y[I, J, :] = bb * psi_y[I, J, :] + cc * dex
    hy[I, J, sl] -= dt * psi_y[I, J, :]


def plane_coverage(xsamp, ysamp, hole_x, hole_r2, half_width, counts):
    """Count subcell sample points lying inside the beam material.

    xsamp/ysamp hold per-cell sample coordinates, shape (ncells, K).
    A point is material when y^2 < half_width^2 and it is outside every
    hole. Integer counts land in `counts` (ncells_x, ncells_y).
    """
    nxc, kx = xsamp.shape
    nyc, ky = ysamp.shape
    x = xsamp.reshape(nxc * kx, 1)
    y = ysamp.reshape(1, nyc * ky)
    hw2 = half_width * half_width
    inside = np.broadcast_to(y * y < hw2, (nxc * kx, nyc * ky)).copy()
    for h in range(hole_x.shape[0]):
        dxh = x - hole_x[h]
        inside &= ~(dxh * dxh + y * y < hole_r2[h])
    counts[:, :] = inside.reshape(nxc, kx, nyc, ky).sum(axis=(1, 3))
