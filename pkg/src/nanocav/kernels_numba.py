"""Numba-jitted field kernels.

Loop twins of kernels_numpy; see that module for layout and sign
conventions. Kernels compile lazily per dtype (float64 grids and
complex128 Bloch grids both pass through the same source).
"""

from __future__ import annotations

import numba
import numpy as np  # noqa: F401  (kept for parity with the numpy module)

_JIT = dict(cache=True, fastmath=False)


@numba.njit(**_JIT)
def update_e(ex, ey, ez, hx, hy, hz, cex, cey, cez, axe, aye, aze):
    nx = ex.shape[0] - 2
    ny = ex.shape[1] - 2
    nz = ex.shape[2] - 2
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for k in range(1, nz + 1):
                ex[i, j, k] += cex[i, j, k] * (
                    (hz[i, j, k] - hz[i, j - 1, k]) * aye[j]
                    - (hy[i, j, k] - hy[i, j, k - 1]) * aze[k]
                )
                ey[i, j, k] += cey[i, j, k] * (
                    (hx[i, j, k] - hx[i, j, k - 1]) * aze[k]
                    - (hz[i, j, k] - hz[i - 1, j, k]) * axe[i]
                )
                ez[i, j, k] += cez[i, j, k] * (
                    (hy[i, j, k] - hy[i - 1, j, k]) * axe[i]
                    - (hx[i, j, k] - hx[i, j - 1, k]) * aye[j]
                )


@numba.njit(**_JIT)
def update_h(ex, ey, ez, hx, hy, hz, dt, axh, ayh, azh):
    nx = ex.shape[0] - 2
    ny = ex.shape[1] - 2
    nz = ex.shape[2] - 2
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for k in range(1, nz + 1):
                hx[i, j, k] -= dt * (
                    (ez[i, j + 1, k] - ez[i, j, k]) * ayh[j]
                    - (ey[i, j, k + 1] - ey[i, j, k]) * azh[k]
                )
                hy[i, j, k] -= dt * (
                    (ex[i, j, k + 1] - ex[i, j, k]) * azh[k]
                    - (ez[i + 1, j, k] - ez[i, j, k]) * axh[i]
                )
                hz[i, j, k] -= dt * (
                    (ey[i + 1, j, k] - ey[i, j, k]) * axh[i]
                    - (ex[i, j + 1, k] - ex[i, j, k]) * ayh[j]
                )


@numba.njit(**_JIT)
def pml_e_x(ey, ez, hy, hz, cey, cez, psi_y, psi_z, b, c, i0, inv_dx):
    ns = b.shape[0]
    ny = ey.shape[1] - 2
    nz = ey.shape[2] - 2
    for s in range(ns):
        i = i0 + s
        for j in range(1, ny + 1):
            for k in range(1, nz + 1):
                dhz = (hz[i, j, k] - hz[i - 1, j, k]) * inv_dx
                psi_y[s, j, k] = b[s] * psi_y[s, j, k] + c[s] * dhz
                ey[i, j, k] -= cey[i, j, k] * psi_y[s, j, k]
                dhy = (hy[i, j, k] - hy[i - 1, j, k]) * inv_dx
                psi_z[s, j, k] = b[s] * psi_z[s, j, k] + c[s] * dhy
                ez[i, j, k] += cez[i, j, k] * psi_z[s, j, k]


@numba.njit(**_JIT)
def pml_h_x(ey, ez, hy, hz, dt, psi_y, psi_z, b, c, i0, inv_dx):
    ns = b.shape[0]
    ny = ey.shape[1] - 2
    nz = ey.shape[2] - 2
    for s in range(ns):
        i = i0 + s
        for j in range(1, ny + 1):
            for k in range(1, nz + 1):
                dez = (ez[i + 1, j, k] - ez[i, j, k]) * inv_dx
                psi_y[s, j, k] = b[s] * psi_y[s, j, k] + c[s] * dez
                hy[i, j, k] += dt * psi_y[s, j, k]
                dey = (ey[i + 1, j, k] - ey[i, j, k]) * inv_dx
                psi_z[s, j, k] = b[s] * psi_z[s, j, k] + c[s] * dey
                hz[i, j, k] -= dt * psi_z[s, j, k]


@numba.njit(**_JIT)
def pml_e_y(ex, ez, hx, hz, cex, cez, psi_x, psi_z, b, c, j0, inv_dx):
    ns = b.shape[0]
    nx = ex.shape[0] - 2
    nz = ex.shape[2] - 2
    for i in range(1, nx + 1):
        for s in range(ns):
            j = j0 + s
            for k in range(1, nz + 1):
                dhz = (hz[i, j, k] - hz[i, j - 1, k]) * inv_dx
                psi_x[i, s, k] = b[s] * psi_x[i, s, k] + c[s] * dhz
                ex[i, j, k] += cex[i, j, k] * psi_x[i, s, k]
                dhx = (hx[i, j, k] - hx[i, j - 1, k]) * inv_dx
                psi_z[i, s, k] = b[s] * psi_z[i, s, k] + c[s] * dhx
                ez[i, j, k] -= cez[i, j, k] * psi_z[i, s, k]


@numba.njit(**_JIT)
def pml_h_y(ex, ez, hx, hz, dt, psi_x, psi_z, b, c, j0, inv_dx):
    ns = b.shape[0]
    nx = ex.shape[0] - 2
    nz = ex.shape[2] - 2
    for i in range(1, nx + 1):
        for s in range(ns):
            j = j0 + s
            for k in range(1, nz + 1):
                dez = (ez[i, j + 1, k] - ez[i, j, k]) * inv_dx
                psi_x[i, s, k] = b[s] * psi_x[i, s, k] + c[s] * dez
                hx[i, j, k] -= dt * psi_x[i, s, k]
                dex = (ex[i, j + 1, k] - ex[i, j, k]) * inv_dx
                psi_z[i, s, k] = b[s] * psi_z[i, s, k] + c[s] * dex
                hz[i, j, k] += dt * psi_z[i, s, k]


@numba.njit(**_JIT)
def pml_e_z(ex, ey, hx, hy, cex, cey, psi_x, psi_y, b, c, k0, inv_dx):
    ns = b.shape[0]
    nx = ex.shape[0] - 2
    ny = ex.shape[1] - 2
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for s in range(ns):
                k = k0 + s
                dhy = (hy[i, j, k] - hy[i, j, k - 1]) * inv_dx
                psi_x[i, j, s] = b[s] * psi_x[i, j, s] + c[s] * dhy
                ex[i, j, k] -= cex[i, j, k] * psi_x[i, j, s]
                dhx = (hx[i, j, k] - hx[i, j, k - 1]) * inv_dx
                psi_y[i, j, s] = b[s] * psi_y[i, j, s] + c[s] * dhx
                ey[i, j, k] += cey[i, j, k] * psi_y[i, j, s]


@numba.njit(**_JIT)
def pml_h_z(ex, ey, hx, hy, dt, psi_x, psi_y, b, c, k0, inv_dx):
    ns = b.shape[0]
    nx = ex.shape[0] - 2
    ny = ex.shape[1] - 2
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for s in range(ns):
                k = k0 + s
                dey = (ey[i, j, k + 1] - ey[i, j, k]) * inv_dx
                psi_x[i, j, s] = b[s] * psi_x[i, j, s] + c[s] * dey
                hx[i, j, k] += dt * psi_x[i, j, s]
                dex = (ex[i, j, k + 1] - ex[i, j, k]) * inv_dx
                psi_y[i, j, s] = b[s] * psi_y[i, j, s] + c[s] * dex
                hy[i, j, k] -= dt * psi_y[i, j, s]


@numba.njit(**_JIT)
def plane_coverage(xsamp, ysamp, hole_x, hole_r2, half_width, counts):
    nxc, kx = xsamp.shape
    nyc, ky = ysamp.shape
    nh = hole_x.shape[0]
    hw2 = half_width * half_width
    for ic in range(nxc):
        for jc in range(nyc):
            n_in = 0
            for a in range(kx):
                x = xsamp[ic, a]
                for bb in range(ky):
                    y = ysamp[jc, bb]
                    if y * y < hw2:
                        keep = True
                        for h in range(nh):
                            dxh = x - hole_x[h]
                            if dxh * dxh + y * y < hole_r2[h]:
                                keep = False
                                break
                        if keep:
                            n_in += 1
            counts[ic, jc] = n_in
