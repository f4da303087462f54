"""Parametric nanobeam geometry and staggered permittivity grids.

Lengths are nanometers throughout. The beam axis is x, the width direction
is y, the thickness direction is z. The structure sits centered on the
origin: a rectangular beam of index n, infinite along x (it runs through
the absorbing layers), with a row of cylindrical air holes drilled along z
through the full thickness. Hole spacing tapers linearly from the mirror
period a0 down to a_N at the cavity center, and a hole-free gap of width s
(edge to edge between the two innermost holes) forms the defect.

Permittivity grids are sampled on the Yee lattice: one array per E
component at that component's staggered position, volume-averaged over a
KxK xK subcell grid so hole edges land smoothly between cells. Subcell
sample coordinates are built from exact integer numerators so a mirrored
index produces the exactly negated coordinate; grids built this way are
bitwise mirror-symmetric about all three midplanes.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import backends

SUBCELL = 4  # K: subcell samples per axis for permittivity averaging


@dataclass(frozen=True)
class DeviceSpec:
    """Nanobeam cavity design parameters."""

    thickness_nm: float = 150.0
    width_nm: float = 264.0
    refractive_index: float = 2.4
    mirror_period_nm: float = 225.0
    taper_end_period_nm: float = 179.0
    radius_ratio: float = 0.28
    mirror_pairs: int = 15
    taper_holes: int = 5
    cavity_gap_nm: float = 82.0

    def __post_init__(self):
        if self.thickness_nm <= 0 or self.width_nm <= 0:
            raise ValueError("beam cross-section must be positive")
        if self.refractive_index < 1.0:
            raise ValueError("refractive index must be >= 1")
        if not (0.0 < self.radius_ratio < 0.5):
            raise ValueError("radius_ratio must lie in (0, 0.5)")
        if self.mirror_period_nm <= 0 or self.taper_end_period_nm <= 0:
            raise ValueError("periods must be positive")
        if self.taper_end_period_nm > self.mirror_period_nm:
            raise ValueError("taper end period must not exceed the mirror period")
        if self.mirror_pairs < 0 or self.taper_holes < 0:
            raise ValueError("hole counts must be non-negative")
        if self.cavity_gap_nm < 0:
            raise ValueError("cavity gap must be non-negative")

    @property
    def eps(self) -> float:
        return self.refractive_index**2

    @property
    def mirror_radius_nm(self) -> float:
        return self.radius_ratio * self.mirror_period_nm

    def with_gap(self, s_nm: float) -> "DeviceSpec":
        return dataclasses.replace(self, cavity_gap_nm=s_nm)

    def untapered(self) -> "DeviceSpec":
        """Same hole count with the taper removed (all holes at a0)."""
        return dataclasses.replace(
            self,
            mirror_pairs=self.mirror_pairs + self.taper_holes,
            taper_holes=0,
            taper_end_period_nm=self.mirror_period_nm,
        )


def taper_profile(a0: float, a_end: float, n: int) -> np.ndarray:
    """Linearly interpolated hole periods a_1..a_n from a0 down to a_end.

    a_k = a0 - k*(a0 - a_end)/n, so a_n == a_end exactly and a_0 (== a0)
    is not included in the returned array.
    """
    if n < 0:
        raise ValueError("taper hole count must be non-negative")
    if n == 0:
        return np.empty(0, dtype=np.float64)
    if a_end > a0:
        raise ValueError("taper must not increase the period")
    k = np.arange(1, n + 1, dtype=np.float64)
    return a0 - k * ((a0 - a_end) / n)


@dataclass(frozen=True)
class HoleList:
    """Hole centers (nm, ascending along x) and radii for the full beam."""

    x: np.ndarray
    r: np.ndarray

    @property
    def count(self) -> int:
        return int(self.x.size)

    def extent_nm(self) -> float:
        """Distance from the origin to the outer edge of the outermost hole."""
        if self.count == 0:
            return 0.0
        return float(np.max(np.abs(self.x) + self.r))

    def min_radius_nm(self) -> float:
        return float(self.r.min()) if self.count else math.inf


def build_hole_list(spec: DeviceSpec) -> HoleList:
    """Lay out both hole rows from the cavity gap outward.

    The innermost hole on each side sits with its inner edge at x = +-s/2.
    Walking outward, the gap between consecutive hole centers is the taper
    period of the inner hole (a_N nearest the cavity, then a_N-1, ...),
    followed by the mirror period a0. Hole radii follow radius_ratio times
    the period they belong to.
    """
    taper = taper_profile(
        spec.mirror_period_nm, spec.taper_end_period_nm, spec.taper_holes
    )
    # periods from the cavity outward: a_N, a_N-1, ..., a_1, then a0 repeated
    periods_out = list(taper[::-1]) + [spec.mirror_period_nm] * spec.mirror_pairs
    n_side = spec.taper_holes + spec.mirror_pairs
    if n_side == 0:
        return HoleList(x=np.empty(0), r=np.empty(0))

    radii = np.array([spec.radius_ratio * p for p in periods_out])
    centers = np.empty(n_side)
    centers[0] = spec.cavity_gap_nm / 2.0 + radii[0]
    for i in range(1, n_side):
        centers[i] = centers[i - 1] + periods_out[i - 1]

    gaps = np.diff(centers) - (radii[:-1] + radii[1:])
    bad = np.nonzero(gaps < -1e-9)[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"holes {i} and {i + 1} interpenetrate "
            f"(center spacing {centers[i + 1] - centers[i]:.3f} nm < "
            f"radius sum {radii[i] + radii[i + 1]:.3f} nm)"
        )

    x = np.concatenate([-centers[::-1], centers])
    r = np.concatenate([radii[::-1], radii])
    return HoleList(x=x, r=r)


def write_holes_csv(holes: HoleList, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["index", "x_nm", "radius_nm"])
        for i in range(holes.count):
            w.writerow([i, "%.17g" % holes.x[i], "%.17g" % holes.r[i]])


@dataclass
class PermittivityGrid:
    """Relative permittivity sampled at the three E-component positions.

    Arrays have shape (nx, ny, nz) indexed by cell; eps_ex lives at
    (i+1/2, j, k), eps_ey at (i, j+1/2, k), eps_ez at (i, j, k+1/2) in
    units of `spacing`, relative to `origin` (position of integer index 0
    on each axis, i.e. the low corner cell's integer planes).
    """

    spacing: float
    origin: tuple[float, float, float]
    eps_ex: np.ndarray
    eps_ey: np.ndarray
    eps_ez: np.ndarray
    index: float  # highest material index present, for diagnostics

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.eps_ex.shape

    def validate(self) -> None:
        lo, hi = 1.0, self.index**2
        for name in ("eps_ex", "eps_ey", "eps_ez"):
            a = getattr(self, name)
            if a.min() < lo - 1e-12 or a.max() > hi + 1e-12:
                raise ValueError(f"{name} outside [1, n^2]")


def _sample_coords(n: int, staggered: bool, dx: float, k: int) -> np.ndarray:
    """Subcell sample coordinates for each of n cells, shape (n, k).

    Component positions sit at (i + 1/2)*dx - n*dx/2 when staggered on the
    axis, i*dx - n*dx/2 otherwise; the averaging cell is the dx-wide
    interval centered there. Coordinates are exact integer multiples of
    dx/(2k), and the numerator of cell n-1-i (staggered) or n-i (integer)
    is the exact negation of cell i's, which is what makes mirrored grids
    bitwise symmetric.
    """
    i = np.arange(n, dtype=np.int64)[:, None]
    m = np.arange(k, dtype=np.int64)[None, :]
    if staggered:
        numer = (2 * i - n) * k + 2 * m + 1
    else:
        numer = (2 * i - n - 1) * k + 2 * m + 1
    return numer * (dx / (2 * k))


def _interval_coverage(samples: np.ndarray, half_extent: float) -> np.ndarray:
    """Fraction of each cell's samples with |coord| < half_extent."""
    k = samples.shape[1]
    return (np.abs(samples) < half_extent).sum(axis=1) / float(k)


def _plane_fraction(
    xs: np.ndarray,
    ys: np.ndarray,
    holes: HoleList,
    half_width: float,
    backend: str | None,
) -> np.ndarray:
    kern = backends.get_kernels(backend)
    counts = np.zeros((xs.shape[0], ys.shape[0]), dtype=np.int64)
    kern.plane_coverage(
        np.ascontiguousarray(xs),
        np.ascontiguousarray(ys),
        np.ascontiguousarray(holes.x, dtype=np.float64),
        np.ascontiguousarray(holes.r * holes.r, dtype=np.float64),
        half_width,
        counts,
    )
    return counts / float(xs.shape[1] * ys.shape[1])


def _assemble_grid(
    spec: DeviceSpec,
    holes: HoleList,
    spacing: float,
    dims: tuple[int, int, int],
    backend: str | None,
) -> PermittivityGrid:
    nx, ny, nz = dims
    if holes.count and spacing > holes.min_radius_nm():
        raise ValueError(
            f"grid spacing {spacing} nm exceeds the smallest hole radius "
            f"{holes.min_radius_nm():.3f} nm; holes would be unresolved"
        )
    k = SUBCELL
    xs_h = _sample_coords(nx, True, spacing, k)
    xs_i = _sample_coords(nx, False, spacing, k)
    ys_h = _sample_coords(ny, True, spacing, k)
    ys_i = _sample_coords(ny, False, spacing, k)
    zs_h = _sample_coords(nz, True, spacing, k)
    zs_i = _sample_coords(nz, False, spacing, k)

    wh = spec.width_nm / 2.0
    th = spec.thickness_nm / 2.0
    # the beam is an extrusion along z, so the volume fraction factorizes
    # exactly into (x, y) plane coverage times z interval coverage
    f_ex = _plane_fraction(xs_h, ys_i, holes, wh, backend)
    f_ey = _plane_fraction(xs_i, ys_h, holes, wh, backend)
    f_ez = _plane_fraction(xs_i, ys_i, holes, wh, backend)
    g_i = _interval_coverage(zs_i, th)
    g_h = _interval_coverage(zs_h, th)

    de = spec.eps - 1.0

    def mix(fxy, gz):
        return 1.0 + de * (fxy[:, :, None] * gz[None, None, :])

    grid = PermittivityGrid(
        spacing=spacing,
        origin=(-nx * spacing / 2.0, -ny * spacing / 2.0, -nz * spacing / 2.0),
        eps_ex=mix(f_ex, g_i),
        eps_ey=mix(f_ey, g_i),
        eps_ez=mix(f_ez, g_h),
        index=spec.refractive_index,
    )
    grid.validate()
    return grid


def _even_cells(half_extent_nm: float, spacing: float) -> int:
    return 2 * int(math.ceil(half_extent_nm / spacing - 1e-9))


def rasterize(
    holes: HoleList,
    spec: DeviceSpec,
    spacing: float,
    padding_nm: tuple[float, float, float],
    backend: str | None = None,
) -> PermittivityGrid:
    """Permittivity grid for the full cavity, centered on the origin.

    padding_nm is the clearance added beyond the structure per axis (x:
    past the outermost hole edge; y/z: past the beam surface) and should
    already include any absorbing-layer depth. Cell counts come out even
    so every midplane is a mirror plane of the lattice.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    px, py, pz = padding_nm
    half_x = holes.extent_nm() + px
    half_y = spec.width_nm / 2.0 + py
    half_z = spec.thickness_nm / 2.0 + pz
    dims = (
        _even_cells(half_x, spacing),
        _even_cells(half_y, spacing),
        _even_cells(half_z, spacing),
    )
    return _assemble_grid(spec, holes, spacing, dims, backend)


def mirror_unit_cell(
    spec: DeviceSpec,
    spacing: float,
    padding_nm: tuple[float, float] = (400.0, 400.0),
    backend: str | None = None,
) -> PermittivityGrid:
    """One axial period of the mirror section, hole centered at x = 0.

    The cell length snaps to a whole number of cells: nx = round(a0/dx)
    (half up), and the effective spacing a0/nx is used on all axes so the
    cell stays exactly periodic.
    """
    a0 = spec.mirror_period_nm
    nx = int(math.floor(a0 / spacing + 0.5))
    if nx < 4:
        raise ValueError("spacing too coarse for the unit cell")
    dx = a0 / nx
    r = spec.mirror_radius_nm
    if dx > r:
        raise ValueError(
            f"effective spacing {dx:.3f} nm exceeds hole radius {r:.3f} nm"
        )
    py, pz = padding_nm
    ny = _even_cells(spec.width_nm / 2.0 + py, dx)
    nz = _even_cells(spec.thickness_nm / 2.0 + pz, dx)
    # include periodic images so boundary cells average correctly
    holes = HoleList(x=np.array([-a0, 0.0, a0]), r=np.array([r, r, r]))
    return _assemble_grid(spec, holes, dx, (nx, ny, nz), backend)


def uniform_beam_cell(
    spec: DeviceSpec,
    spacing: float,
    length_nm: float = 100.0,
    padding_nm: tuple[float, float] = (400.0, 400.0),
    backend: str | None = None,
) -> PermittivityGrid:
    """Hole-free beam segment for guided-mode dispersion scans."""
    nx = max(2, int(math.floor(length_nm / spacing + 0.5)))
    dx = length_nm / nx
    py, pz = padding_nm
    ny = _even_cells(spec.width_nm / 2.0 + py, dx)
    nz = _even_cells(spec.thickness_nm / 2.0 + pz, dx)
    holes = HoleList(x=np.empty(0), r=np.empty(0))
    return _assemble_grid(spec, holes, dx, (nx, ny, nz), backend)


def dielectric_mass(grid: PermittivityGrid) -> dict[str, float]:
    """Integral of (eps - 1) dV per component array, for convergence checks."""
    dv = grid.spacing**3
    return {
        "ex": float((grid.eps_ex - 1.0).sum() * dv),
        "ey": float((grid.eps_ey - 1.0).sum() * dv),
        "ez": float((grid.eps_ez - 1.0).sum() * dv),
    }


def analytic_dielectric_mass(spec: DeviceSpec, holes: HoleList, grid) -> float:
    """Exact (eps-1) * volume of beam material inside the grid footprint."""
    nx = grid.dims[0]
    lx = nx * grid.spacing
    beam = lx * spec.width_nm * spec.thickness_nm
    hole_area = float(np.sum(math.pi * holes.r**2))
    return (spec.eps - 1.0) * (beam - hole_area * spec.thickness_nm)
