"""3D Yee-lattice FDTD solver in natural units.

Lengths are nm, time is nm/c (so c = 1), permittivity and permeability are
relative (eps0 = mu0 = 1, impedance 1). Fields live on the standard
staggered lattice with one ghost cell per face:

    Ex at (i+1/2, j, k)    Hx at (i, j+1/2, k+1/2)
    Ey at (i, j+1/2, k)    Hy at (i+1/2, j, k+1/2)
    Ez at (i, j, k+1/2)    Hz at (i+1/2, j+1/2, k)

E updates use backward differences, H updates forward differences; the two
curl operators are exact adjoints under the interior inner product, which
is what makes the staggered energy 1/2(eps E^n . E^(n+1) + |H^(n+1/2)|^2)
conserved exactly (to roundoff) in a closed lossless box.

Boundary kinds per axis: absorbing (convolutional layers both sides),
Bloch-periodic with a phase across the axis, mirror (low side is a
symmetry plane, high side absorbs), and zero-backed walls for closed-box
tests. Mirror runs store only the half-domain; ghost planes are filled
with parity-signed reflections.

Effective 1D/2D grids (ny = nz = 1 and friends) run through the same code
path and are used heavily by the oracle tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backends
from .cpml import AbsorberSpec, AxisAbsorber, build_axis_absorber
from .geometry import PermittivityGrid

E_COMPONENTS = ("ex", "ey", "ez")
H_COMPONENTS = ("hx", "hy", "hz")
COMPONENTS = E_COMPONENTS + H_COMPONENTS

# staggering offsets (in cells) of each component along (x, y, z)
OFFSETS = {
    "ex": (0.5, 0.0, 0.0),
    "ey": (0.0, 0.5, 0.0),
    "ez": (0.0, 0.0, 0.5),
    "hx": (0.0, 0.5, 0.5),
    "hy": (0.5, 0.0, 0.5),
    "hz": (0.5, 0.5, 0.0),
}

# Sign of f(-u) relative to f(+u) on a mirror plane at u = 0 with sector
# parity +1; multiply by the configured parity. Normal E and tangential H
# flip, tangential E and normal H keep their sign.
MIRROR_BASE_SIGN = {
    0: {"ex": -1, "ey": 1, "ez": 1, "hx": 1, "hy": -1, "hz": -1},
    1: {"ex": 1, "ey": -1, "ez": 1, "hx": -1, "hy": 1, "hz": -1},
    2: {"ex": 1, "ey": 1, "ez": -1, "hx": -1, "hy": -1, "hz": 1},
}


class InstabilityError(RuntimeError):
    """Raised when the field magnitude explodes or goes non-finite."""

    def __init__(self, step: int, magnitude: float):
        self.step = step
        self.magnitude = magnitude
        super().__init__(
            f"field magnitude {magnitude:.3e} at step {step}: unstable run "
            "(check the courant factor and material bounds)"
        )


def courant_limit(dims: int) -> float:
    return 1.0 / math.sqrt(dims)


def stability_dt(spacing: float, dims: int, courant_factor: float) -> float:
    """Time step dt = courant_factor * spacing / sqrt(dims)."""
    if dims not in (1, 2, 3):
        raise ValueError("dims must be 1, 2 or 3")
    if not (0.0 < courant_factor < 1.0):
        raise ValueError("courant factor must lie in (0, 1)")
    return courant_factor * spacing / math.sqrt(dims)


# ---------------------------------------------------------------------------
# boundary conditions


@dataclass(frozen=True)
class Absorbing:
    absorber: AbsorberSpec = AbsorberSpec()


@dataclass(frozen=True)
class Periodic:
    """Bloch-periodic: f(x + L) = f(x) * exp(i*phase)."""

    phase: float = 0.0


@dataclass(frozen=True)
class Mirror:
    """Symmetry plane at the axis midpoint (low face of the half-domain).

    parity is the sector parity p in E(x) = p * M E(-x); see
    MIRROR_BASE_SIGN for the per-component ghost signs it induces.
    """

    parity: int = 1
    absorber: AbsorberSpec = AbsorberSpec()

    def __post_init__(self):
        if self.parity not in (1, -1):
            raise ValueError("mirror parity must be +1 or -1")


@dataclass(frozen=True)
class Pec:
    """Zero-backed reflecting walls (testing only)."""


Boundary = Absorbing | Periodic | Mirror | Pec


# ---------------------------------------------------------------------------
# sources, probes, monitors


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian-modulated sinusoid, identically zero after the cutoff.

    fractional_bandwidth is the intensity-spectrum FWHM over the carrier
    frequency. The envelope peaks at t0 = cutoff_sigmas * tau and the
    source switches off (hard zero) at 2 * t0.
    """

    wavelength_nm: float = 637.0
    fractional_bandwidth: float = 0.1
    cutoff_sigmas: float = 6.0

    def __post_init__(self):
        if self.wavelength_nm <= 0:
            raise ValueError("wavelength must be positive")
        if not (0.0 < self.fractional_bandwidth < 2.0):
            raise ValueError("fractional bandwidth must lie in (0, 2)")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.wavelength_nm

    @property
    def tau(self) -> float:
        return 2.0 * math.sqrt(math.log(2.0)) / (self.fractional_bandwidth * self.omega)

    @property
    def peak_time(self) -> float:
        return self.cutoff_sigmas * self.tau

    @property
    def turn_off_time(self) -> float:
        return 2.0 * self.cutoff_sigmas * self.tau

    def sample(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        u = (t - self.peak_time) / self.tau
        vals = np.exp(-0.5 * u * u) * np.sin(self.omega * (t - self.peak_time))
        return np.where(t < self.turn_off_time, vals, 0.0)


@dataclass(frozen=True)
class Source:
    """Soft (additive) point dipole."""

    position: tuple[float, float, float]
    component: str = "ey"
    amplitude: float = 1.0
    waveform: GaussianPulse = GaussianPulse()

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ValueError(f"unknown component {self.component!r}")


@dataclass(frozen=True)
class Probe:
    position: tuple[float, float, float]
    component: str = "ey"

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ValueError(f"unknown component {self.component!r}")


@dataclass
class ProbeRecord:
    position: tuple[float, float, float]  # snapped to the lattice
    component: str
    dt: float
    values: np.ndarray  # one sample per step, at t = (n+1) dt

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.values.size, dtype=np.float64) + 1.0) * self.dt


@dataclass(frozen=True)
class EnergyMonitor:
    """Samples total electromagnetic energy in a box every `every` steps.

    kind "field": 1/2 (sum eps |E|^2 + |Hbar|^2) with H time-centered onto
    the E step; smooth enough for decay-slope fits.
    kind "conserved": the staggered invariant
    1/2 (sum eps E^n . E^(n+1) + |H^(n+1/2)|^2), exactly conserved in a
    closed lossless box, for drift checks.
    box_nm is ((x0, x1), (y0, y1), (z0, z1)) or None for the whole
    interior. Energies cover the stored (possibly half/octant) domain.
    """

    name: str = "energy"
    kind: str = "field"
    every: int = 10
    box_nm: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("field", "conserved"):
            raise ValueError("monitor kind must be 'field' or 'conserved'")
        if self.every < 1:
            raise ValueError("monitor interval must be >= 1")


@dataclass
class EnergyTrace:
    name: str
    kind: str
    dt: float
    steps: np.ndarray
    values: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return (self.steps + 1.0) * self.dt


@dataclass
class DomainInfo:
    """Geometry of the stored computational domain."""

    spacing: float
    origin: tuple[float, float, float]
    dims: tuple[int, int, int]
    pml_lo: tuple[int, int, int]
    pml_hi: tuple[int, int, int]
    mirror_axes: tuple[bool, bool, bool]
    parities: tuple[int, int, int]
    eps_ex: np.ndarray = field(repr=False, default=None)
    eps_ey: np.ndarray = field(repr=False, default=None)
    eps_ez: np.ndarray = field(repr=False, default=None)

    def interior_slices(self, margin_from_pml: int = 0) -> tuple[slice, slice, slice]:
        """Index slices (into nx-sized arrays) excluding absorbing layers."""
        out = []
        for a in range(3):
            lo = self.pml_lo[a] + (margin_from_pml if self.pml_lo[a] else 0)
            hi = self.dims[a] - self.pml_hi[a] - (margin_from_pml if self.pml_hi[a] else 0)
            out.append(slice(lo, hi))
        return tuple(out)


@dataclass
class Snapshot:
    step: int
    time: float
    weight: float
    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray
    domain: DomainInfo


@dataclass
class SimulationConfig:
    num_steps: int
    courant_factor: float = 0.5
    boundaries: tuple[Boundary, Boundary, Boundary] = (
        Absorbing(),
        Absorbing(),
        Absorbing(),
    )
    check_every: int = 200
    blowup_factor: float = 1e6
    snapshot_steps: tuple[int, ...] = ()
    snapshot_keep: str = "best"  # or "all"

    def __post_init__(self):
        if self.num_steps < 1:
            raise ValueError("num_steps must be >= 1")
        if not (0.0 < self.courant_factor <= 0.99):
            raise ValueError("courant factor must lie in (0, 0.99]")
        if self.snapshot_keep not in ("best", "all"):
            raise ValueError("snapshot_keep must be 'best' or 'all'")
        if len(self.boundaries) != 3:
            raise ValueError("need one boundary condition per axis")


@dataclass
class RunResult:
    dt: float
    num_steps: int
    turn_off_step: int
    probes: list[ProbeRecord]
    monitors: dict[str, EnergyTrace]
    snapshots: list[Snapshot]
    domain: DomainInfo
    final_fields: dict[str, np.ndarray] | None = None


# ---------------------------------------------------------------------------
# helpers


def expand_sources_full_domain(
    sources, parities: tuple[int, int, int], spacing: float, axes=(0, 1, 2)
):
    """Unfold sources defined in a mirror-reduced domain to the full domain.

    For each mirrored axis, a source off the symmetry plane gains an image
    at the negated coordinate with amplitude scaled by the component's
    mirror sign; sources on the plane stay single (and must have even
    sign, else the mode they excite vanishes there).
    """
    out = list(sources)
    for a in axes:
        p = parities[a]
        expanded = []
        for s in out:
            sign = MIRROR_BASE_SIGN[a][s.component] * p
            on_plane = abs(s.position[a]) < 0.25 * spacing
            if on_plane and OFFSETS[s.component][a] == 0.0:
                if sign < 0:
                    raise ValueError(
                        f"{s.component} source on the axis-{a} mirror plane is "
                        "odd under the configured parity and would vanish"
                    )
                expanded.append(s)
                continue
            pos = list(s.position)
            pos[a] = -pos[a]
            expanded.append(s)
            expanded.append(
                Source(
                    position=tuple(pos),
                    component=s.component,
                    amplitude=s.amplitude * sign,
                    waveform=s.waveform,
                )
            )
        out = expanded
    return out


def _resolve_index(comp, pos, origin, spacing, dims):
    """Snap a physical position to the component's lattice site.

    Returns 0-based cell indices (i, j, k) and the snapped position.
    """
    idx = []
    snapped = []
    for a in range(3):
        off = OFFSETS[comp][a]
        fi = (pos[a] - origin[a]) / spacing - off
        i = int(math.floor(fi + 0.5))
        if not (0 <= i < dims[a]):
            raise ValueError(
                f"{comp} position {pos} outside the domain along axis {a}"
            )
        idx.append(i)
        snapped.append(origin[a] + (i + off) * spacing)
    return tuple(idx), tuple(snapped)


def _box_slices(comp, box_nm, origin, spacing, dims):
    """Component-array slices covering box_nm (or the non-ghost interior)."""
    sl = []
    for a in range(3):
        off = OFFSETS[comp][a]
        if box_nm is None:
            lo, hi = 0, dims[a]
        else:
            b0, b1 = box_nm[a]
            lo = int(math.ceil((b0 - origin[a]) / spacing - off - 1e-9))
            hi = int(math.floor((b1 - origin[a]) / spacing - off + 1e-9)) + 1
            lo = max(lo, 0)
            hi = min(hi, dims[a])
            if hi <= lo:
                raise ValueError("monitor box contains no lattice sites")
        sl.append(slice(lo + 1, hi + 1))  # shift into ghost-padded arrays
    return tuple(sl)


class _GhostFill:
    """Per-step ghost-plane assignments for one axis."""

    def __init__(self):
        self.e_ops = []  # (array, ghost_index, src_index, factor)
        self.h_ops = []

    @staticmethod
    def _take(axis, index):
        sl = [slice(None)] * 3
        sl[axis] = index
        return tuple(sl)

    def add_periodic(self, fields, axis, n, factor):
        inv = np.conj(factor) if isinstance(factor, complex) else factor
        for name, arr in fields.items():
            lo_ghost = self._take(axis, 0)
            hi_ghost = self._take(axis, n + 1)
            lo_src = self._take(axis, n)
            hi_src = self._take(axis, 1)
            ops = self.e_ops if name in E_COMPONENTS else self.h_ops
            ops.append((arr, lo_ghost, lo_src, inv))
            ops.append((arr, hi_ghost, hi_src, factor))

    def add_mirror_low(self, fields, axis, parity):
        for name, arr in fields.items():
            sign = float(MIRROR_BASE_SIGN[axis][name] * parity)
            src = 1 if OFFSETS[name][axis] == 0.5 else 2
            ops = self.e_ops if name in E_COMPONENTS else self.h_ops
            ops.append((arr, self._take(axis, 0), self._take(axis, src), sign))

    @staticmethod
    def run(ops):
        for arr, ghost, src, factor in ops:
            if factor == 1.0:
                arr[ghost] = arr[src]
            else:
                arr[ghost] = arr[src] * factor


def _max_abs(arr: np.ndarray) -> float:
    if np.iscomplexobj(arr):
        re, im = arr.real, arr.imag
        m = max(re.max(), -re.min(), im.max(), -im.min())
    else:
        m = max(arr.max(), -arr.min())
    return float(m)


def total_energy(ex, ey, ez, hx, hy, hz, eps_ex, eps_ey, eps_ez) -> float:
    """Plain staggered-time energy 1/2 (sum eps |E|^2 + sum |H|^2).

    E and H are sampled half a step apart, so this quantity carries an
    O(omega dt) ripple even in a closed box; use the 'conserved' monitor
    kind for drift checks.
    """
    u = 0.0
    for e, eps in ((ex, eps_ex), (ey, eps_ey), (ez, eps_ez)):
        u += float(np.real(np.sum(eps * (e * np.conj(e)))))
    for h in (hx, hy, hz):
        u += float(np.real(np.sum(h * np.conj(h))))
    return 0.5 * u


# ---------------------------------------------------------------------------
# the solver


class _Monitor:
    def __init__(self, spec: EnergyMonitor, fields, eps, slices_by_comp, num_steps, dt):
        self.spec = spec
        self.fields = fields
        self.eps = eps
        self.sl = slices_by_comp
        self.dt = dt
        self.steps = []
        self.values = []
        self._pre = None
        n_last = num_steps - 1
        self.sample_steps = set(range(0, num_steps, spec.every))
        self.sample_steps.add(n_last)

    def pre(self, n):
        if n not in self.sample_steps:
            return
        if self.spec.kind == "conserved":
            self._pre = tuple(
                self.fields[c][self.sl[c]].copy() for c in E_COMPONENTS
            )
        else:
            self._pre = tuple(
                self.fields[c][self.sl[c]].copy() for c in H_COMPONENTS
            )

    def post(self, n):
        if n not in self.sample_steps:
            return
        u = 0.0
        if self.spec.kind == "conserved":
            for c, e_old in zip(E_COMPONENTS, self._pre):
                e_new = self.fields[c][self.sl[c]]
                u += float(np.real(np.sum(self.eps[c] * (e_old * np.conj(e_new)))))
            for c in H_COMPONENTS:
                h = self.fields[c][self.sl[c]]
                u += float(np.real(np.sum(h * np.conj(h))))
        else:
            for c in E_COMPONENTS:
                e = self.fields[c][self.sl[c]]
                u += float(np.real(np.sum(self.eps[c] * (e * np.conj(e)))))
            for c, h_old in zip(H_COMPONENTS, self._pre):
                h_bar = 0.5 * (h_old + self.fields[c][self.sl[c]])
                u += float(np.real(np.sum(h_bar * np.conj(h_bar))))
        self._pre = None
        self.steps.append(n)
        self.values.append(0.5 * u)

    def trace(self) -> EnergyTrace:
        return EnergyTrace(
            name=self.spec.name,
            kind=self.spec.kind,
            dt=self.dt,
            steps=np.asarray(self.steps, dtype=np.int64),
            values=np.asarray(self.values, dtype=np.float64),
        )


def run(
    grid: PermittivityGrid,
    cfg: SimulationConfig,
    sources,
    probes=(),
    monitors=(),
    return_fields: bool = False,
    backend: str | None = None,
) -> RunResult:
    """Advance the fields cfg.num_steps leapfrog steps and record outputs.

    `grid` always describes the full structure; axes with Mirror
    boundaries store only the upper half (the grid must have even cell
    count there). Positions of sources and probes are physical nm
    coordinates and must land in the stored domain, outside absorbing
    layers.
    """
    kern = backends.get_kernels(backend)
    if isinstance(sources, Source):
        sources = [sources]
    sources = list(sources)
    if not sources:
        raise ValueError("at least one source is required")
    probes = list(probes)

    # --- domain reduction for mirror axes
    eps_full = {"ex": grid.eps_ex, "ey": grid.eps_ey, "ez": grid.eps_ez}
    dims = list(grid.dims)
    origin = list(grid.origin)
    mirror_axes = [False, False, False]
    parities = [1, 1, 1]
    sl_red = [slice(None)] * 3
    for a, bc in enumerate(cfg.boundaries):
        if isinstance(bc, Mirror):
            if dims[a] % 2:
                raise ValueError(f"mirror axis {a} needs an even cell count")
            sl_red[a] = slice(dims[a] // 2, None)
            dims[a] //= 2
            origin[a] = 0.0
            mirror_axes[a] = True
            parities[a] = bc.parity
    eps = {
        c: np.ascontiguousarray(arr[tuple(sl_red)], dtype=np.float64)
        for c, arr in eps_full.items()
    }
    nx, ny, nz = dims
    origin = tuple(origin)
    dims = tuple(dims)

    # --- time step from the active dimensionality
    ndim = sum(1 for n in dims if n > 1)
    dt = stability_dt(grid.spacing, max(ndim, 1), cfg.courant_factor)
    inv_dx = 1.0 / grid.spacing

    # --- dtype: complex only for genuinely complex Bloch phases
    def _phase_factor(phase):
        fac = complex(math.cos(phase), math.sin(phase))
        if abs(fac.imag) < 1e-12:
            return float(fac.real)
        return fac

    factors = {}
    needs_complex = False
    for a, bc in enumerate(cfg.boundaries):
        if isinstance(bc, Periodic):
            factors[a] = _phase_factor(bc.phase)
            if isinstance(factors[a], complex):
                needs_complex = True
    dtype = np.complex128 if needs_complex else np.float64

    shape = (nx + 2, ny + 2, nz + 2)
    fields = {c: np.zeros(shape, dtype=dtype) for c in COMPONENTS}

    # --- update coefficients
    coef = {}
    for c in E_COMPONENTS:
        arr = np.zeros(shape, dtype=np.float64)
        arr[1:-1, 1:-1, 1:-1] = dt / eps[c]
        coef[c] = arr

    absorbers: dict[int, AxisAbsorber] = {}
    pml_lo = [0, 0, 0]
    pml_hi = [0, 0, 0]
    a_e = []
    a_h = []
    for a, bc in enumerate(cfg.boundaries):
        if isinstance(bc, Absorbing):
            ax = build_axis_absorber(dims[a], grid.spacing, dt, bc.absorber, True, True)
            pml_lo[a] = pml_hi[a] = ax.layers
        elif isinstance(bc, Mirror):
            ax = build_axis_absorber(
                dims[a], grid.spacing, dt, bc.absorber, False, True
            )
            pml_hi[a] = ax.layers
        else:
            ax = None
        absorbers[a] = ax
        a_e.append(ax.inv_kappa_e if ax else np.full(dims[a] + 2, inv_dx))
        a_h.append(ax.inv_kappa_h if ax else np.full(dims[a] + 2, inv_dx))

    # --- psi slabs and kernel call lists
    pml_e_calls = []
    pml_h_calls = []

    def _slab_shape(axis, ns):
        s = list(shape)
        s[axis] = ns
        return tuple(s)

    e_args = {
        0: ("ey", "ez", "hy", "hz"),
        1: ("ex", "ez", "hx", "hz"),
        2: ("ex", "ey", "hx", "hy"),
    }
    e_fns = {0: kern.pml_e_x, 1: kern.pml_e_y, 2: kern.pml_e_z}
    h_fns = {0: kern.pml_h_x, 1: kern.pml_h_y, 2: kern.pml_h_z}

    for a, ax in absorbers.items():
        if ax is None:
            continue
        fa, fb, ga, gb = e_args[a]
        for side in ("lo", "hi"):
            if not getattr(ax, side):
                continue
            ns = ax.layers
            i0 = 1 if side == "lo" else dims[a] - ns + 1
            be = getattr(ax, f"be_{side}")
            ce = getattr(ax, f"ce_{side}")
            bh = getattr(ax, f"bh_{side}")
            ch = getattr(ax, f"ch_{side}")
            psi_ea = np.zeros(_slab_shape(a, ns), dtype=dtype)
            psi_eb = np.zeros(_slab_shape(a, ns), dtype=dtype)
            psi_ha = np.zeros(_slab_shape(a, ns), dtype=dtype)
            psi_hb = np.zeros(_slab_shape(a, ns), dtype=dtype)
            pml_e_calls.append(
                (
                    e_fns[a],
                    (
                        fields[fa],
                        fields[fb],
                        fields[ga],
                        fields[gb],
                        coef[fa],
                        coef[fb],
                        psi_ea,
                        psi_eb,
                        be,
                        ce,
                        i0,
                        inv_dx,
                    ),
                )
            )
            pml_h_calls.append(
                (
                    h_fns[a],
                    (
                        fields[fa],
                        fields[fb],
                        fields[ga],
                        fields[gb],
                        dt,
                        psi_ha,
                        psi_hb,
                        bh,
                        ch,
                        i0,
                        inv_dx,
                    ),
                )
            )

    # --- ghost fills
    ghosts = _GhostFill()
    for a, bc in enumerate(cfg.boundaries):
        if isinstance(bc, Periodic):
            ghosts.add_periodic(fields, a, dims[a], factors[a])
        elif isinstance(bc, Mirror):
            ghosts.add_mirror_low(fields, a, bc.parity)

    # --- sources and probes
    def _check_outside_pml(idx, what):
        for a in range(3):
            if idx[a] < pml_lo[a] or idx[a] >= dims[a] - pml_hi[a]:
                raise ValueError(f"{what} sits inside an absorbing layer (axis {a})")

    times = (np.arange(cfg.num_steps, dtype=np.float64) + 1.0) * dt
    src_bound = []
    turn_off_step = 0
    peak_amp = 0.0
    for s in sources:
        idx, _ = _resolve_index(s.component, s.position, origin, grid.spacing, dims)
        _check_outside_pml(idx, f"{s.component} source")
        vals = s.amplitude * s.waveform.sample(times)
        src_bound.append((fields[s.component], (idx[0] + 1, idx[1] + 1, idx[2] + 1), vals))
        turn_off_step = max(turn_off_step, int(math.ceil(s.waveform.turn_off_time / dt)))
        peak_amp = max(peak_amp, abs(s.amplitude))
    blowup = cfg.blowup_factor * max(peak_amp, 1e-30)

    probe_bound = []
    records = []
    for p in probes:
        idx, snapped = _resolve_index(p.component, p.position, origin, grid.spacing, dims)
        _check_outside_pml(idx, f"{p.component} probe")
        out = np.zeros(cfg.num_steps, dtype=dtype)
        probe_bound.append((fields[p.component], (idx[0] + 1, idx[1] + 1, idx[2] + 1), out))
        records.append(ProbeRecord(position=snapped, component=p.component, dt=dt, values=out))

    domain = DomainInfo(
        spacing=grid.spacing,
        origin=origin,
        dims=dims,
        pml_lo=tuple(pml_lo),
        pml_hi=tuple(pml_hi),
        mirror_axes=tuple(mirror_axes),
        parities=tuple(parities),
        eps_ex=eps["ex"],
        eps_ey=eps["ey"],
        eps_ez=eps["ez"],
    )

    mons = []
    for mspec in monitors:
        sls = {
            c: _box_slices(c, mspec.box_nm, origin, grid.spacing, dims)
            for c in COMPONENTS
        }
        # eps views matching the E-component slices (shift back out of ghosts)
        eps_views = {
            c: eps[c][tuple(slice(s.start - 1, s.stop - 1) for s in sls[c])]
            for c in E_COMPONENTS
        }
        mons.append(_Monitor(mspec, fields, eps_views, sls, cfg.num_steps, dt))

    snap_steps = sorted(set(int(s) for s in cfg.snapshot_steps))
    for s in snap_steps:
        if not (0 <= s < cfg.num_steps):
            raise ValueError(f"snapshot step {s} outside the run")
    snapshots: list[Snapshot] = []
    core = (slice(1, -1), slice(1, -1), slice(1, -1))

    def _take_snapshot(n):
        w = 0.0
        for c in E_COMPONENTS:
            e = fields[c][core]
            w += float(np.real(np.sum(eps[c] * (e * np.conj(e)))))
        snap = Snapshot(
            step=n,
            time=(n + 1.0) * dt,
            weight=w,
            ex=fields["ex"][core].copy(),
            ey=fields["ey"][core].copy(),
            ez=fields["ez"][core].copy(),
            domain=domain,
        )
        if cfg.snapshot_keep == "all":
            snapshots.append(snap)
        elif not snapshots or w > snapshots[0].weight:
            snapshots[:] = [snap]

    f = fields
    upd_e_args = (
        f["ex"], f["ey"], f["ez"], f["hx"], f["hy"], f["hz"],
        coef["ex"], coef["ey"], coef["ez"], a_e[0], a_e[1], a_e[2],
    )
    upd_h_args = (
        f["ex"], f["ey"], f["ez"], f["hx"], f["hy"], f["hz"],
        dt, a_h[0], a_h[1], a_h[2],
    )

    snap_set = set(snap_steps)
    for n in range(cfg.num_steps):
        for m in mons:
            m.pre(n)
        kern.update_h(*upd_h_args)
        for fn, args in pml_h_calls:
            fn(*args)
        _GhostFill.run(ghosts.h_ops)
        kern.update_e(*upd_e_args)
        for fn, args in pml_e_calls:
            fn(*args)
        for arr, idx, vals in src_bound:
            arr[idx] += vals[n]
        _GhostFill.run(ghosts.e_ops)
        for arr, idx, out in probe_bound:
            out[n] = arr[idx]
        for m in mons:
            m.post(n)
        if n in snap_set:
            _take_snapshot(n)
        if (n + 1) % cfg.check_every == 0:
            m_abs = max(_max_abs(fields[c]) for c in COMPONENTS)
            if not math.isfinite(m_abs) or m_abs > blowup:
                raise InstabilityError(n, m_abs)

    result = RunResult(
        dt=dt,
        num_steps=cfg.num_steps,
        turn_off_step=turn_off_step,
        probes=records,
        monitors={m.spec.name: m.trace() for m in mons},
        snapshots=snapshots,
        domain=domain,
    )
    if return_fields:
        result.final_fields = {c: fields[c][core].copy() for c in COMPONENTS}
    return result
