"""File outputs: CSV tables, field binaries with text sidecars, reports.

All floating-point values in CSV go through ``fmt17`` (17 significant
digits) so a written table round-trips to the exact same doubles and
repeated runs can be compared byte for byte.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .bands import BandStructure, GapReport
from .cavity import ResonanceResult
from .fdtd import ProbeRecord, Snapshot


def fmt17(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_bands_csv(path: str, bands: BandStructure) -> None:
    """One row per (k, band) slot, band_index 1-based.

    Unresolved slots (a k row that yielded fewer modes than requested)
    are written as nan so the row count stays |k| x num_bands.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k_fraction,band_index,freq_c_per_nm,lambda_nm\n")
        for k, freqs in zip(bands.k_fractions, bands.frequencies):
            for b in range(bands.num_bands):
                if b < freqs.size:
                    f = float(freqs[b])
                    lam = 1.0 / f
                    fh.write(f"{fmt17(k)},{b + 1},{fmt17(f)},{fmt17(lam)}\n")
                else:
                    fh.write(f"{fmt17(k)},{b + 1},nan,nan\n")


def write_gap_report(path: str, report: GapReport, bands: BandStructure) -> None:
    """Key = value text block for the band-gap metrics."""
    ragged = [
        float(k)
        for k, f in zip(bands.k_fractions, bands.frequencies)
        if f.size < bands.num_bands
    ]
    lines = [
        f"lower_edge_c_per_nm = {fmt17(report.lower_edge)}",
        f"upper_edge_c_per_nm = {fmt17(report.upper_edge)}",
        f"midgap_c_per_nm = {fmt17(report.midgap)}",
        f"midgap_wavelength_nm = {fmt17(report.midgap_wavelength_nm)}",
        f"gap_to_midgap = {fmt17(report.gap_to_midgap)}",
        f"has_gap = {str(report.has_gap).lower()}",
        f"complete = {str(report.complete).lower()}",
        f"k_at_lower = {fmt17(report.k_at_lower)}",
        f"k_at_upper = {fmt17(report.k_at_upper)}",
        f"target_wavelength_nm = {fmt17(report.target_wavelength_nm)}",
        f"target_in_gap = {str(report.target_in_gap).lower()}",
    ]
    if ragged:
        ks = ", ".join(fmt17(k) for k in ragged)
        lines.append(f"# flagged: fewer than {bands.num_bands} bands at k = {ks}")
    if not report.has_gap:
        lines.append("# flagged: no spectral gap (ratio <= 0)")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


_RES_HEADER = "s_nm,lambda_nm,Q,V_norm,amplitude,window_start,window_end\n"


def write_resonance_csv(path: str, result: ResonanceResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_RES_HEADER)
        fh.write(
            f"{fmt17(result.s_nm)},{fmt17(result.wavelength_nm)},"
            f"{fmt17(result.q)},{fmt17(result.v_norm)},"
            f"{fmt17(result.amplitude)},{result.window[0]},{result.window[1]}\n"
        )


def write_sweep_csv(path: str, rows) -> None:
    """Sweep table, ascending s. ``rows`` holds ResonanceResult or, for a
    failed point, a (s_nm, exception) pair written as a flagged nan row."""
    ordered = sorted(
        rows, key=lambda r: r.s_nm if isinstance(r, ResonanceResult) else r[0]
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("s_nm,lambda_nm,Q,V_norm,status\n")
        for row in ordered:
            if isinstance(row, ResonanceResult):
                fh.write(
                    f"{fmt17(row.s_nm)},{fmt17(row.wavelength_nm)},"
                    f"{fmt17(row.q)},{fmt17(row.v_norm)},ok\n"
                )
            else:
                s, err = row
                fh.write(f"{fmt17(s)},nan,nan,nan,failed({type(err).__name__})\n")


def write_probe_csv(path: str, record: ProbeRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("step,time,value\n")
        for i, v in enumerate(record.values):
            t = (i + 1) * record.dt
            fh.write(f"{i + 1},{fmt17(t)},{fmt17(float(np.real(v)))}\n")


def write_field_binary(
    base_path: str,
    values: np.ndarray,
    component: str,
    spacing: float,
    step: int,
    origin=None,
    time: float | None = None,
) -> None:
    """Flat little-endian float64 binary at ``<base>.f64`` plus a
    ``<base>.txt`` sidecar (dims, spacing, component, step)."""
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    arr.astype("<f8").tofile(base_path + ".f64")
    lines = [
        f"component = {component}",
        "dims = " + " ".join(str(d) for d in arr.shape),
        f"spacing_nm = {fmt17(spacing)}",
        f"step = {step}",
        "dtype = float64 little-endian, C order",
    ]
    if origin is not None:
        lines.insert(3, "origin_nm = " + " ".join(fmt17(o) for o in origin))
    if time is not None:
        lines.insert(3, f"time = {fmt17(time)}")
    with open(base_path + ".txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_field_binary(base_path: str) -> tuple[np.ndarray, dict]:
    """Inverse of write_field_binary; returns (array, sidecar dict)."""
    meta = {}
    with open(base_path + ".txt", "r", encoding="utf-8") as fh:
        for line in fh:
            if "=" in line:
                key, val = line.split("=", 1)
                meta[key.strip()] = val.strip()
    dims = tuple(int(d) for d in meta["dims"].split())
    arr = np.fromfile(base_path + ".f64", dtype="<f8").reshape(dims)
    return arr, meta


def write_snapshot(out_dir: str, snap: Snapshot, tag: str = "snapshot") -> list[str]:
    """All three E components of a snapshot as binary + sidecar pairs."""
    written = []
    dom = snap.domain
    for comp, arr in (("ex", snap.ex), ("ey", snap.ey), ("ez", snap.ez)):
        base = os.path.join(out_dir, f"{tag}_{comp}")
        write_field_binary(
            base, arr, comp, dom.spacing, snap.step,
            origin=dom.origin, time=snap.time,
        )
        written.append(base)
    return written


def midplane_ey_slice(snap: Snapshot) -> np.ndarray:
    """E_y on the beam midplane (z = 0), unfolded to the full domain when
    the run used mirror symmetry.

    E_y is even under each of the three cavity mirror operations, so the
    unfold is a plain reflection: values are copied, with the mirror-axis
    sample layout (integer x and z positions, half-offset y) deciding
    whether the on-plane row is shared or duplicated.
    """
    dom = snap.domain
    arr = snap.ey
    # z = 0 plane: ey sits at integer z positions, so for a z-mirrored
    # octant the plane is arr[:, :, 0]; otherwise the centre index.
    if dom.mirror_axes[2]:
        plane = arr[:, :, 0]
    else:
        plane = arr[:, :, arr.shape[2] // 2]
    # unfold y (ey sits at half-offset y: reflect all rows, none shared)
    if dom.mirror_axes[1]:
        plane = np.concatenate([plane[:, ::-1], plane], axis=1)
    # unfold x (integer positions: the x = 0 row is shared, not doubled)
    if dom.mirror_axes[0]:
        plane = np.concatenate([plane[:0:-1], plane], axis=0)
    return plane


def emit_sweep_plot(out_dir: str) -> str:
    """Companion plotting script for sweep.csv (matplotlib, optional)."""
    script = os.path.join(out_dir, "sweep_plot.py")
    body = '''\
#!/usr/bin/env python3
"""Plot Q and V against the cavity gap s from sweep.csv."""
import csv
import sys

try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required to plot (pip install matplotlib)")

s, q, v = [], [], []
with open("sweep.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["status"] != "ok":
            continue
        s.append(float(row["s_nm"]))
        q.append(float(row["Q"]))
        v.append(float(row["V_norm"]))

fig, ax_q = plt.subplots(figsize=(6, 4))
ax_q.semilogy(s, q, "o-", color="tab:blue")
ax_q.set_xlabel("cavity gap s (nm)")
ax_q.set_ylabel("quality factor Q", color="tab:blue")
ax_v = ax_q.twinx()
ax_v.plot(s, v, "s--", color="tab:red")
ax_v.set_ylabel("mode volume V ((lambda/n)^3)", color="tab:red")
fig.tight_layout()
fig.savefig("sweep.png", dpi=160)
print("wrote sweep.png")
'''
    with open(script, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(body)
    return script
