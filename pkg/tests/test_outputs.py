"""CSV/report writers, binary field round-trip, and snapshot unfolding."""

import math

import numpy as np
import pytest

from nanocav.bands import BandStructure, gap_metrics
from nanocav.cavity import ResonanceResult
from nanocav.fdtd import DomainInfo, ProbeRecord, Snapshot
from nanocav.outputs import (
    emit_sweep_plot,
    fmt17,
    midplane_ey_slice,
    read_field_binary,
    write_bands_csv,
    write_field_binary,
    write_gap_report,
    write_probe_csv,
    write_resonance_csv,
    write_sweep_csv,
)


def small_bands(rows):
    rows = [np.asarray(r, dtype=np.float64) for r in rows]
    ks = np.linspace(0.0, 0.5, len(rows))
    return BandStructure(
        k_fractions=ks,
        frequencies=rows,
        num_bands=2,
        warnings=[r.size < 2 for r in rows],
    )


def res_result(s, lam, q, v):
    return ResonanceResult(
        s_nm=s, wavelength_nm=lam, q=q, v_norm=v,
        amplitude=0.1, phase=0.0, window=(100, 200), q_decay=q,
    )


@pytest.mark.parametrize(
    "x",
    [0.1, 1.0 / 3.0, 637.0, -1.2345678901234567e-7, 2.0**-1074, 1e308, 0.0],
)
def test_fmt17_round_trips_doubles(x):
    assert float(fmt17(x)) == x


def test_fmt17_specials():
    assert fmt17(math.nan) == "nan"
    assert fmt17(math.inf) == "inf"
    assert fmt17(-math.inf) == "-inf"


def test_bands_csv_pads_short_rows(tmp_path):
    bands = small_bands([[0.001, 0.002], [0.0015]])
    path = tmp_path / "bands.csv"
    write_bands_csv(str(path), bands)
    lines = path.read_text().splitlines()
    assert lines[0] == "k_fraction,band_index,freq_c_per_nm,lambda_nm"
    assert len(lines) == 1 + 2 * 2
    # unresolved slot keeps its row, with nan values
    assert lines[-1].split(",")[2:] == ["nan", "nan"]
    # frequencies and wavelengths round-trip exactly
    k, b, f, lam = lines[1].split(",")
    assert float(f) == 0.001 and float(lam) == 1.0 / 0.001


def test_gap_report_file_flags(tmp_path):
    bands = small_bands([[0.9, 1.1], [1.0]])  # zone-edge degenerate pair
    rep = gap_metrics(bands)
    path = tmp_path / "gap.txt"
    write_gap_report(str(path), rep, bands)
    text = path.read_text()
    kv = dict(
        line.split(" = ", 1)
        for line in text.splitlines()
        if " = " in line and not line.startswith("#")
    )
    assert kv["has_gap"] == "false"
    assert float(kv["gap_to_midgap"]) <= 0.0
    assert "# flagged: fewer than 2 bands at k" in text
    assert "# flagged: no spectral gap" in text


def test_gap_report_clean_case(tmp_path):
    bands = small_bands([[0.85, 1.3], [0.9, 1.1]])
    rep = gap_metrics(bands)
    path = tmp_path / "gap.txt"
    write_gap_report(str(path), rep, bands)
    text = path.read_text()
    assert "# flagged" not in text
    kv = dict(
        line.split(" = ", 1) for line in text.splitlines() if " = " in line
    )
    assert float(kv["gap_to_midgap"]) == rep.gap_to_midgap
    assert kv["target_in_gap"] == "false"  # 637 nm is far from these units


def test_resonance_csv_row(tmp_path):
    path = tmp_path / "resonance.csv"
    write_resonance_csv(str(path), res_result(82.0, 621.0625, 4.4e4, 0.4877))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("s_nm,lambda_nm,Q,V_norm")
    fields = lines[1].split(",")
    assert float(fields[0]) == 82.0
    assert float(fields[1]) == 621.0625
    assert fields[5] == "100" and fields[6] == "200"


def test_sweep_csv_orders_and_flags(tmp_path):
    rows = [
        res_result(90.0, 630.0, 2e3, 0.5),
        (75.0, ValueError("boom")),
        res_result(82.0, 621.0, 4e4, 0.49),
    ]
    path = tmp_path / "sweep.csv"
    write_sweep_csv(str(path), rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "s_nm,lambda_nm,Q,V_norm,status"
    s_col = [float(l.split(",")[0]) for l in lines[1:]]
    assert s_col == sorted(s_col) == [75.0, 82.0, 90.0]
    assert lines[1].endswith("failed(ValueError)")
    assert lines[2].endswith(",ok")


def test_probe_csv(tmp_path):
    rec = ProbeRecord(
        position=(0.0, 5.0, 0.0), component="ey", dt=2.0,
        values=np.array([0.5, -0.25]),
    )
    path = tmp_path / "probe.csv"
    write_probe_csv(str(path), rec)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,time,value"
    assert lines[1].split(",") == ["1", "2", "0.5"]
    assert lines[2].split(",") == ["2", "4", "-0.25"]


def test_field_binary_round_trip(tmp_path):
    arr = np.arange(24, dtype=np.float64).reshape(2, 3, 4) * math.pi
    base = str(tmp_path / "field")
    write_field_binary(
        base, arr, "ey", 10.0, 123, origin=(-5.0, 0.0, 2.5), time=7.25
    )
    back, meta = read_field_binary(base)
    assert np.array_equal(back, arr)
    assert meta["component"] == "ey"
    assert meta["dims"] == "2 3 4"
    assert float(meta["spacing_nm"]) == 10.0
    assert meta["step"] == "123"
    assert float(meta["time"]) == 7.25


def octant_snapshot(ey):
    nx, ny, nz = ey.shape
    dom = DomainInfo(
        spacing=10.0,
        origin=(0.0, 0.0, 0.0),
        dims=(nx, ny, nz),
        pml_lo=(0, 0, 0),
        pml_hi=(0, 0, 0),
        mirror_axes=(True, True, True),
        parities=(1, -1, 1),
    )
    zero = np.zeros_like(ey)
    return Snapshot(
        step=0, time=0.0, weight=1.0, ex=zero, ey=ey, ez=zero, domain=dom
    )


def test_midplane_unfolds_octant():
    ey = np.arange(3 * 2 * 2, dtype=np.float64).reshape(3, 2, 2)
    plane = midplane_ey_slice(octant_snapshot(ey))
    # x unfold shares the on-axis row, y unfold duplicates every row
    assert plane.shape == (2 * 3 - 1, 2 * 2)
    assert np.array_equal(plane, plane[::-1])
    assert np.array_equal(plane, plane[:, ::-1])
    # the +x,+y quadrant is the stored octant's z = 0 plane
    assert np.array_equal(plane[2:, 2:], ey[:, :, 0])


def test_midplane_full_domain_takes_center_plane():
    ey = np.zeros((4, 3, 5))
    ey[:, :, 2] = 7.0
    dom = DomainInfo(
        spacing=10.0,
        origin=(-20.0, -15.0, -25.0),
        dims=(4, 3, 5),
        pml_lo=(0, 0, 0),
        pml_hi=(0, 0, 0),
        mirror_axes=(False, False, False),
        parities=(1, 1, 1),
    )
    snap = Snapshot(
        step=0, time=0.0, weight=1.0,
        ex=np.zeros_like(ey), ey=ey, ez=np.zeros_like(ey), domain=dom,
    )
    plane = midplane_ey_slice(snap)
    assert plane.shape == (4, 3)
    assert np.all(plane == 7.0)


def test_emit_sweep_plot_writes_script(tmp_path):
    path = emit_sweep_plot(str(tmp_path))
    text = open(path).read()
    assert "sweep.csv" in text and "matplotlib" in text
