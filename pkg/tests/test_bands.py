"""Band-structure bookkeeping and the uniform-cell dispersion examples.

gap_metrics is exercised on hand-built band tables where the edges are
known exactly; the solver-backed checks use uniform 1D cells whose folded
mode frequencies follow from free-space dispersion alone. The full mirror
cell gap study runs in the acceptance suite.
"""

import math

import numpy as np
import pytest

from nanocav.bands import (
    DEFAULT_K_FRACTIONS,
    BandStructure,
    GapReport,
    bloch_index,
    bloch_modes,
    consolidate_modes,
    gap_metrics,
    matching_report,
    waveguide_neff,
)
from nanocav.geometry import DeviceSpec, PermittivityGrid
from nanocav.spectra import Mode


def bands_from_rows(ks, rows, num_bands=2):
    rows = [np.asarray(r, dtype=np.float64) for r in rows]
    return BandStructure(
        k_fractions=np.asarray(ks, dtype=np.float64),
        frequencies=rows,
        num_bands=num_bands,
        warnings=[r.size < num_bands for r in rows],
    )


def uniform_cell(n_cells, dx, eps, index):
    e = np.full((n_cells, 1, 1), eps, dtype=np.float64)
    return PermittivityGrid(
        spacing=dx,
        origin=(0.0, 0.0, 0.0),
        eps_ex=e.copy(),
        eps_ey=e.copy(),
        eps_ez=e.copy(),
        index=index,
    )


def test_bloch_index():
    assert bloch_index(637.0, 225.0) == pytest.approx(637.0 / 450.0)
    with pytest.raises(ValueError):
        bloch_index(-1.0, 225.0)
    with pytest.raises(ValueError):
        bloch_index(637.0, 0.0)


def test_default_k_fractions_span_half_zone():
    ks = np.asarray(DEFAULT_K_FRACTIONS)
    assert ks.size == 11
    assert ks[0] == 0.0 and ks[-1] == 0.5
    assert np.all(np.diff(ks) > 0)


def test_band_structure_validates_k_ordering():
    with pytest.raises(ValueError, match="strictly increasing"):
        bands_from_rows([0.2, 0.1], [[1.0, 2.0], [1.0, 2.0]])
    with pytest.raises(ValueError, match=r"\[0, 0.5\]"):
        bands_from_rows([0.1, 0.7], [[1.0, 2.0], [1.0, 2.0]])
    with pytest.raises(ValueError, match="ascending"):
        bands_from_rows([0.0, 0.5], [[2.0, 1.0], [1.0, 2.0]])


def test_band_structure_complete_flag():
    full = bands_from_rows([0.0, 0.5], [[1.0, 2.0], [1.1, 1.9]])
    assert full.complete
    short = bands_from_rows([0.0, 0.5], [[1.0], [1.1, 1.9]])
    assert not short.complete


def test_gap_metrics_synthetic_twenty_percent():
    # band-1 max 0.9 at k=0.25, band-2 min 1.1 at k=0.5 -> midgap 1.0
    bands = bands_from_rows(
        [0.0, 0.25, 0.5],
        [[0.85, 1.30], [0.90, 1.18], [0.88, 1.10]],
    )
    rep = gap_metrics(bands, target_wavelength_nm=1.0)
    assert rep.lower_edge == pytest.approx(0.9)
    assert rep.upper_edge == pytest.approx(1.1)
    assert rep.midgap == pytest.approx(1.0)
    assert rep.gap_to_midgap == pytest.approx(0.20)
    assert rep.midgap_wavelength_nm == pytest.approx(1.0)
    assert rep.has_gap and rep.complete
    assert rep.k_at_lower == pytest.approx(0.25)
    assert rep.k_at_upper == pytest.approx(0.5)
    # target f = 1/1.0 = 1.0 sits strictly inside (0.9, 1.1)
    assert rep.target_in_gap


def test_gap_metrics_crossing_bands_flagged():
    bands = bands_from_rows([0.0, 0.5], [[0.8, 0.95], [1.05, 1.2]])
    rep = gap_metrics(bands)
    assert rep.gap_to_midgap < 0
    assert not rep.has_gap
    assert not rep.target_in_gap


def test_gap_metrics_touching_bands():
    bands = bands_from_rows([0.0, 0.5], [[0.8, 1.0], [1.0, 1.3]])
    rep = gap_metrics(bands)
    assert rep.gap_to_midgap == pytest.approx(0.0, abs=1e-15)
    assert not rep.has_gap


def test_gap_metrics_zone_edge_degeneracy_guard():
    # top-k row resolved a single pole: treat as a degenerate pair, which
    # kills the gap claim even though the other rows suggest one
    bands = bands_from_rows([0.0, 0.5], [[0.8, 1.2], [1.0]])
    rep = gap_metrics(bands)
    assert rep.gap_to_midgap <= 0
    assert not rep.has_gap
    assert not rep.complete


def test_gap_metrics_no_resolved_pairs_degrades():
    bands = bands_from_rows([0.0, 0.5], [[], []])
    rep = gap_metrics(bands)
    assert isinstance(rep, GapReport)
    assert rep.gap_to_midgap == 0.0
    assert not rep.has_gap
    assert math.isnan(rep.lower_edge) and math.isnan(rep.upper_edge)
    assert math.isnan(rep.midgap_wavelength_nm)
    assert not rep.target_in_gap
    assert not rep.complete


def test_gap_metrics_skips_short_interior_rows():
    bands = bands_from_rows(
        [0.0, 0.25, 0.5],
        [[0.85, 1.30], [0.95], [0.90, 1.10]],
    )
    rep = gap_metrics(bands)
    # the short row at k=0.25 contributes nothing; edges come from the rest
    assert rep.lower_edge == pytest.approx(0.90)
    assert rep.upper_edge == pytest.approx(1.10)
    assert not rep.complete


def test_matching_report_pure_arithmetic():
    spec = DeviceSpec()
    rep = matching_report(spec, 637.0, n_wg=2.0)
    rows = rep["rows"]
    assert len(rows) == spec.taper_holes + 1
    assert rows[0]["period_nm"] == pytest.approx(spec.mirror_period_nm)
    assert rows[-1]["period_nm"] == pytest.approx(spec.taper_end_period_nm)
    for row in rows:
        assert row["n_bloch"] == pytest.approx(637.0 / (2 * row["period_nm"]))
        assert row["mismatch"] == pytest.approx(row["n_bloch"] - 2.0)
    # mirror Bloch index exceeds the taper-end one (shorter period -> higher n)
    assert rows[0]["n_bloch"] < rows[-1]["n_bloch"]


def test_vacuum_folded_mode_matches_free_space():
    # lowest folded branch of an empty periodic cell: f = k/L exactly
    cell = uniform_cell(24, 10.0, 1.0, 1.0)
    length = 240.0
    modes = bloch_modes(cell, 0.25, num_bands=1, band_nm=(500.0, 2000.0))
    assert modes, "no folded mode found"
    f = modes[0].omega.real / (2.0 * math.pi)
    assert f == pytest.approx(0.25 / length, rel=0.01)


def test_uniform_dielectric_scales_frequencies_by_index():
    n = 2.4
    cell = uniform_cell(24, 10.0, n * n, n)
    length = 240.0
    modes = bloch_modes(cell, 0.25, num_bands=1, band_nm=(1200.0, 3200.0))
    assert modes, "no folded mode found"
    f = modes[0].omega.real / (2.0 * math.pi)
    assert f == pytest.approx(0.25 / (n * length), rel=0.01)


def test_waveguide_index_between_vacuum_and_bulk():
    # fundamental guided mode of the unpatterned beam at the target
    # wavelength: n_eff must fall strictly between 1 and the material
    # index, and the taper should walk the Bloch index across it
    spec = DeviceSpec()
    n_wg = waveguide_neff(spec, 637.0)
    assert 1.0 < n_wg < spec.refractive_index
    rep = matching_report(spec, 637.0, n_wg=n_wg)
    mismatches = [row["mismatch"] for row in rep["rows"]]
    assert mismatches[0] < 0  # mirror cell is index-mismatched
    assert min(abs(m) for m in mismatches) < abs(mismatches[0])


def test_bloch_modes_rejects_bad_k():
    cell = uniform_cell(16, 10.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        bloch_modes(cell, 0.6)
    with pytest.raises(ValueError):
        bloch_modes(cell, -0.1)


def pole(lam, amp, q=1e4):
    w = 2.0 * math.pi / lam
    return Mode(wavelength_nm=lam, q=q, amplitude=amp, phase=0.0,
                omega=complex(w, -w / (2.0 * q)))


def test_consolidate_merges_probe_duplicates_keeping_stronger():
    # the same pole seen by two probes, 0.2% apart
    out = consolidate_modes([pole(677.5, 0.03), pole(678.8, 0.06)], 2)
    assert len(out) == 1
    assert out[0].amplitude == 0.06


def test_consolidate_absorbs_satellite_pole():
    # weak pencil satellite 1.6% off the real pole: beyond any duplicate
    # spread, inside the merge radius, stronger member survives
    out = consolidate_modes(
        [pole(841.5, 0.030, q=3e3), pole(855.1, 5.3e-4, q=290)], 2
    )
    assert [m.wavelength_nm for m in out] == [841.5]


def test_consolidate_drops_stray_weak_pole():
    # junk 11% away in frequency: unmergeable, culled by dominance floor
    out = consolidate_modes(
        [pole(841.5, 0.030), pole(749.9, 3.0e-4, q=270)], 2
    )
    assert [m.wavelength_nm for m in out] == [841.5]


def test_consolidate_keeps_real_band_pair():
    # true zone-edge pair: 18% apart, comparable amplitude, ascending f
    out = consolidate_modes([pole(555.7, 0.082), pole(677.6, 0.058)], 2)
    assert [m.wavelength_nm for m in out] == [677.6, 555.7]


def test_consolidate_truncates_to_num_bands():
    out = consolidate_modes(
        [pole(900.0, 0.05), pole(700.0, 0.04), pole(500.0, 0.03)], 2
    )
    assert [m.wavelength_nm for m in out] == [900.0, 700.0]
