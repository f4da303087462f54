"""Command-line front end: band studies, cavity runs, the s-sweep, and
the validation suite.

Every command reads the same INI config (all keys optional; defaults are
the reference design) and writes plain CSV / text outputs into --out.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import outputs
from .bands import gap_study
from .cavity import ResonanceResult, simulate_cavity, sweep_gap
from .config import ConfigError, RunConfig, default_config, load_config
from .spectra import NoModeFoundError, dft_spectrum
from .validate import run_validation


def _load(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return default_config()


def _outdir(args) -> str:
    out = getattr(args, "out", None) or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_bands(cfg: RunConfig, out_dir: str, spacing: float | None = None) -> int:
    b = cfg.bands
    dx = spacing if spacing is not None else b.spacing_nm
    ks = np.linspace(0.0, 0.5, b.k_points)
    pad = (cfg.grid.padding_yz_nm, cfg.grid.padding_yz_nm)
    bands, report = gap_study(
        cfg.device,
        dx,
        k_fractions=ks,
        num_bands=b.num_bands,
        refine_points=b.refine_points,
        padding_nm=pad,
        pml_layers=cfg.grid.pml_layers,
        min_q=b.min_q,
        band_nm=(b.band_lo_nm, b.band_hi_nm),
    )
    outputs.write_bands_csv(os.path.join(out_dir, "bands.csv"), bands)
    outputs.write_gap_report(os.path.join(out_dir, "gap.txt"), report, bands)
    flag = "" if report.has_gap else "  [no gap]"
    print(
        f"gap-to-midgap {report.gap_to_midgap:.4f}, "
        f"midgap {report.midgap_wavelength_nm:.1f} nm, "
        f"{report.target_wavelength_nm:.0f} nm in gap: "
        f"{report.target_in_gap}{flag}"
    )
    return 0


def cmd_resonate(cfg: RunConfig, out_dir: str, spacing: float | None = None) -> int:
    grid = cfg.grid
    if spacing is not None:
        grid = dataclasses.replace(grid, spacing_nm=spacing)
    solver = cfg.solver_settings()
    try:
        result = simulate_cavity(cfg.device, grid, solver, keep_run=True)
    except NoModeFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.record is not None:
            lam, power = dft_spectrum(exc.record, exc.window)
            path = os.path.join(out_dir, "spectrum.csv")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("lambda_nm,power\n")
                for l, p in zip(lam, power):
                    fh.write(f"{outputs.fmt17(l)},{outputs.fmt17(p)}\n")
            print(f"diagnostic spectrum written to {path}", file=sys.stderr)
        return 2

    outputs.write_resonance_csv(os.path.join(out_dir, "resonance.csv"), result)
    if cfg.output.snapshots and result.run is not None and result.run.snapshots:
        snap = result.run.snapshots[0]
        outputs.write_snapshot(out_dir, snap, tag="snapshot")
        outputs.write_field_binary(
            os.path.join(out_dir, "midplane_ey"),
            outputs.midplane_ey_slice(snap),
            "ey",
            snap.domain.spacing,
            snap.step,
            time=snap.time,
        )
    if cfg.output.probe_series and result.run is not None:
        for i, rec in enumerate(result.run.probes):
            outputs.write_probe_csv(
                os.path.join(out_dir, f"probe_{i}.csv"), rec
            )
    print(
        f"s = {result.s_nm:g} nm: lambda = {result.wavelength_nm:.2f} nm, "
        f"Q = {result.q:.3g}, V = {result.v_norm:.3f} (lambda/n)^3"
    )
    return 0


def cmd_sweep_s(
    cfg: RunConfig,
    out_dir: str,
    workers: int = 1,
    spacing: float | None = None,
) -> int:
    s_values = cfg.sweep_s_nm
    if len(s_values) < 3:
        print("error: sweep needs at least 3 s values", file=sys.stderr)
        return 2
    grid = cfg.grid
    if spacing is not None:
        grid = dataclasses.replace(grid, spacing_nm=spacing)
    solver = cfg.solver_settings()
    results = sweep_gap(cfg.device, s_values, grid, solver, workers=workers)
    rows = [
        r if isinstance(r, ResonanceResult) else (float(s), r)
        for s, r in zip(s_values, results)
    ]
    outputs.write_sweep_csv(os.path.join(out_dir, "sweep.csv"), rows)
    outputs.emit_sweep_plot(out_dir)
    n_ok = 0
    for row in sorted(rows, key=lambda r: r.s_nm if isinstance(r, ResonanceResult) else r[0]):
        if isinstance(row, ResonanceResult):
            n_ok += 1
            print(
                f"s = {row.s_nm:6g} nm  lambda = {row.wavelength_nm:8.2f} nm  "
                f"Q = {row.q:10.3g}  V = {row.v_norm:.3f}"
            )
        else:
            s, err = row
            print(f"s = {s:6g} nm  FAILED ({type(err).__name__}: {err})")
    return 0 if n_ok else 1


def cmd_validate(out_dir: str | None = None, fault: str | None = None) -> int:
    report = run_validation(fault=fault)
    text = report.table()
    print(text)
    if out_dir:
        with open(
            os.path.join(out_dir, "validation.txt"), "w", encoding="utf-8"
        ) as fh:
            fh.write(text + "\n")
    return 0 if report.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nanocav",
        description="Tapered nanobeam cavity design and simulation toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, workers=False):
        p.add_argument("--config", help="INI config file (defaults if omitted)")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument(
            "--spacing", type=float, help="grid spacing override in nm"
        )
        if workers:
            p.add_argument(
                "--workers", type=int, default=1,
                help="concurrent sweep points (default 1)",
            )

    common(sub.add_parser("bands", help="mirror-cell band structure and gap"))
    common(sub.add_parser("resonate", help="single cavity resonance run"))
    common(sub.add_parser("sweep-s", help="Q and V across cavity gaps"), workers=True)
    val = sub.add_parser("validate", help="oracle self-checks")
    val.add_argument("--out", help="also write validation.txt here")
    val.add_argument(
        "--fault", help="failure-injection hook (testing): bloch_phase"
    )
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        out = None
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            out = args.out
        return cmd_validate(out, fault=args.fault)
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _outdir(args)
    if args.command == "bands":
        return cmd_bands(cfg, out, spacing=args.spacing)
    if args.command == "resonate":
        return cmd_resonate(cfg, out, spacing=args.spacing)
    if args.command == "sweep-s":
        return cmd_sweep_s(cfg, out, workers=args.workers, spacing=args.spacing)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
