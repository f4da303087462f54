"""Run configuration: INI-style text with named blocks.

A config file drives every CLI command. All keys are optional and
default to the reference nanobeam design (diamond-index beam, 225 nm
mirror period tapering to 179 nm over five holes, r/a = 0.28, fifteen
mirror periods per side). Unknown sections or keys are hard errors so a
typo in a nm-scale parameter cannot silently fall back to a default.

Round-trip: ``parse_config(serialize_config(cfg))`` reproduces ``cfg``
exactly, and serializing again yields the identical text. Floats are
written with ``repr`` so the text form carries full precision.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field, fields

from .cavity import GridSettings, SolverSettings
from .geometry import DeviceSpec


class ConfigError(ValueError):
    """Malformed run configuration."""


@dataclass(frozen=True)
class AnalysisSettings:
    """Post-run extraction window and reporting band."""

    band_lo_nm: float = 600.0
    band_hi_nm: float = 680.0
    settle_steps: int = 256

    def __post_init__(self):
        if not 0 < self.band_lo_nm < self.band_hi_nm:
            raise ConfigError("analysis band must satisfy 0 < lo < hi")
        if self.settle_steps < 0:
            raise ConfigError("settle_steps must be >= 0")


@dataclass(frozen=True)
class BandRunSettings:
    """Mirror-cell band study knobs for the bands command."""

    spacing_nm: float = 10.0
    k_points: int = 11
    num_bands: int = 2
    min_q: float = 100.0
    refine_points: int = 3
    band_lo_nm: float = 400.0
    band_hi_nm: float = 2400.0

    def __post_init__(self):
        if self.spacing_nm <= 0:
            raise ConfigError("bands spacing_nm must be > 0")
        if self.k_points < 2:
            raise ConfigError("k_points must be >= 2")
        if self.num_bands < 1:
            raise ConfigError("num_bands must be >= 1")
        if self.refine_points < 0:
            raise ConfigError("refine_points must be >= 0")
        if not 0 < self.band_lo_nm < self.band_hi_nm:
            raise ConfigError("bands band must satisfy 0 < lo < hi")


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "."
    snapshots: bool = True
    probe_series: bool = False


@dataclass(frozen=True)
class RunConfig:
    device: DeviceSpec = field(default_factory=DeviceSpec)
    grid: GridSettings = field(default_factory=GridSettings)
    solver: SolverSettings = field(default_factory=SolverSettings)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    sweep_s_nm: tuple[float, ...] = (70.0, 75.0, 80.0, 85.0, 90.0, 95.0)
    bands: BandRunSettings = field(default_factory=BandRunSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def __post_init__(self):
        if any(s < 0 for s in self.sweep_s_nm):
            raise ConfigError("sweep s values must be >= 0")

    def solver_settings(self) -> SolverSettings:
        """SolverSettings with the analysis block folded in."""
        return dataclasses.replace(
            self.solver,
            band_nm=(self.analysis.band_lo_nm, self.analysis.band_hi_nm),
            settle_steps=self.analysis.settle_steps,
        )


# section -> (config key, dataclass field) pairs, in serialization order.
_DEVICE_KEYS = (
    ("thickness_nm", "thickness_nm"),
    ("width_nm", "width_nm"),
    ("refractive_index", "refractive_index"),
    ("mirror_period_nm", "mirror_period_nm"),
    ("taper_end_period_nm", "taper_end_period_nm"),
    ("radius_ratio", "radius_ratio"),
    ("mirror_pairs", "mirror_pairs"),
    ("taper_holes", "taper_holes"),
    ("cavity_gap_nm", "cavity_gap_nm"),
)
_GRID_KEYS = (
    ("spacing_nm", "spacing_nm"),
    ("padding_x_nm", "padding_x_nm"),
    ("padding_yz_nm", "padding_yz_nm"),
    ("pml_layers", "pml_layers"),
    ("symmetry", "symmetry"),
)
_SOLVER_KEYS = (
    ("courant_factor", "courant_factor"),
    ("wavelength_nm", "source_wavelength_nm"),
    ("bandwidth", "source_bandwidth"),
    ("ringdown_steps", "ringdown_steps"),
    ("monitor_every", "monitor_every"),
)
_ANALYSIS_KEYS = (
    ("band_lo_nm", "band_lo_nm"),
    ("band_hi_nm", "band_hi_nm"),
    ("settle_steps", "settle_steps"),
)
_BANDS_KEYS = (
    ("spacing_nm", "spacing_nm"),
    ("k_points", "k_points"),
    ("num_bands", "num_bands"),
    ("min_q", "min_q"),
    ("refine_points", "refine_points"),
    ("band_lo_nm", "band_lo_nm"),
    ("band_hi_nm", "band_hi_nm"),
)
_OUTPUT_KEYS = (
    ("directory", "directory"),
    ("snapshots", "snapshots"),
    ("probe_series", "probe_series"),
)

_SECTIONS = {
    "device": (DeviceSpec, _DEVICE_KEYS),
    "grid": (GridSettings, _GRID_KEYS),
    "solver": (SolverSettings, _SOLVER_KEYS),
    "analysis": (AnalysisSettings, _ANALYSIS_KEYS),
    "bands": (BandRunSettings, _BANDS_KEYS),
    "output": (OutputSettings, _OUTPUT_KEYS),
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _parse_value(raw: str, ftype, section: str, key: str):
    raw = raw.strip()
    if ftype is bool:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")
    try:
        if ftype is int:
            return int(raw)
        if ftype is float:
            return float(raw)
        if ftype is str:
            return raw
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None
    raise ConfigError(f"[{section}] {key}: unsupported field type {ftype}")


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _field_types(cls) -> dict[str, type]:
    out = {}
    for f in fields(cls):
        t = f.type
        if isinstance(t, str):
            t = {"float": float, "int": int, "bool": bool, "str": str}.get(t, t)
        out[f.name] = t
    return out


def parse_config(text: str) -> RunConfig:
    """Parse INI-style config text; unknown sections or keys are errors."""
    cp = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None

    blocks = {}
    sweep = None
    for section in cp.sections():
        if section == "sweep":
            keys = dict(cp.items("sweep"))
            unknown = set(keys) - {"s_values_nm"}
            if unknown:
                raise ConfigError(f"[sweep] unknown keys: {sorted(unknown)}")
            if "s_values_nm" in keys:
                parts = [p for p in keys["s_values_nm"].split(",") if p.strip()]
                if not parts:
                    raise ConfigError("[sweep] s_values_nm is empty")
                try:
                    sweep = tuple(float(p) for p in parts)
                except ValueError as exc:
                    raise ConfigError(f"[sweep] s_values_nm: {exc}") from None
            continue
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        cls, key_map = _SECTIONS[section]
        known = {cfg_key: attr for cfg_key, attr in key_map}
        types = _field_types(cls)
        kwargs = {}
        for key, raw in cp.items(section):
            if key not in known:
                raise ConfigError(f"[{section}] unknown key {key!r}")
            attr = known[key]
            kwargs[attr] = _parse_value(raw, types[attr], section, key)
        try:
            blocks[section] = cls(**kwargs)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"[{section}]: {exc}") from None

    cfg_kwargs = {}
    for section, attr in (
        ("device", "device"),
        ("grid", "grid"),
        ("solver", "solver"),
        ("analysis", "analysis"),
        ("bands", "bands"),
        ("output", "output"),
    ):
        if section in blocks:
            cfg_kwargs[attr] = blocks[section]
    if sweep is not None:
        cfg_kwargs["sweep_s_nm"] = sweep
    return RunConfig(**cfg_kwargs)


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: RunConfig) -> str:
    """Full config text with every key spelled out (round-trip exact)."""
    out = io.StringIO()
    section_values = (
        ("device", cfg.device, _DEVICE_KEYS),
        ("grid", cfg.grid, _GRID_KEYS),
        ("solver", cfg.solver, _SOLVER_KEYS),
        ("analysis", cfg.analysis, _ANALYSIS_KEYS),
    )
    for name, obj, key_map in section_values:
        out.write(f"[{name}]\n")
        for cfg_key, attr in key_map:
            out.write(f"{cfg_key} = {_format_value(getattr(obj, attr))}\n")
        out.write("\n")
    out.write("[sweep]\n")
    out.write(
        "s_values_nm = " + ", ".join(repr(s) for s in cfg.sweep_s_nm) + "\n\n"
    )
    for name, obj, key_map in (
        ("bands", cfg.bands, _BANDS_KEYS),
        ("output", cfg.output, _OUTPUT_KEYS),
    ):
        out.write(f"[{name}]\n")
        for cfg_key, attr in key_map:
            out.write(f"{cfg_key} = {_format_value(getattr(obj, attr))}\n")
        out.write("\n")
    return out.getvalue()


def write_config(path: str, cfg: RunConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_config(cfg))


def default_config() -> RunConfig:
    return RunConfig()
