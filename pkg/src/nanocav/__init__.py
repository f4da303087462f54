"""Design and simulation toolkit for tapered nanobeam photonic-crystal
cavities: parametric geometry, a staggered-grid time-domain Maxwell
solver, resonance extraction (wavelength, Q, mode volume), mirror-cell
band structure, and a transfer-matrix validation oracle.
"""

from .backends import available as available_backends, default_backend
from .bands import (
    BandStructure,
    GapReport,
    band_diagram,
    bloch_index,
    bloch_modes,
    gap_metrics,
    gap_study,
    matching_report,
    waveguide_neff,
)
from .cavity import (
    GridSettings,
    ResonanceResult,
    SolverSettings,
    simulate_cavity,
    sweep_gap,
)
from .config import (
    AnalysisSettings,
    BandRunSettings,
    ConfigError,
    OutputSettings,
    RunConfig,
    default_config,
    load_config,
    parse_config,
    serialize_config,
    write_config,
)
from .fdtd import (
    Absorbing,
    EnergyMonitor,
    GaussianPulse,
    InstabilityError,
    Mirror,
    Pec,
    Periodic,
    Probe,
    ProbeRecord,
    SimulationConfig,
    Source,
    courant_limit,
    run,
    stability_dt,
    total_energy,
)
from .geometry import (
    DeviceSpec,
    HoleList,
    PermittivityGrid,
    build_hole_list,
    mirror_unit_cell,
    rasterize,
    taper_profile,
    write_holes_csv,
)
from .spectra import (
    IllConditionedFitError,
    Mode,
    NoModeFoundError,
    dft_spectrum,
    harmonic_inversion,
    matrix_pencil,
    mode_volume,
    q_from_decay,
)
from .tmm import (
    LayerStack,
    defect_stack,
    fresnel_normal,
    quarter_wave_mirror_reflectance,
    quarter_wave_stack,
    stack_resonance,
    stack_rt,
)
from .validate import ValidationReport, run_validation

__version__ = "0.1.0"

__all__ = [
    "Absorbing",
    "AnalysisSettings",
    "BandRunSettings",
    "BandStructure",
    "ConfigError",
    "DeviceSpec",
    "EnergyMonitor",
    "GapReport",
    "GaussianPulse",
    "GridSettings",
    "HoleList",
    "IllConditionedFitError",
    "InstabilityError",
    "LayerStack",
    "Mirror",
    "Mode",
    "NoModeFoundError",
    "OutputSettings",
    "Pec",
    "Periodic",
    "PermittivityGrid",
    "Probe",
    "ProbeRecord",
    "ResonanceResult",
    "RunConfig",
    "SimulationConfig",
    "SolverSettings",
    "Source",
    "ValidationReport",
    "available_backends",
    "band_diagram",
    "bloch_index",
    "bloch_modes",
    "build_hole_list",
    "courant_limit",
    "default_backend",
    "default_config",
    "defect_stack",
    "dft_spectrum",
    "fresnel_normal",
    "gap_metrics",
    "gap_study",
    "harmonic_inversion",
    "load_config",
    "matching_report",
    "matrix_pencil",
    "mirror_unit_cell",
    "mode_volume",
    "parse_config",
    "q_from_decay",
    "quarter_wave_mirror_reflectance",
    "quarter_wave_stack",
    "rasterize",
    "run",
    "run_validation",
    "serialize_config",
    "simulate_cavity",
    "stability_dt",
    "stack_resonance",
    "stack_rt",
    "sweep_gap",
    "taper_profile",
    "total_energy",
    "waveguide_neff",
    "write_config",
    "write_holes_csv",
]
