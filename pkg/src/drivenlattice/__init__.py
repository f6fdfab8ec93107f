"""Semiclassical Monte Carlo of atom transport in a driven optical lattice.

Simulates laser-cooled atoms in a dissipative 3D lin-perp-lin lattice
whose bipotential is modulated by a travelling intensity grating, and
measures the resulting center-of-mass transport: the propagation-mode
resonance of the drift velocity versus drive detuning, and the
stochastic-resonance dependence of the mode amplitude on the optical
pumping rate.  Everything is expressed in recoil units (see `params`).
"""

__version__ = "0.1.0"

from .errors import AnalysisError, ConfigurationError, IntegratorFault
from .params import (
    ATOM_MASS,
    HBAR,
    LASER_WAVEVECTOR,
    RECOIL_FREQUENCY,
    RECOIL_VELOCITY,
    LatticeConfig,
    ModulationConfig,
    brillouin_frequency,
    brillouin_ratio,
    derive_wavevectors,
    max_pump_rate,
    mode_velocity,
    phase_velocity,
    pump_rate_from_detuning,
    vibrational_frequency,
    well_depth,
)
from .fields import (
    FieldSample,
    InternalState,
    base_potential,
    force,
    modulated_potential,
    pump_rate,
    sample_fields,
    sigma_intensities,
)
from .dynamics import (
    AtomState,
    IntegratorSettings,
    Recoil,
    TrajectoryPoint,
    recommended_dt,
    run_trajectory,
    step,
)
from .ensemble import (
    EnsembleResult,
    EnsembleSpec,
    SweepResult,
    compute_xi,
    diffusion_coefficient,
    fit_cm_velocity,
    init_ensemble,
    run_ensemble,
    sweep_delta_m,
    sweep_pump_rate,
)

__all__ = [
    "__version__",
    "AnalysisError", "ConfigurationError", "IntegratorFault",
    "ATOM_MASS", "HBAR", "LASER_WAVEVECTOR", "RECOIL_FREQUENCY",
    "RECOIL_VELOCITY",
    "LatticeConfig", "ModulationConfig",
    "brillouin_frequency", "brillouin_ratio", "derive_wavevectors",
    "max_pump_rate", "mode_velocity", "phase_velocity",
    "pump_rate_from_detuning", "vibrational_frequency", "well_depth",
    "FieldSample", "InternalState", "base_potential", "force",
    "modulated_potential", "pump_rate", "sample_fields", "sigma_intensities",
    "AtomState", "IntegratorSettings", "Recoil", "TrajectoryPoint",
    "recommended_dt", "run_trajectory", "step",
    "EnsembleResult", "EnsembleSpec", "SweepResult", "compute_xi",
    "diffusion_coefficient", "fit_cm_velocity", "init_ensemble",
    "run_ensemble", "sweep_delta_m", "sweep_pump_rate",
]
