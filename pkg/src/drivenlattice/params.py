"""Configuration types and closed-form lattice quantities in recoil units.

Unit convention (fixed once, used by every module):

* length in 1/k, with k the laser wavevector,
* time in 1/omega_r, with omega_r = hbar k^2 / (2 m) the recoil frequency,
* velocity in v_r = hbar k / m (one photon recoil),
* energy in E_r = hbar omega_r,
* angular frequency in omega_r.

Equivalently hbar = 1, k = 1, omega_r = 1, so the atomic mass is m = 1/2
and v_r = 2 omega_r / k = 2 in "natural" (omega_r/k) velocity units.  The
factor 2 shows up whenever a velocity in v_r multiplies a time in
1/omega_r: dx/dt = 2 v.  All public interfaces report frequencies in
omega_r and velocities in v_r.

The lattice is the four-beam 3D lin-perp-lin configuration: two pairs of
beams in the xOz plane with half-angle theta to the z axis, giving a
bipotential for the |+-1/2> ground sublevels with periods
lambda_x = lambda_y = lambda/sin(theta) and lambda_z = lambda/(2 cos(theta)).
The moving modulation comes from two extra y-polarized beams with
half-angle phi, detuned from each other by delta_m, which produces an
intensity grating travelling along x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError

HBAR = 1.0
LASER_WAVEVECTOR = 1.0
RECOIL_FREQUENCY = 1.0
ATOM_MASS = 0.5
#: v_r in (omega_r/k) units; velocities in v_r are converted with this factor.
RECOIL_VELOCITY = 2.0

#: Geometries with theta at or above this are rejected as degenerate
#: (k_z -> 0, the lattice loses its z periodicity).
THETA_MAX = math.radians(89.0)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigurationError(message)


@dataclass(frozen=True)
class LatticeConfig:
    """Static lattice geometry and strength.

    theta: half-angle between copropagating lattice beams, radians,
        0 < theta < 89 deg.
    light_shift_per_beam: light shift per lattice beam Delta0' in omega_r,
        negative (red detuning).
    atomic_detuning_over_linewidth: Delta/Gamma, negative, used to derive
        the optical pumping rate; optional if pump_rate_override is set.
    pump_rate_override: Gamma0' in omega_r; when set it bypasses the
        detuning relation entirely (used by the pump-rate sweep).
    """

    theta: float
    light_shift_per_beam: float
    atomic_detuning_over_linewidth: Optional[float] = None
    pump_rate_override: Optional[float] = None

    def __post_init__(self):
        _require(math.isfinite(self.theta) and 0.0 < self.theta < THETA_MAX,
                 f"theta must be in (0, {math.degrees(THETA_MAX):.0f}) degrees, "
                 f"got {math.degrees(self.theta):.6g} degrees")
        _require(math.isfinite(self.light_shift_per_beam)
                 and self.light_shift_per_beam < 0.0,
                 "light_shift_per_beam must be negative, "
                 f"got {self.light_shift_per_beam!r}")
        if self.atomic_detuning_over_linewidth is not None:
            _require(math.isfinite(self.atomic_detuning_over_linewidth)
                     and self.atomic_detuning_over_linewidth < 0.0,
                     "atomic_detuning_over_linewidth must be negative, "
                     f"got {self.atomic_detuning_over_linewidth!r}")
        if self.pump_rate_override is not None:
            _require(math.isfinite(self.pump_rate_override)
                     and self.pump_rate_override >= 0.0,
                     "pump_rate_override must be >= 0, "
                     f"got {self.pump_rate_override!r}")


@dataclass(frozen=True)
class ModulationConfig:
    """Moving-modulation geometry and strength.

    phi: half-angle between the two driving beams, radians, 0 < phi < pi/2.
    light_shift_per_mod_beam: Delta0m' in omega_r, <= 0 (0 switches the
        modulation off).
    delta_m: detuning between the two driving beams in omega_r, signed;
        its sign selects the propagation direction of the grating.
    t_on: time at which the modulation switches on, in 1/omega_r.
    """

    phi: float
    light_shift_per_mod_beam: float
    delta_m: float
    t_on: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.phi) and 0.0 < self.phi < math.pi / 2,
                 f"phi must be in (0, 90) degrees, got "
                 f"{math.degrees(self.phi):.6g} degrees")
        _require(math.isfinite(self.light_shift_per_mod_beam)
                 and self.light_shift_per_mod_beam <= 0.0,
                 "light_shift_per_mod_beam must be <= 0, "
                 f"got {self.light_shift_per_mod_beam!r}")
        _require(math.isfinite(self.delta_m),
                 f"delta_m must be finite, got {self.delta_m!r}")
        _require(math.isfinite(self.t_on) and self.t_on >= 0.0,
                 f"t_on must be >= 0, got {self.t_on!r}")

    @property
    def delta_u(self) -> float:
        """Amplitude of the travelling potential term, (4/3) Delta0m', in E_r."""
        return 4.0 * self.light_shift_per_mod_beam / 3.0

    @property
    def delta_kx(self) -> float:
        """Wavevector of the travelling modulation along x, 2 sin(phi), in k."""
        return 2.0 * math.sin(self.phi)


def derive_wavevectors(cfg: LatticeConfig) -> tuple[float, float, float]:
    """Lattice wavevectors (k_x, k_y, k_z) in units of k.

    k_x = k_y = sin(theta) and k_z = 2 cos(theta), so the lattice periods
    are lambda/sin(theta) in x, y and lambda/(2 cos(theta)) in z.
    """
    kx = math.sin(cfg.theta)
    return kx, kx, 2.0 * math.cos(cfg.theta)


def pump_rate_from_detuning(cfg: LatticeConfig) -> float:
    """Optical pumping rate Gamma0' in omega_r.

    Uses the low-saturation relation Gamma0' = Delta0' * (Gamma/Delta),
    consistent with keeping the depth U0 ~ I/Delta fixed while the pumping
    rate scales as I/Delta^2.  An explicit pump_rate_override wins.
    """
    if cfg.pump_rate_override is not None:
        return cfg.pump_rate_override
    if cfg.atomic_detuning_over_linewidth is None:
        raise ConfigurationError(
            "either atomic_detuning_over_linewidth or pump_rate_override "
            "must be set to determine the pumping rate")
    return cfg.light_shift_per_beam / cfg.atomic_detuning_over_linewidth


def max_pump_rate(cfg: LatticeConfig) -> float:
    """Global upper bound (16/9) Gamma0' on the departure rate, in omega_r."""
    return 16.0 * pump_rate_from_detuning(cfg) / 9.0


def well_depth(cfg: LatticeConfig) -> float:
    """Depth 8 |Delta0'| of the deep wells of the bipotential, in E_r."""
    return 8.0 * abs(cfg.light_shift_per_beam)


def vibrational_frequency(cfg: LatticeConfig) -> float:
    """Oscillation frequency Omega_x at a deep-well bottom, in omega_r.

    Harmonic expansion of the unperturbed bipotential along x gives
    Omega_x = 4 sin(theta) sqrt(|Delta0'|).
    """
    return 4.0 * math.sin(cfg.theta) * math.sqrt(abs(cfg.light_shift_per_beam))


def brillouin_ratio(theta: float, phi: float) -> float:
    """Geometric factor 2 sin(phi)/sin(theta) linking Omega_B to Omega_x."""
    return 2.0 * math.sin(phi) / math.sin(theta)


def brillouin_frequency(cfg: LatticeConfig, mod: ModulationConfig) -> float:
    """Resonant drive detuning Omega_B = (2 sin(phi)/sin(theta)) Omega_x.

    At delta_m = +-Omega_B the phase velocity of the travelling modulation
    equals the natural propagation-mode velocity of the lattice.
    """
    return brillouin_ratio(cfg.theta, mod.phi) * vibrational_frequency(cfg)


def mode_velocity(cfg: LatticeConfig) -> float:
    """Propagation-mode velocity v = (lambda_x/2) / (pi/Omega_x), in v_r.

    One half oscillation (time pi/Omega_x) advances the atom by half an
    x period; in reduced units v[v_r] = Omega_x / (2 sin(theta)).
    """
    return vibrational_frequency(cfg) / (2.0 * math.sin(cfg.theta))


def phase_velocity(mod: ModulationConfig) -> float:
    """Phase velocity of the travelling modulation, delta_m/(4 sin(phi)), in v_r."""
    return mod.delta_m / (4.0 * math.sin(mod.phi))
