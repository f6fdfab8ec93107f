"""Stochastic trajectory integration: Hamiltonian motion plus pumping jumps.

One trajectory alternates deterministic motion on the current sublevel's
potential surface with a Poisson jump process between sublevels.  The
deterministic part is a drift-kick-drift leapfrog in reduced units
(dx/dt = 2 v, dv/dt = -grad U), with the single force evaluation taken at
the half step in both position and time, so the travelling modulation
enters at t + dt/2.  After each full step one jump trial is made at the
updated position: the sublevel flips with probability 1 - exp(-gamma dt).
On a flip the atom optionally receives two independent isotropic
single-photon recoil kicks (absorption plus spontaneous emission), each
of magnitude 1 v_r.

Randomness is consumed strictly per event: exactly one uniform per step
for the jump trial and four more per flip for the recoil directions, so a
trajectory is a deterministic function of (initial state, generator
state, configs) regardless of host, thread count, or sampling stride.
"""

from __future__ import annotations

import enum
import math
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .errors import ConfigurationError, IntegratorFault
from .fields import InternalState
from .params import LatticeConfig, ModulationConfig, derive_wavevectors, \
    max_pump_rate, pump_rate_from_detuning, vibrational_frequency

#: dt caps: fraction of an oscillation period, and of the shortest mean
#: time between jump trials' saturation (keeps the per-step thinning bias
#: below statistical noise).
DT_PERIOD_FRACTION = 0.02
DT_PUMP_FRACTION = 0.05


class Recoil(enum.Enum):
    OFF = "off"
    ISOTROPIC = "isotropic"


TrajectoryPoint = namedtuple("TrajectoryPoint",
                             ["time", "position", "velocity", "internal"])


@dataclass
class AtomState:
    """Position (1/k), velocity (v_r), sublevel, and elapsed time (1/omega_r)."""

    position: np.ndarray
    velocity: np.ndarray
    internal: InternalState
    time: float = 0.0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3).copy()
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(3).copy()
        self.internal = InternalState(self.internal)
        if not (np.all(np.isfinite(self.position))
                and np.all(np.isfinite(self.velocity))
                and math.isfinite(self.time)):
            raise ConfigurationError("atom state must be finite")


def recommended_dt(cfg: LatticeConfig) -> float:
    """Largest time step compatible with both integrator caps, in 1/omega_r."""
    cap = DT_PERIOD_FRACTION * 2.0 * math.pi / vibrational_frequency(cfg)
    gamma_max = max_pump_rate(cfg)
    if gamma_max > 0.0:
        cap = min(cap, DT_PUMP_FRACTION / gamma_max)
    return cap


@dataclass
class IntegratorSettings:
    """Time step, recoil model, and the trajectory's random stream.

    Build through `for_lattice`, which enforces the dt caps against the
    lattice the settings will be used with.  `same_state_heating` adds
    photon scattering that redistributes momentum without changing the
    sublevel (rate (2 Gamma0'/9) s_same); it is a sensitivity study knob,
    off by default, and not part of the baseline model.
    """

    dt: float
    recoil: Recoil = Recoil.ISOTROPIC
    rng: np.random.Generator = field(
        default_factory=lambda: np.random.default_rng(0))
    same_state_heating: bool = False

    @classmethod
    def for_lattice(cls, cfg: LatticeConfig, dt: Optional[float] = None,
                    recoil: Recoil = Recoil.ISOTROPIC,
                    seed=0, same_state_heating: bool = False):
        cap = recommended_dt(cfg)
        if dt is None:
            dt = cap
        if not (math.isfinite(dt) and dt > 0.0):
            raise ConfigurationError(f"dt must be positive, got {dt!r}")
        if dt > cap * (1.0 + 1e-12):
            raise ConfigurationError(
                f"dt={dt:.6g} exceeds the stability/thinning cap {cap:.6g} "
                "for this lattice")
        rng = seed if isinstance(seed, np.random.Generator) \
            else np.random.default_rng(seed)
        return cls(dt=dt, recoil=recoil, rng=rng,
                   same_state_heating=same_state_heating)


def _kernel_params(cfg: LatticeConfig, mod: ModulationConfig):
    """Scalar pack consumed by the jitted kernel."""
    kx, ky, kz = derive_wavevectors(cfg)
    coef_u = 8.0 * cfg.light_shift_per_beam / 3.0
    coef_g = 2.0 * pump_rate_from_detuning(cfg) / 9.0
    return (kx, ky, kz, coef_u, coef_g,
            mod.delta_u, mod.delta_kx, mod.delta_m, mod.t_on)


@njit(cache=True, nogil=True)
def _trajectory_kernel(pos, vel, s0, t0, n_steps, dt,
                       kx, ky, kz, coef_u, coef_g, du, dkx, delta_m, t_on,
                       sample_offset, stride, include_final,
                       recoil_on, pin, heat_on, record_full,
                       out_pos, out_vel, out_int, rng):
    """Advance one trajectory n_steps; mutates pos/vel in place.

    Samples the state after `sample_offset + q*stride` steps into the out
    arrays; with include_final the state after the last step is appended
    even when it does not fall on the stride grid.  Returns
    (sublevel, n_flips, n_samples_written, fault_step); fault_step is -1
    unless a non-finite state was detected.
    """
    x, y, z = pos[0], pos[1], pos[2]
    vx, vy, vz = vel[0], vel[1], vel[2]
    s = s0
    n_flips = 0
    j = 0
    cap = out_pos.shape[0]
    for step in range(n_steps):
        if step >= sample_offset and (step - sample_offset) % stride == 0 \
                and j < cap:
            out_pos[j, 0] = x
            out_pos[j, 1] = y
            out_pos[j, 2] = z
            if record_full:
                out_vel[j, 0] = vx
                out_vel[j, 1] = vy
                out_vel[j, 2] = vz
                out_int[j] = s
            j += 1
        if not pin:
            # drift half step (dx/dt = 2v)
            xh = x + vx * dt
            yh = y + vy * dt
            zh = z + vz * dt
            th = t0 + (step + 0.5) * dt
            a = math.cos(kx * xh)
            b = math.cos(ky * yh)
            c = math.cos(kz * zh)
            sa = math.sin(kx * xh)
            sb = math.sin(ky * yh)
            sc = math.sin(kz * zh)
            fx = coef_u * kx * sa * (2.0 * a - s * b * c)
            fy = coef_u * ky * sb * (2.0 * b - s * a * c)
            fz = -coef_u * kz * sc * (s * a * b)
            if du != 0.0 and th >= t_on:
                fx += du * dkx * math.sin(dkx * xh - delta_m * th)
            vx += fx * dt
            vy += fy * dt
            vz += fz * dt
            x = xh + vx * dt
            y = yh + vy * dt
            z = zh + vz * dt
            if not (math.isfinite(x) and math.isfinite(y)
                    and math.isfinite(z) and math.isfinite(vx)
                    and math.isfinite(vy) and math.isfinite(vz)):
                pos[0], pos[1], pos[2] = x, y, z
                vel[0], vel[1], vel[2] = vx, vy, vz
                return s, n_flips, j, step
        # jump trial at the updated position
        a = math.cos(kx * x)
        b = math.cos(ky * y)
        c = math.cos(kz * z)
        g = coef_g * 2.0 * (a * a + b * b + 2.0 * s * a * b * c)
        if rng.random() < -math.expm1(-g * dt):
            s = -s
            n_flips += 1
            if recoil_on:
                for _ in range(2):
                    cz = 2.0 * rng.random() - 1.0
                    ph = 2.0 * math.pi * rng.random()
                    sxy = math.sqrt(1.0 - cz * cz)
                    vx += sxy * math.cos(ph)
                    vy += sxy * math.sin(ph)
                    vz += cz
        if heat_on:
            gs = coef_g * 2.0 * (a * a + b * b - 2.0 * s * a * b * c)
            if rng.random() < -math.expm1(-gs * dt):
                if recoil_on:
                    for _ in range(2):
                        cz = 2.0 * rng.random() - 1.0
                        ph = 2.0 * math.pi * rng.random()
                        sxy = math.sqrt(1.0 - cz * cz)
                        vx += sxy * math.cos(ph)
                        vy += sxy * math.sin(ph)
                        vz += cz
    if n_steps >= sample_offset and j < cap:
        aligned = (n_steps - sample_offset) % stride == 0
        if aligned or include_final:
            out_pos[j, 0] = x
            out_pos[j, 1] = y
            out_pos[j, 2] = z
            if record_full:
                out_vel[j, 0] = vx
                out_vel[j, 1] = vy
                out_vel[j, 2] = vz
                out_int[j] = s
            j += 1
    pos[0], pos[1], pos[2] = x, y, z
    vel[0], vel[1], vel[2] = vx, vy, vz
    return s, n_flips, j, -1


def _sample_steps(n_steps: int, offset: int, stride: int,
                  include_final: bool) -> list[int]:
    """Step indices at which the kernel records samples."""
    steps = list(range(offset, n_steps, stride))
    if n_steps >= offset and ((n_steps - offset) % stride == 0
                              or include_final):
        steps.append(n_steps)
    return steps


def step(state: AtomState, settings: IntegratorSettings, cfg: LatticeConfig,
         mod: ModulationConfig) -> AtomState:
    """One integrator step; returns the new state, consuming settings.rng."""
    pos = state.position.copy()
    vel = state.velocity.copy()
    s, _, _, fault = _trajectory_kernel(
        pos, vel, int(state.internal), state.time, 1, settings.dt,
        *_kernel_params(cfg, mod),
        2, 1, False,
        settings.recoil is Recoil.ISOTROPIC, False,
        settings.same_state_heating, False,
        _DUMMY_POS, _DUMMY_VEL, _DUMMY_INT, settings.rng)
    if fault >= 0:
        raise IntegratorFault(fault)
    return AtomState(position=pos, velocity=vel,
                     internal=InternalState(int(s)),
                     time=state.time + settings.dt)


_DUMMY_POS = np.empty((0, 3))
_DUMMY_VEL = np.empty((0, 3))
_DUMMY_INT = np.empty(0, dtype=np.int8)


def run_trajectory(init: AtomState, duration: float,
                   settings: IntegratorSettings, cfg: LatticeConfig,
                   mod: ModulationConfig, sample_every: int = 1,
                   pin_position: bool = False) -> list[TrajectoryPoint]:
    """Propagate one atom for `duration`, sampling every `sample_every` steps.

    The returned list always contains the initial state and the final
    state.  `pin_position` freezes the motion and runs only the jump
    process (test hook for jump statistics).
    """
    if duration < 0.0:
        raise ConfigurationError(f"duration must be >= 0, got {duration!r}")
    if sample_every < 1:
        raise ConfigurationError(
            f"sample_every must be >= 1, got {sample_every!r}")
    n_steps = int(math.ceil(duration / settings.dt - 1e-9)) if duration else 0
    steps = _sample_steps(n_steps, 0, sample_every, include_final=True)
    m = len(steps)
    out_pos = np.empty((m, 3))
    out_vel = np.empty((m, 3))
    out_int = np.empty(m, dtype=np.int8)
    pos = init.position.copy()
    vel = init.velocity.copy()
    _, _, written, fault = _trajectory_kernel(
        pos, vel, int(init.internal), init.time, n_steps, settings.dt,
        *_kernel_params(cfg, mod),
        0, sample_every, True,
        settings.recoil is Recoil.ISOTROPIC, pin_position,
        settings.same_state_heating, True,
        out_pos, out_vel, out_int, settings.rng)
    if fault >= 0:
        raise IntegratorFault(fault)
    assert written == m
    return [TrajectoryPoint(time=init.time + k * settings.dt,
                            position=out_pos[j].copy(),
                            velocity=out_vel[j].copy(),
                            internal=InternalState(int(out_int[j])))
            for j, k in enumerate(steps)]
