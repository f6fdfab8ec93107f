"""State-dependent optical bipotential, its analytic gradient, and pump rates.

The two ground sublevels |+-1/2> of a J=1/2 -> J=3/2 transition see the
unperturbed potentials

    U0_{+-}(r) = (8 Delta0'/3) [cos^2(kx x) + cos^2(ky y)
                                -+ cos(kx x) cos(ky y) cos(kz z)]

(upper sign for |+1/2>).  Internally the sublevel is encoded as
s = +1 (PLUS) or s = -1 (MINUS), so the cross term carries a factor -s.

The same geometry decomposes the local light into circular components

    s_{+-}(r) = 2 [cos^2(kx x) + cos^2(ky y)
                   -+ 2 cos(kx x) cos(ky y) cos(kz z)]  >= 0,

normalized so that U0_{+-} = Delta0' (s_{+-} + s_{-+}/3), i.e. the
Clebsch-Gordan weights (1, 1/3) of the transition reproduce the
bipotential exactly.  Optical pumping out of a sublevel is driven by the
opposite circular component,

    gamma_{+- -> -+}(r) = (2 Gamma0'/9) s_{-+}(r)  <=  (16/9) Gamma0'.

This normalization (prefactor 2/9 with the intensities above) is the one
convention this package uses everywhere; pumping-rate axes of other
conventions may differ by an overall factor, so comparisons against them
are shape comparisons.

The travelling modulation adds delta_u * cos(dk_x x - delta_m t) to both
sublevels for t >= t_on, with delta_u = (4/3) Delta0m' and
dk_x = 2 sin(phi).

All functions broadcast over positions: `r` may be a length-3 sequence or
an array of shape (..., 3).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .params import LatticeConfig, ModulationConfig, derive_wavevectors, \
    pump_rate_from_detuning


class InternalState(enum.IntEnum):
    """Ground sublevel of the two-state model; PLUS is |+1/2>."""

    PLUS = 1
    MINUS = -1

    def flipped(self) -> "InternalState":
        return InternalState(-self.value)


@dataclass(frozen=True)
class FieldSample:
    """Local field data for one (position, time, sublevel) query.

    potential in E_r, force = -grad(potential) in E_r*k (exact analytic
    gradient), pump_rate_away in omega_r (rate of leaving the current
    sublevel at this point).
    """

    potential: float
    force: np.ndarray
    pump_rate_away: float


def _cosines(r, cfg):
    r = np.asarray(r, dtype=float)
    kx, ky, kz = derive_wavevectors(cfg)
    a = np.cos(kx * r[..., 0])
    b = np.cos(ky * r[..., 1])
    c = np.cos(kz * r[..., 2])
    return a, b, c


def base_potential(r, state: InternalState, cfg: LatticeConfig):
    """Unperturbed bipotential U0_s(r) in E_r."""
    a, b, c = _cosines(r, cfg)
    coef = 8.0 * cfg.light_shift_per_beam / 3.0
    return coef * (a * a + b * b - int(state) * a * b * c)


def modulated_potential(r, t, state: InternalState, cfg: LatticeConfig,
                        mod: ModulationConfig):
    """Bipotential plus travelling modulation, in E_r.

    The modulation term is present only for t >= mod.t_on.
    """
    r = np.asarray(r, dtype=float)
    u = base_potential(r, state, cfg)
    gate = np.asarray(t, dtype=float) >= mod.t_on
    phase = mod.delta_kx * r[..., 0] - mod.delta_m * np.asarray(t, dtype=float)
    return u + mod.delta_u * np.cos(phase) * gate


def force(r, t, state: InternalState, cfg: LatticeConfig,
          mod: ModulationConfig):
    """Analytic force -grad(U_s) at (r, t), in E_r*k, shape (..., 3)."""
    r = np.asarray(r, dtype=float)
    kx, ky, kz = derive_wavevectors(cfg)
    coef = 8.0 * cfg.light_shift_per_beam / 3.0
    s = int(state)
    a = np.cos(kx * r[..., 0])
    b = np.cos(ky * r[..., 1])
    c = np.cos(kz * r[..., 2])
    sa = np.sin(kx * r[..., 0])
    sb = np.sin(ky * r[..., 1])
    sc = np.sin(kz * r[..., 2])
    fx = coef * kx * sa * (2.0 * a - s * b * c)
    fy = coef * ky * sb * (2.0 * b - s * a * c)
    fz = -coef * kz * sc * (s * a * b)
    gate = np.asarray(t, dtype=float) >= mod.t_on
    phase = mod.delta_kx * r[..., 0] - mod.delta_m * np.asarray(t, dtype=float)
    fx = fx + mod.delta_u * mod.delta_kx * np.sin(phase) * gate
    return np.stack(np.broadcast_arrays(fx, fy, fz), axis=-1)


def sigma_intensities(r, cfg: LatticeConfig):
    """Local sigma+ and sigma- intensities (s_plus, s_minus), dimensionless.

    Both components are >= 0 everywhere and satisfy
    s_plus + s_minus = 4 [cos^2(kx x) + cos^2(ky y)].
    """
    a, b, c = _cosines(r, cfg)
    sq = a * a + b * b
    cross = 2.0 * a * b * c
    return 2.0 * (sq - cross), 2.0 * (sq + cross)


def pump_rate(r, state: InternalState, cfg: LatticeConfig):
    """Rate of pumping out of `state` at r, (2 Gamma0'/9) s_opposite, in omega_r."""
    gamma0 = pump_rate_from_detuning(cfg)
    a, b, c = _cosines(r, cfg)
    s_opp = 2.0 * (a * a + b * b + 2.0 * int(state) * a * b * c)
    return (2.0 * gamma0 / 9.0) * s_opp


def sample_fields(r, t, state: InternalState, cfg: LatticeConfig,
                  mod: ModulationConfig) -> FieldSample:
    """Evaluate potential, force and departure rate at one point."""
    return FieldSample(
        potential=float(modulated_potential(r, t, state, cfg, mod)),
        force=np.asarray(force(r, t, state, cfg, mod), dtype=float),
        pump_rate_away=float(pump_rate(r, state, cfg)),
    )
