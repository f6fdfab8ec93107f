"""Reproducible atom ensembles, center-of-mass observables, and sweeps.

Every trajectory gets its own random stream derived from
SeedSequence(master_seed, spawn_key=(point_index, trajectory_index)), and
each stream is consumed only by its own trajectory (initial draws first,
then the jump process).  Results are therefore bit-identical for a fixed
master seed regardless of the number of worker threads, and growing an
ensemble only appends trajectories without disturbing existing ones.
Sweeps derive one point index per ensemble, so points are independent.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dynamics import Recoil, AtomState, _kernel_params, _trajectory_kernel, \
    recommended_dt
from .errors import AnalysisError, ConfigurationError, IntegratorFault
from .fields import InternalState
from .params import LatticeConfig, ModulationConfig, RECOIL_VELOCITY, \
    brillouin_frequency, derive_wavevectors, well_depth

#: Fraction of the modulated window discarded before fitting (mode lock-in
#: is not instantaneous; the fitted stretch is the uniform-motion part).
TRANSIENT_FRACTION = 0.25
BOOTSTRAP_RESAMPLES = 200
_BOOTSTRAP_TAG = 0xB007
_AXES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble size, seeding, schedule, and initial-condition spreads.

    burn_in and run_time in 1/omega_r; thermal_spread is the per-axis
    initial kinetic energy as a fraction of the deep-well depth;
    position_spread is the per-axis Gaussian position sigma as a fraction
    of the x lattice period; sample_stride in integrator steps.
    """

    n_atoms: int = 1000
    master_seed: int = 0
    burn_in: float = 200.0
    run_time: float = 500.0
    thermal_spread: float = 0.05
    sample_stride: int = 500
    position_spread: float = 0.05

    def __post_init__(self):
        if not (isinstance(self.n_atoms, int) and self.n_atoms >= 1):
            raise ConfigurationError(f"n_atoms must be >= 1, got {self.n_atoms!r}")
        if not (isinstance(self.master_seed, int)
                and 0 <= self.master_seed < 2 ** 64):
            raise ConfigurationError(
                f"master_seed must be a 64-bit unsigned int, got {self.master_seed!r}")
        if not self.burn_in >= 0.0:
            raise ConfigurationError(f"burn_in must be >= 0, got {self.burn_in!r}")
        if not self.run_time > 0.0:
            raise ConfigurationError(f"run_time must be > 0, got {self.run_time!r}")
        if not self.thermal_spread >= 0.0:
            raise ConfigurationError(
                f"thermal_spread must be >= 0, got {self.thermal_spread!r}")
        if not (isinstance(self.sample_stride, int) and self.sample_stride >= 1):
            raise ConfigurationError(
                f"sample_stride must be >= 1, got {self.sample_stride!r}")
        if not self.position_spread >= 0.0:
            raise ConfigurationError(
                f"position_spread must be >= 0, got {self.position_spread!r}")


@dataclass
class EnsembleResult:
    """Center-of-mass time series of one ensemble run.

    times (1/omega_r) cover the modulated window only; cm_position and
    position_variance are (n_samples, 3) in 1/k and (1/k)^2.
    atom_positions, when kept, is the full (n_atoms, n_samples, 3) sample
    block used for bootstrap errors.
    """

    times: np.ndarray
    cm_position: np.ndarray
    position_variance: np.ndarray
    n_atoms: int
    lattice: LatticeConfig
    modulation: ModulationConfig
    spec: EnsembleSpec
    master_seed: int
    dt: float
    n_flips: int
    atom_positions: Optional[np.ndarray] = None


@dataclass
class SweepResult:
    """Fitted CM velocities (v_r) against one knob, plus derived amplitude.

    For a pump-rate sweep the v_cx/v_cz columns hold the peak-to-peak
    amplitudes xi = v(+Omega_B) - v(-Omega_B) per knob value.  xi/xi_err
    are set when the sweep contains the +-Omega_B pair explicitly.
    """

    knob_name: str
    knob_values: np.ndarray
    v_cx: np.ndarray
    v_cx_err: np.ndarray
    v_cz: np.ndarray
    v_cz_err: np.ndarray
    xi: Optional[float] = None
    xi_err: Optional[float] = None


def _trajectory_rng(master_seed: int, point_index: int,
                    trajectory_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed,
                                spawn_key=(point_index, trajectory_index))
    return np.random.Generator(np.random.PCG64(ss))


def _draw_initial(spec: EnsembleSpec, cfg: LatticeConfig,
                  rng: np.random.Generator):
    """Place one atom near a random well bottom with its protected sublevel.

    Sites are the half-period lattice points; the parity of the site
    index triple decides whether it is a sigma- well (MINUS) or a sigma+
    well (PLUS).  Draw order (site, position, velocity) is part of the
    reproducibility contract.
    """
    kx, ky, kz = derive_wavevectors(cfg)
    site = rng.integers(-1, 2, size=3)
    g_pos = rng.standard_normal(3)
    g_vel = rng.standard_normal(3)
    lambda_x = 2.0 * math.pi / kx
    sigma_p = spec.position_spread * lambda_x
    # per-axis kinetic energy sigma_v^2 = thermal_spread * depth (E_r)
    sigma_v = math.sqrt(spec.thermal_spread * well_depth(cfg))
    half = np.array([math.pi / kx, math.pi / ky, math.pi / kz])
    pos = site * half + sigma_p * g_pos
    vel = sigma_v * g_vel
    internal = InternalState.MINUS if int(site.sum()) % 2 == 0 \
        else InternalState.PLUS
    return pos, vel, internal


def init_ensemble(spec: EnsembleSpec, cfg: LatticeConfig,
                  point_index: int = 0) -> list[AtomState]:
    """Initial states exactly as run_ensemble draws them for this point."""
    states = []
    for i in range(spec.n_atoms):
        rng = _trajectory_rng(spec.master_seed, point_index, i)
        pos, vel, internal = _draw_initial(spec, cfg, rng)
        states.append(AtomState(position=pos, velocity=vel,
                                internal=internal, time=0.0))
    return states


def _schedule(spec: EnsembleSpec, cfg: LatticeConfig):
    """Derive (dt, n_burn, n_run) with dt snapped so run_time = n_run*dt."""
    cap = recommended_dt(cfg)
    n_run = max(1, int(math.ceil(spec.run_time / cap - 1e-9)))
    dt = spec.run_time / n_run
    n_burn = int(math.ceil(spec.burn_in / dt - 1e-9)) if spec.burn_in > 0 else 0
    return dt, n_burn, n_run


def run_ensemble(spec: EnsembleSpec, cfg: LatticeConfig, mod: ModulationConfig,
                 *, threads: Optional[int] = None, point_index: int = 0,
                 recoil: Recoil = Recoil.ISOTROPIC,
                 same_state_heating: bool = False,
                 keep_atom_positions: bool = True) -> EnsembleResult:
    """Burn in with the modulation off, then record the modulated window.

    The modulation switch-on is pinned to the end of the burn-in
    (mod.t_on is overridden); CM and cloud variance are recorded only for
    t >= burn-in, every sample_stride steps.
    """
    dt, n_burn, n_run = _schedule(spec, cfg)
    n_total = n_burn + n_run
    stride = spec.sample_stride
    mod_eff = replace(mod, t_on=n_burn * dt)
    kparams = _kernel_params(cfg, mod_eff)
    recoil_on = recoil is Recoil.ISOTROPIC

    n_samples = (n_total - n_burn) // stride + 1
    times = (n_burn + stride * np.arange(n_samples)) * dt
    pos_store = np.empty((spec.n_atoms, n_samples, 3))
    flips = np.zeros(spec.n_atoms, dtype=np.int64)
    faults = [None] * spec.n_atoms

    _warm_up_kernel()

    def one_atom(i):
        rng = _trajectory_rng(spec.master_seed, point_index, i)
        pos, vel, internal = _draw_initial(spec, cfg, rng)
        dummy_vel = np.empty((0, 3))
        dummy_int = np.empty(0, dtype=np.int8)
        _, nf, written, fault = _trajectory_kernel(
            pos, vel, int(internal), 0.0, n_total, dt, *kparams,
            n_burn, stride, False, recoil_on, False, same_state_heating,
            False, pos_store[i], dummy_vel, dummy_int, rng)
        if fault >= 0:
            faults[i] = fault
        else:
            assert written == n_samples
            flips[i] = nf

    n_workers = threads if threads is not None else (os.cpu_count() or 1)
    if n_workers > 1 and spec.n_atoms > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one_atom, range(spec.n_atoms)))
    else:
        for i in range(spec.n_atoms):
            one_atom(i)

    for i, fault in enumerate(faults):
        if fault is not None:
            raise IntegratorFault(fault, trajectory_index=i)

    cm = pos_store.mean(axis=0)
    ddof = 1 if spec.n_atoms > 1 else 0
    var = pos_store.var(axis=0, ddof=ddof)
    return EnsembleResult(
        times=times, cm_position=cm, position_variance=var,
        n_atoms=spec.n_atoms, lattice=cfg, modulation=mod_eff, spec=spec,
        master_seed=spec.master_seed, dt=dt, n_flips=int(flips.sum()),
        atom_positions=pos_store if keep_atom_positions else None)


_KERNEL_WARM = False


def _warm_up_kernel():
    """Compile the kernel once before worker threads race to use it."""
    global _KERNEL_WARM
    if _KERNEL_WARM:
        return
    pos = np.zeros(3)
    vel = np.zeros(3)
    _trajectory_kernel(pos, vel, -1, 0.0, 0, 1e-3,
                       0.5, 0.5, 1.7, -500.0, 4.0, 0.0, 0.3, 1.0, 0.0,
                       0, 1, False, True, False, False, False,
                       np.empty((1, 3)), np.empty((1, 3)),
                       np.empty(1, dtype=np.int8), np.random.default_rng(0))
    _KERNEL_WARM = True


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        try:
            return _AXES[axis.lower()]
        except KeyError:
            raise AnalysisError(f"unknown axis {axis!r}") from None
    if axis in (0, 1, 2):
        return int(axis)
    raise AnalysisError(f"unknown axis {axis!r}")


def _fit_window(result: EnsembleResult):
    t = np.asarray(result.times, dtype=float)
    if t.size < 2:
        raise AnalysisError("need at least two samples to fit")
    keep = t >= t[0] + TRANSIENT_FRACTION * (t[-1] - t[0])
    if int(keep.sum()) < 10:
        raise AnalysisError(
            f"only {int(keep.sum())} samples left after the transient cut; "
            "need >= 10")
    return keep


def _ols_slope(t: np.ndarray, y: np.ndarray):
    """Least-squares slope and its residual-based standard error."""
    tc = t - t.mean()
    stt = float(tc @ tc)
    slope = float(tc @ y) / stt
    resid = y - y.mean() - slope * tc
    dof = t.size - 2
    se = math.sqrt(float(resid @ resid) / dof / stt) if dof > 0 else 0.0
    return slope, se, tc, stt


def fit_cm_velocity(result: EnsembleResult, axis="x"):
    """CM drift velocity along `axis` in v_r, with its standard error.

    Ordinary least squares on the CM samples after the transient cut;
    the error is the larger of the residual-based slope error and a
    bootstrap over atoms (exploits that the OLS slope is the mean of the
    per-atom slopes).
    """
    ai = _axis_index(axis)
    keep = _fit_window(result)
    t = result.times[keep]
    c = result.cm_position[keep, ai]
    slope, se, tc, stt = _ols_slope(t, c)
    if result.atom_positions is not None and result.n_atoms > 1:
        w = tc / stt
        per_atom = result.atom_positions[:, keep, ai] @ w
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
            result.master_seed, spawn_key=(_BOOTSTRAP_TAG, ai))))
        idx = rng.integers(0, result.n_atoms,
                           size=(BOOTSTRAP_RESAMPLES, result.n_atoms))
        se = max(se, float(per_atom[idx].mean(axis=1).std(ddof=1)))
    return slope / RECOIL_VELOCITY, se / RECOIL_VELOCITY


def diffusion_coefficient(result: EnsembleResult, axis="x"):
    """Diffusion coefficient along `axis` in (1/k)^2 omega_r, with error.

    Half the fitted slope of the cloud position variance over the same
    window used for the velocity fit.
    """
    ai = _axis_index(axis)
    keep = _fit_window(result)
    t = result.times[keep]
    v = result.position_variance[keep, ai]
    slope, se, tc, stt = _ols_slope(t, v)
    if result.atom_positions is not None and result.n_atoms > 2:
        w = tc / stt
        a = result.atom_positions[:, keep, ai]
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
            result.master_seed, spawn_key=(_BOOTSTRAP_TAG + 1, ai))))
        slopes = np.empty(BOOTSTRAP_RESAMPLES)
        for b in range(BOOTSTRAP_RESAMPLES):
            idx = rng.integers(0, result.n_atoms, size=result.n_atoms)
            slopes[b] = a[idx].var(axis=0, ddof=1) @ w
        se = max(se, float(slopes.std(ddof=1)))
    return slope / 2.0, se / 2.0


def sweep_delta_m(spec: EnsembleSpec, cfg: LatticeConfig,
                  mod_base: ModulationConfig, deltas,
                  *, threads: Optional[int] = None) -> SweepResult:
    """One ensemble + fit per drive detuning; x and z components."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size == 0:
        raise ConfigurationError("deltas must be non-empty")
    vx = np.empty(deltas.size)
    ex = np.empty(deltas.size)
    vz = np.empty(deltas.size)
    ez = np.empty(deltas.size)
    for i, d in enumerate(deltas):
        res = run_ensemble(spec, cfg, replace(mod_base, delta_m=float(d)),
                           threads=threads, point_index=i)
        vx[i], ex[i] = fit_cm_velocity(res, "x")
        vz[i], ez[i] = fit_cm_velocity(res, "z")
    sweep = SweepResult(knob_name="delta_m", knob_values=deltas,
                        v_cx=vx, v_cx_err=ex, v_cz=vz, v_cz_err=ez)
    try:
        sweep.xi, sweep.xi_err = compute_xi(
            sweep, omega_b=brillouin_frequency(cfg, mod_base))
    except AnalysisError:
        pass
    return sweep


def _match_knob(values: np.ndarray, target: float) -> int:
    tol = 1e-9 * max(1.0, abs(target))
    hits = np.nonzero(np.abs(values - target) <= tol)[0]
    if hits.size == 0:
        raise AnalysisError(
            f"sweep does not contain a point at delta_m = {target!r}")
    return int(hits[0])


def compute_xi(sweep: SweepResult, omega_b: Optional[float] = None):
    """Peak-to-peak amplitude v_cx(+Omega_B) - v_cx(-Omega_B), in v_r.

    With omega_b given, the sweep must contain both +omega_b and
    -omega_b; without it the sweep must be an explicit two-point pair
    (+d, -d).  The error is the quadrature sum of the two point errors,
    which makes xi immune to any uniform velocity offset common to both
    points.
    """
    if sweep.knob_name != "delta_m":
        raise AnalysisError(
            f"xi is defined on a delta_m sweep, not {sweep.knob_name!r}")
    values = np.asarray(sweep.knob_values, dtype=float)
    if omega_b is None:
        if values.size != 2 or not math.isclose(values[0], -values[1],
                                                rel_tol=1e-9, abs_tol=0.0):
            raise AnalysisError(
                "pair mode needs exactly two opposite detunings")
        omega_b = float(abs(values[0]))
    if omega_b <= 0.0:
        raise AnalysisError(f"omega_b must be positive, got {omega_b!r}")
    ip = _match_knob(values, +omega_b)
    im = _match_knob(values, -omega_b)
    xi = float(sweep.v_cx[ip] - sweep.v_cx[im])
    err = math.sqrt(float(sweep.v_cx_err[ip]) ** 2
                    + float(sweep.v_cx_err[im]) ** 2)
    return xi, err


def sweep_pump_rate(spec: EnsembleSpec, cfg_base: LatticeConfig,
                    mod: ModulationConfig, gammas,
                    *, threads: Optional[int] = None) -> SweepResult:
    """Amplitude xi(Gamma0') at fixed well depth and fixed modulation.

    For each pumping rate the lattice depth (light shift) is kept as in
    cfg_base and only pump_rate_override changes; the +-Omega_B pair is
    run as two independent ensembles (point indices 2i and 2i+1).
    """
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size == 0:
        raise ConfigurationError("gammas must be non-empty")
    omega_b = brillouin_frequency(cfg_base, mod)
    xi_x = np.empty(gammas.size)
    xi_x_err = np.empty(gammas.size)
    xi_z = np.empty(gammas.size)
    xi_z_err = np.empty(gammas.size)
    for i, g in enumerate(gammas):
        cfg = replace(cfg_base, pump_rate_override=float(g))
        res_p = run_ensemble(spec, cfg, replace(mod, delta_m=+omega_b),
                             threads=threads, point_index=2 * i)
        res_m = run_ensemble(spec, cfg, replace(mod, delta_m=-omega_b),
                             threads=threads, point_index=2 * i + 1)
        vxp, exp_ = fit_cm_velocity(res_p, "x")
        vxm, exm = fit_cm_velocity(res_m, "x")
        vzp, ezp = fit_cm_velocity(res_p, "z")
        vzm, ezm = fit_cm_velocity(res_m, "z")
        xi_x[i] = vxp - vxm
        xi_x_err[i] = math.sqrt(exp_ ** 2 + exm ** 2)
        xi_z[i] = vzp - vzm
        xi_z_err[i] = math.sqrt(ezp ** 2 + ezm ** 2)
    return SweepResult(knob_name="pump_rate", knob_values=gammas,
                       v_cx=xi_x, v_cx_err=xi_x_err,
                       v_cz=xi_z, v_cz_err=xi_z_err)
