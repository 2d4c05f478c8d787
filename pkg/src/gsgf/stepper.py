"""Time integration of the Fourier-Galerkin system for the velocity modes.

The prognostic variable is ``u_hat``.  Each step evaluates ``dv/dt`` from
:func:`gsgf.nonlinear.momentum_rhs` and divides by the Helmholtz multiplier
``1 + alpha1 |k|^2`` to get ``du/dt``.

After every step the state is passed through physical space and re-projected
(:meth:`SimState.from_physical`).  The physical samples are what snapshots
store, so a resumed run starts from bit-identical modes.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .constitutive import ConstitutiveLaw
from .diagnostics import EnergyRecord, energy_residual, make_record
from .field_ops import helmholtz_solve, leray_project, remove_mean, strain
from .grid import Grid, forward_transform, inverse_transform, truncate
from .nonlinear import momentum_rhs

logger = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e12
CFL_SAFETY = 0.4
# extent of the RK4 stability region on the negative real axis
RK4_REAL_LIMIT = 2.785
SCHEMES = ("rk4", "imex")


class BlowUpError(RuntimeError):
    """Non-finite or runaway modes; ``records`` holds what was computed before."""

    def __init__(self, message: str, records: list | None = None, state: "SimState | None" = None):
        super().__init__(message)
        self.records = records or []
        self.state = state


@dataclass(frozen=True)
class InitialCondition:
    """``kind`` is one of ``taylor_green``, ``shear``, ``random_band``, ``file``."""

    kind: str = "taylor_green"
    amplitude: float = 1.0
    kmin: float = 1.0
    kmax: float = 4.0
    seed: int | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("taylor_green", "shear", "random_band", "file"):
            raise ValueError(f"unknown initial condition {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ValueError("file initial condition needs a path")
        if self.kind == "random_band" and not (0 <= self.kmin <= self.kmax):
            raise ValueError(f"random_band needs 0 <= kmin <= kmax, got {self.kmin}, {self.kmax}")


@dataclass(frozen=True)
class Forcing:
    """``kind`` is ``none``, ``steady_mode`` (``k``, ``amplitude``) or ``manufactured``.

    ``manufactured`` makes the initial condition a steady solution.
    """

    kind: str = "none"
    k: tuple[int, ...] = ()
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("none", "steady_mode", "manufactured"):
            raise ValueError(f"unknown forcing {self.kind!r}")
        if self.kind == "steady_mode" and (not self.k or not any(self.k)):
            raise ValueError("steady_mode forcing needs a nonzero wavenumber k")


@dataclass(frozen=True)
class SimParams:
    grid: Grid
    law: ConstitutiveLaw
    alpha1: float
    dt: float
    t_end: float
    scheme: str = "rk4"
    forcing: Forcing = field(default_factory=Forcing)
    ic: InitialCondition = field(default_factory=InitialCondition)
    seed: int = 0
    # test hook: False drops the stress term entirely
    stress: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ValueError(f"t_end ({self.t_end}) must be >= dt ({self.dt})")
        if self.alpha1 < 0:
            raise ValueError(f"alpha1 must be nonnegative, got {self.alpha1}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")

    @property
    def active_law(self) -> ConstitutiveLaw | None:
        return self.law if self.stress else None

    @property
    def steps(self) -> int:
        """Number of steps to reach ``t_end`` (rounded up to a multiple of ``dt``)."""
        return math.ceil(self.t_end / self.dt - 1e-9)


@dataclass(frozen=True, eq=False)
class SimState:
    """Time, velocity modes, and the physical samples those modes came from."""

    t: float
    u_hat: np.ndarray
    u: np.ndarray

    @classmethod
    def from_physical(cls, t: float, u: np.ndarray, grid: Grid) -> "SimState":
        u = np.ascontiguousarray(u, dtype=float)
        return cls(t=float(t), u_hat=project_initial(forward_transform(u, grid), grid), u=u)

    @classmethod
    def from_modes(cls, t: float, u_hat: np.ndarray, grid: Grid) -> "SimState":
        return cls.from_physical(t, inverse_transform(u_hat, grid), grid)


def project_initial(u0_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Orthogonal projection onto resolved, zero-mean, divergence-free modes."""
    return leray_project(remove_mean(truncate(u0_hat, grid), grid), grid)


# --- initial data and forcing --------------------------------------------------


def _taylor_green(grid: Grid, amplitude: float) -> np.ndarray:
    x = grid.points
    if grid.dim == 2:
        return amplitude * np.array([np.sin(x[0]) * np.cos(x[1]), -np.cos(x[0]) * np.sin(x[1])])
    return amplitude * np.array([
        np.sin(x[0]) * np.cos(x[1]) * np.cos(x[2]),
        -np.cos(x[0]) * np.sin(x[1]) * np.cos(x[2]),
        np.zeros(grid.shape),
    ])


def random_band_field(grid: Grid, kmin: float, kmax: float, amplitude: float, seed: int) -> np.ndarray:
    """Random solenoidal modes with ``kmin <= |k| <= kmax`` and RMS speed ``amplitude``."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((grid.dim,) + grid.shape)
    k = np.sqrt(grid.stokes_eigenvalues)
    band = (k >= kmin) & (k <= kmax)
    u_hat = project_initial(forward_transform(noise, grid) * band, grid)
    rms = math.sqrt(float(np.sum(np.abs(u_hat) ** 2)))
    if rms == 0:
        raise ValueError(f"band [{kmin}, {kmax}] holds no resolved modes")
    return u_hat * (amplitude / rms)


def initial_state(params: SimParams) -> SimState:
    grid, ic = params.grid, params.ic
    if ic.kind == "taylor_green":
        u_hat = forward_transform(_taylor_green(grid, ic.amplitude), grid)
    elif ic.kind == "shear":
        u = np.zeros((grid.dim,) + grid.shape)
        u[0] = ic.amplitude * np.sin(grid.points[1])
        u_hat = forward_transform(u, grid)
    elif ic.kind == "random_band":
        seed = params.seed if ic.seed is None else ic.seed
        u_hat = random_band_field(grid, ic.kmin, ic.kmax, ic.amplitude, seed)
    else:
        from .cli_io.persistence import read_snapshot

        return read_snapshot(ic.path, grid)
    return SimState.from_modes(0.0, project_initial(u_hat, grid), grid)


def forcing_field(params: SimParams) -> np.ndarray | None:
    """Spectral forcing for the run; ``None`` when unforced."""
    grid, forcing = params.grid, params.forcing
    if forcing.kind == "none":
        return None
    if forcing.kind == "manufactured":
        u_star = initial_state(params).u_hat
        return -momentum_rhs(u_star, grid, params.active_law, params.alpha1)
    k = np.asarray(forcing.k, dtype=float)
    if k.shape != (grid.dim,) or np.any(np.abs(k) >= grid.n // 2):
        raise ValueError(f"forcing wavenumber {forcing.k} is not a resolved mode of the grid")
    axis = int(np.argmin(np.abs(k)))
    e = np.eye(grid.dim)[axis] - k[axis] * k / float(k @ k)
    e /= np.linalg.norm(e)
    phase = np.tensordot(k, grid.points, axes=1)
    f = forcing.amplitude * e.reshape((grid.dim,) + (1,) * grid.dim) * np.sin(phase)
    return project_initial(forward_transform(f, grid), grid)


# --- right-hand side and steps ---------------------------------------------------


def _du_dt(u_hat, params, f_hat):
    rhs = momentum_rhs(u_hat, params.grid, params.active_law, params.alpha1, f_hat)
    return helmholtz_solve(rhs, params.grid, params.alpha1)


def time_derivative(state: SimState, params: SimParams, f_hat: np.ndarray | None = None) -> np.ndarray:
    """``du/dt = (I - alpha1 Lap)^-1 P[...]`` for the current state."""
    return _du_dt(state.u_hat, params, f_hat)


def _finish(u_hat: np.ndarray, t: float, params: SimParams) -> SimState:
    if not np.all(np.isfinite(u_hat)) or np.max(np.abs(u_hat)) > BLOWUP_THRESHOLD:
        raise BlowUpError(f"blow-up or unstable dt at t = {t:.6g}")
    return SimState.from_modes(t, u_hat, params.grid)


def step_rk4(state: SimState, params: SimParams, f_hat: np.ndarray | None = None,
             t_next: float | None = None) -> SimState:
    """Classical four-stage Runge-Kutta step."""
    dt = params.dt
    u0 = state.u_hat
    k1 = _du_dt(u0, params, f_hat)
    k2 = _du_dt(u0 + 0.5 * dt * k1, params, f_hat)
    k3 = _du_dt(u0 + 0.5 * dt * k2, params, f_hat)
    k4 = _du_dt(u0 + dt * k3, params, f_hat)
    u1 = u0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _finish(u1, state.t + dt if t_next is None else t_next, params)


def linear_viscosity(params: SimParams) -> float:
    """``mu0^(r-2)``: the zero-shear slope of the stress, treated implicitly by IMEX."""
    if not params.stress:
        return 0.0
    return params.law.mu0 ** (params.law.r - 2.0)


def step_imex(state: SimState, params: SimParams, f_hat: np.ndarray | None = None,
              t_next: float | None = None) -> SimState:
    """IMEX Euler: ``(mu0^(r-2)/2) Lap u`` implicit, the remaining stress and advection explicit."""
    grid, dt = params.grid, params.dt
    nu = linear_viscosity(params)
    helm = 1.0 + params.alpha1 * grid.stokes_eigenvalues
    lin = 0.5 * nu * grid.stokes_eigenvalues / helm
    u0 = state.u_hat
    explicit = _du_dt(u0, params, f_hat) + lin * u0
    u1 = (u0 + dt * explicit) / (1.0 + dt * lin)
    return _finish(u1, state.t + dt if t_next is None else t_next, params)


STEPPERS: dict[str, Callable] = {"rk4": step_rk4, "imex": step_imex}


def cfl_dt(state: SimState, params: SimParams) -> float:
    """``0.4 min(dx / |u|_max, RK4_REAL_LIMIT / lambda_max)``.

    ``lambda_max = nu_eff k2 / (2 (1 + alpha1 k2))`` at the largest lattice
    ``k2`` is the stiffest eigenvalue of the linearized stress term, with
    ``nu_eff`` the largest pointwise eigenvalue of the stress Jacobian at ``Du``
    (at most ``(r-1) (mu0 + mu1 |Du|)^(r-2)``).
    """
    grid, law = params.grid, params.law
    dx = grid.spacing
    speed = float(np.max(np.sqrt(np.sum(state.u**2, axis=0))))
    D = strain(state.u_hat, grid)
    mag = np.sqrt(np.sum(D * D, axis=(0, 1)))
    # largest eigenvalue of the stress Jacobian, pointwise
    slope = 1.0 + (law.r - 2.0) * law.mu1 * mag / (law.mu0 + law.mu1 * mag)
    nu_eff = float(np.max(law.viscosity(mag) * slope))
    k2max = float(np.max(grid.stokes_eigenvalues))
    lam = 0.5 * nu_eff * k2max / (1.0 + params.alpha1 * k2max)
    diffusive = RK4_REAL_LIMIT / lam
    advective = dx / speed if speed > 0 else math.inf
    return CFL_SAFETY * min(advective, diffusive)


# --- driver ---------------------------------------------------------------------


def trajectory(params: SimParams, state: SimState, f_hat: np.ndarray | None = None,
               steps: int | None = None) -> Iterator[SimState]:
    """Yield successive states after each step, with ``t = step_index * dt`` exactly."""
    step = STEPPERS[params.scheme]
    index = round(state.t / params.dt)
    last = params.steps if steps is None else index + steps
    while index < last:
        index += 1
        state = step(state, params, f_hat, t_next=index * params.dt)
        yield state


@dataclass
class RunResult:
    state: SimState
    records: list[EnergyRecord]
    snapshots: list[SimState]


def run(
    params: SimParams,
    start: SimState | None = None,
    snapshot_every: int = 0,
    on_snapshot: Callable[[SimState], None] | None = None,
) -> RunResult:
    """Integrate to ``t_end``, recording diagnostics every step.

    ``start`` resumes from a saved state; its time must be a multiple of ``dt``.
    Snapshots are taken at step indices divisible by ``snapshot_every``.
    """
    params.law.warn_if_outside_theorem()
    if abs(params.steps * params.dt - params.t_end) > 1e-12 * params.t_end:
        warnings.warn(
            f"t_end = {params.t_end} is not a multiple of dt; running to {params.steps * params.dt}",
            stacklevel=2,
        )
    f_hat = forcing_field(params)
    first = initial_state(params) if start is None else start
    state = first
    law = params.active_law
    records = [make_record(state.t, state.u_hat, params.grid, law, params.alpha1, f_hat)]
    snapshots: list[SimState] = []
    try:
        for state in trajectory(params, first, f_hat):
            rec = make_record(state.t, state.u_hat, params.grid, law, params.alpha1, f_hat)
            rec = dataclasses.replace(rec, energy_residual=energy_residual(records[-1], rec, params.dt))
            records.append(rec)
            if snapshot_every and round(state.t / params.dt) % snapshot_every == 0:
                snapshots.append(state)
                if on_snapshot is not None:
                    on_snapshot(state)
    except BlowUpError as exc:
        exc.records = records
        exc.state = state
        logger.error("%s", exc)
        raise
    return RunResult(state=state, records=records, snapshots=snapshots)
