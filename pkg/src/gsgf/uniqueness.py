"""Twin-run continuous-dependence experiment.

Two trajectories start from ``u0`` and ``u0 + delta e`` and are stepped in
lockstep.  Along the way we record the difference energy
``W = ||w||^2 + alpha1 ||grad w||^2`` (with ``w`` the difference) and the
Gronwall factor

    F = ||grad u||^2 + ||grad ub||^2 + ||grad^2 ub||^2 + ||grad w||^2 + ||grad^2 w||^2

where ``u`` is the base run and ``ub`` the perturbed one.  The growth
constant ``c`` is not known a priori; :func:`calibrate` picks the smallest
``c`` with ``log(W/W0) <= c int F`` on one run and :func:`gronwall_study`
checks that it transfers to a second perturbation size.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .diagnostics import l2_energy_norm
from .field_ops import norm_sq
from .stepper import SimParams, SimState, forcing_field, initial_state, random_band_field, trajectory

DIRECTIONS = ("random", "taylor_green")


@dataclasses.dataclass
class TwinRecord:
    """Time series of one base/perturbed pair."""

    delta: float
    t: np.ndarray
    W: np.ndarray
    F: np.ndarray
    bitwise_equal: bool

    @property
    def int_F(self) -> np.ndarray:
        """Trapezoid-rule ``int_0^t F``."""
        out = np.zeros_like(self.F)
        out[1:] = np.cumsum(0.5 * (self.F[1:] + self.F[:-1]) * np.diff(self.t))
        return out

    @property
    def log_growth(self) -> np.ndarray:
        """``log(W(t) / W(0))``; undefined when ``W(0) = 0``."""
        if self.W[0] == 0:
            return np.full_like(self.W, math.nan)
        with np.errstate(divide="ignore"):
            return np.log(self.W / self.W[0])


def _seminorms(u_hat: np.ndarray, lam: np.ndarray, volume: float) -> tuple[float, float]:
    p = np.sum(np.abs(u_hat) ** 2, axis=0)
    return volume * float(np.sum(lam * p)), volume * float(np.sum(lam * lam * p))


def perturbation_direction(params: SimParams, kind: str = "random", seed: int | None = None) -> np.ndarray:
    """Unit ``L^2``-norm divergence-free direction in physical space."""
    grid = params.grid
    if kind == "random":
        seed = params.seed + 1 if seed is None else seed
        e_hat = random_band_field(grid, 1.0, 4.0, 1.0, seed)
    elif kind == "taylor_green":
        tg = dataclasses.replace(params, ic=dataclasses.replace(params.ic, kind="taylor_green", amplitude=1.0))
        e_hat = initial_state(tg).u_hat
    else:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {kind!r}")
    e_hat = e_hat / math.sqrt(norm_sq(e_hat, grid))
    return SimState.from_modes(0.0, e_hat, grid).u


def twin_runs(params: SimParams, deltas: list[float], direction: np.ndarray | None = None) -> list[TwinRecord]:
    """Step one base run and one perturbed run per ``delta`` together.

    Blow-up in any run raises :class:`gsgf.stepper.BlowUpError`.
    """
    if any(d < 0 for d in deltas):
        raise ValueError("perturbation sizes must be nonnegative")
    grid = params.grid
    lam, vol = grid.stokes_eigenvalues, grid.volume
    if direction is None:
        direction = perturbation_direction(params)
    f_hat = forcing_field(params)
    base0 = initial_state(params)
    starts = [SimState.from_physical(0.0, base0.u + d * direction, grid) for d in deltas]

    times, W, F = [], [[] for _ in deltas], [[] for _ in deltas]
    equal = [True] * len(deltas)

    def observe(base: SimState, others: list[SimState]) -> None:
        times.append(base.t)
        g_base, _ = _seminorms(base.u_hat, lam, vol)
        for i, other in enumerate(others):
            w = other.u_hat - base.u_hat
            W[i].append(l2_energy_norm(w, grid, params.alpha1))
            g_o, h_o = _seminorms(other.u_hat, lam, vol)
            g_w, h_w = _seminorms(w, lam, vol)
            F[i].append(g_base + g_o + h_o + g_w + h_w)
            equal[i] = equal[i] and np.array_equal(base.u, other.u)

    observe(base0, starts)
    runs = [trajectory(params, s, f_hat) for s in starts]
    for base in trajectory(params, base0, f_hat):
        observe(base, [next(r) for r in runs])

    t = np.array(times)
    return [TwinRecord(d, t, np.array(W[i]), np.array(F[i]), equal[i]) for i, d in enumerate(deltas)]


def uniqueness_experiment(params: SimParams, delta: float, direction: np.ndarray | None = None) -> TwinRecord:
    """Base run against a single perturbation of size ``delta``."""
    return twin_runs(params, [delta], direction)[0]


def calibrate(record: TwinRecord) -> float:
    """Smallest ``c`` with ``log(W/W0) <= c int_0^t F`` at every recorded time."""
    growth, integral = record.log_growth[1:], record.int_F[1:]
    ok = integral > 0
    if record.W[0] == 0 or not np.any(ok):
        return math.nan
    return float(np.max(growth[ok] / integral[ok]))


def envelope_excess(record: TwinRecord, c: float, slack: float = 0.0) -> float:
    """Largest ``log(W/W0) - (c + slack) int F``; nonpositive when the envelope holds."""
    return float(np.max(record.log_growth - (c + slack) * record.int_F))


@dataclasses.dataclass
class GronwallReport:
    c: float
    c_half: float
    stability: float          # |c_half - c| / |c|
    envelope_excess: float    # of the half-delta run against c (with slack)
    sqrt_w_ratio: float       # sqrt(W_half(T) / W(T)), ideally 1/2
    records: list[TwinRecord]

    def passed(self, stability_tol: float = 0.01, ratio_tol: float = 0.01) -> bool:
        return (
            self.stability <= stability_tol
            and self.envelope_excess <= 0.0
            and abs(self.sqrt_w_ratio / 0.5 - 1.0) <= ratio_tol
        )


def gronwall_study(params: SimParams, delta: float, direction: np.ndarray | None = None,
                   slack: float = 0.01) -> GronwallReport:
    """Calibrate ``c`` at ``delta`` and test it on ``delta / 2``.

    The half-size run must stay under ``log W/W0 <= (c + slack |c|) int F``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive for a Gronwall study")
    full, half = twin_runs(params, [delta, 0.5 * delta], direction)
    c, c_half = calibrate(full), calibrate(half)
    stability = abs(c_half - c) / abs(c) if c else math.inf
    excess = envelope_excess(half, c, slack * abs(c))
    ratio = math.sqrt(half.W[-1] / full.W[-1]) if full.W[-1] > 0 else math.nan
    return GronwallReport(c, c_half, stability, excess, ratio, [full, half])
