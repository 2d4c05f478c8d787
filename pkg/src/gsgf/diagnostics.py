"""Energy functionals, dissipation, second-order quantities and identity residuals.

Integrals of products are evaluated by the rectangle rule on the 3/2-padded
grid.  For resolved fields (``|k_i| < n/2``) that rule is exact for cubic
integrands, so the identity residuals below sit at rounding level.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import NamedTuple

import numpy as np

from .constitutive import ConstitutiveLaw, derived_constants
from .field_ops import (
    gradient,
    helmholtz_apply,
    inner,
    norm_sq,
    scalar_gradient,
    sobolev_norms,
    strain_hat,
)
from .grid import Grid, from_padded, integrate, to_padded
from .nonlinear import stress_field

CSV_FIELDS = (
    "t", "E", "dissipation", "forcing_power", "l2", "h1", "h2", "w1r", "Ir",
    "energy_residual", "id_res_1", "id_res_2", "id_res_3",
)


@dataclasses.dataclass(frozen=True)
class EnergyRecord:
    t: float
    E: float
    dissipation: float
    forcing_power: float
    l2: float
    h1: float
    h2: float
    w1r: float
    Ir: float
    energy_residual: float
    id_res_1: float
    id_res_2: float
    id_res_3: float

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in CSV_FIELDS)


def energy(u_hat: np.ndarray, grid: Grid, alpha1: float) -> float:
    """``(||u||^2 + alpha1 ||grad u||^2) / 2``."""
    p = np.sum(np.abs(u_hat) ** 2, axis=0)
    return 0.5 * grid.volume * float(np.sum((1.0 + alpha1 * grid.stokes_eigenvalues) * p))


def _padded_strain(u_hat, grid):
    return to_padded(strain_hat(u_hat, grid), grid)


def dissipation(u_hat: np.ndarray, grid: Grid, law: ConstitutiveLaw) -> float:
    """``int S(Du):Du`` on the padded grid.

    This is exactly the stress power seen by the Galerkin system, since the
    stress divergence is formed from the same padded samples.
    """
    D = _padded_strain(u_hat, grid)
    return float(integrate(np.sum(stress_field(D, law) * D, axis=(0, 1)), grid, padded=True))


def forcing_power(f_hat: np.ndarray | None, u_hat: np.ndarray, grid: Grid) -> float:
    return 0.0 if f_hat is None else inner(f_hat, u_hat, grid)


def energy_residual(prev: EnergyRecord, curr: EnergyRecord, dt: float) -> float:
    """Per-step defect of the time-integrated energy equality.

    ``E1 - E0 + dt * [(Phi0 + Phi1)/2 - (P0 + P1)/2]``, i.e. ``dt`` times the
    rate-form residual.  Endpoint averaging is a trapezoid rule, so for a
    4th-order integrator this is ``O(dt^3)`` per step.
    """
    phi = 0.5 * (prev.dissipation + curr.dissipation)
    power = 0.5 * (prev.forcing_power + curr.forcing_power)
    return (curr.E - prev.E) + dt * (phi - power)


class CoercivityChain(NamedTuple):
    dissipation: float
    coercive_bound: float      # c3 * int (1+|Du|)^(r-2) |Du|^2
    power_bound: float         # c3 * int |Du|^r
    korn_ratio: float          # ||Du||_{L^r} / ||grad u||_{L^r}, recorded only


def coercivity_chain(u_hat: np.ndarray, grid: Grid, law: ConstitutiveLaw) -> CoercivityChain:
    """The lower-bound chain ``Phi >= c3 int (1+|Du|)^(r-2)|Du|^2 >= c3 int |Du|^r``."""
    c3 = derived_constants(law).c3
    D = _padded_strain(u_hat, grid)
    mag = np.sqrt(np.sum(D * D, axis=(0, 1)))
    phi = float(integrate(np.sum(stress_field(D, law) * D, axis=(0, 1)), grid, padded=True))
    bound = c3 * float(integrate((1.0 + mag) ** (law.r - 2.0) * mag**2, grid, padded=True))
    dr = float(integrate(mag**law.r, grid, padded=True))
    G = to_padded(gradient(u_hat, grid), grid)
    gr = float(integrate(np.sqrt(np.sum(G * G, axis=(0, 1))) ** law.r, grid, padded=True))
    ratio = (dr / gr) ** (1.0 / law.r) if gr > 0 else math.nan
    return CoercivityChain(phi, bound, c3 * dr, ratio)


class SecondOrderMonitor(NamedTuple):
    h2_sq: float        # ||grad^2 u||^2
    Ir: float           # int (1+|Du|)^(r-2) |grad Du|^2
    triple: float       # int d_k u_j d_j u_i d_k u_i
    triple_rel: float   # triple / int |integrand|
    energy2: float      # (||grad u||^2 + alpha1 ||grad^2 u||^2) / 2
    cubic_ratio: float  # ||grad u||_{L^3}^3 / (||grad u||_{L^r} ||grad^2 u||^2)


def second_order_monitor(u_hat: np.ndarray, grid: Grid, law: ConstitutiveLaw, alpha1: float) -> SecondOrderMonitor:
    """Quantities entering the higher-order energy inequality."""
    lam = grid.stokes_eigenvalues
    p = np.sum(np.abs(u_hat) ** 2, axis=0)
    h1_sq = grid.volume * float(np.sum(lam * p))
    h2_sq = grid.volume * float(np.sum(lam * lam * p))

    Ir = second_order_ir(u_hat, grid, law)

    G = to_padded(gradient(u_hat, grid), grid)  # G[i, k] = d_k u_i
    integrand = np.einsum("jk...,ij...,ik...->...", G, G, G)
    triple = float(integrate(integrand, grid, padded=True))
    scale = float(integrate(np.einsum("jk...,ij...,ik...->...", np.abs(G), np.abs(G), np.abs(G)), grid, padded=True))
    triple_rel = triple / scale if scale > 0 else 0.0

    gmag = np.sqrt(np.sum(G * G, axis=(0, 1)))
    l3_cubed = float(integrate(gmag**3, grid, padded=True))
    w1r = sobolev_norms(u_hat, grid, law.r).w1r
    denom = w1r * h2_sq
    cubic_ratio = l3_cubed / denom if denom > 0 else math.nan
    return SecondOrderMonitor(h2_sq, Ir, triple, triple_rel, 0.5 * (h1_sq + alpha1 * h2_sq), cubic_ratio)


class IdentityResiduals(NamedTuple):
    gradient_orthogonality: float   # <grad f, u>
    advection_skew: float           # <(u.grad) v, v>
    integration_by_parts: float     # <(u.grad) u, v> + <u (x) u, grad v>


def _relative(values: list[np.ndarray], grid: Grid) -> float:
    total = sum(float(integrate(v, grid, padded=True)) for v in values)
    scale = sum(float(integrate(np.abs(v), grid, padded=True)) for v in values)
    return abs(total) / scale if scale > 0 else 0.0


def identity_checks(u_hat: np.ndarray, v_hat: np.ndarray, f_hat: np.ndarray, grid: Grid) -> IdentityResiduals:
    """Relative residuals of the three periodic divergence-free identities.

    Each entry is ``|int integrand| / int |integrand|``; they vanish when ``u``
    and ``v`` are solenoidal and are ``O(1)`` otherwise.
    """
    u = to_padded(u_hat, grid)
    v = to_padded(v_hat, grid)
    gu = to_padded(gradient(u_hat, grid), grid)
    gv = to_padded(gradient(v_hat, grid), grid)
    gf = to_padded(scalar_gradient(f_hat, grid), grid)
    r1 = _relative([np.sum(gf * u, axis=0)], grid)
    r2 = _relative([np.einsum("j...,ij...,i...->...", u, gv, v)], grid)
    r3 = _relative([
        np.einsum("j...,ij...,i...->...", u, gu, v),
        np.einsum("i...,j...,ij...->...", u, u, gv),
    ], grid)
    return IdentityResiduals(r1, r2, r3)


def kinetic_potential(u_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Resolved modes of ``|u|^2 / 2``; the scalar used for the gradient identity in records."""
    u = to_padded(u_hat, grid)
    return from_padded(0.5 * np.sum(u * u, axis=0), grid)


def _check_chain(phi: float, mag: np.ndarray, grid: Grid, law: ConstitutiveLaw, t: float) -> None:
    # Phi >= c3 int (1+|D|)^(r-2)|D|^2 >= c3 int |D|^r, from samples already on the padded grid
    c3 = derived_constants(law).c3
    bound = c3 * float(integrate((1.0 + mag) ** (law.r - 2.0) * mag**2, grid, padded=True))
    power = c3 * float(integrate(mag**law.r, grid, padded=True))
    tol = 1e-12 * max(phi, 1e-300)
    if phi < bound - tol or bound < power - tol:
        warnings.warn(f"coercivity chain violated at t = {t}: Phi = {phi}, bound = {bound}, power = {power}",
                      RuntimeWarning, stacklevel=3)


def make_record(
    t: float,
    u_hat: np.ndarray,
    grid: Grid,
    law: ConstitutiveLaw | None,
    alpha1: float,
    f_hat: np.ndarray | None = None,
    energy_residual: float = math.nan,
) -> EnergyRecord:
    """All per-step diagnostics for one state.

    Same quantities as :func:`dissipation`, :func:`second_order_ir` and
    :func:`identity_checks`, with the padded transforms batched.
    """
    d = grid.dim
    r = law.r if law is not None else 2.0
    norms = sobolev_norms(u_hat, grid, r)
    v_hat = helmholtz_apply(u_hat, grid, alpha1)
    gu_hat = gradient(u_hat, grid)
    Dh = 0.5 * (gu_hat + np.swapaxes(gu_hat, 0, 1))
    parts = [u_hat, v_hat, gu_hat, gradient(v_hat, grid)]
    if law is not None:
        parts.append(Dh[:, :, None] * (1j * grid.deriv)[None, None])
    flat = [p.reshape((-1,) + grid.shape) for p in parts]
    padded = to_padded(np.concatenate(flat), grid)
    sizes = np.cumsum([f.shape[0] for f in flat])[:-1]
    chunks = np.split(padded, sizes)
    u, v = chunks[0], chunks[1]
    gu = chunks[2].reshape((d, d) + grid.padded_shape)
    gv = chunks[3].reshape((d, d) + grid.padded_shape)

    if law is not None:
        D = 0.5 * (gu + np.swapaxes(gu, 0, 1))
        mag = np.sqrt(np.sum(D * D, axis=(0, 1)))
        phi = float(integrate(law.viscosity(mag) * mag * mag, grid, padded=True))
        gD = chunks[4]
        Ir = float(integrate((1.0 + mag) ** (law.r - 2.0) * np.sum(gD * gD, axis=0), grid, padded=True))
        _check_chain(phi, mag, grid, law, t)
    else:
        phi, Ir = 0.0, 0.0

    potential = from_padded(0.5 * np.sum(u * u, axis=0), grid)
    gf = to_padded(scalar_gradient(potential, grid), grid)
    ids = IdentityResiduals(
        _relative([np.sum(gf * u, axis=0)], grid),
        _relative([np.einsum("j...,ij...,i...->...", u, gv, v)], grid),
        _relative([
            np.einsum("j...,ij...,i...->...", u, gu, v),
            np.einsum("i...,j...,ij...->...", u, u, gv),
        ], grid),
    )
    return EnergyRecord(
        t=float(t),
        E=energy(u_hat, grid, alpha1),
        dissipation=phi,
        forcing_power=forcing_power(f_hat, u_hat, grid),
        l2=norms.l2,
        h1=norms.h1,
        h2=norms.h2,
        w1r=norms.w1r,
        Ir=Ir,
        energy_residual=energy_residual,
        id_res_1=ids.gradient_orthogonality,
        id_res_2=ids.advection_skew,
        id_res_3=ids.integration_by_parts,
    )


def second_order_ir(u_hat: np.ndarray, grid: Grid, law: ConstitutiveLaw) -> float:
    """``I_r(u) = int (1 + |Du|)^(r-2) |grad Du|^2`` alone (cheaper than the full monitor)."""
    Dh = strain_hat(u_hat, grid)
    D = to_padded(Dh, grid)
    gD = to_padded(Dh[:, :, None] * (1j * grid.deriv)[None, None], grid)  # d_k D_ij
    mag = np.sqrt(np.sum(D * D, axis=(0, 1)))
    return float(integrate((1.0 + mag) ** (law.r - 2.0) * np.sum(gD * gD, axis=(0, 1, 2)), grid, padded=True))


def l2_energy_norm(w_hat: np.ndarray, grid: Grid, alpha1: float) -> float:
    """``||w||^2 + alpha1 ||grad w||^2`` (twice the energy of ``w``)."""
    return norm_sq(w_hat, grid) + alpha1 * grid.volume * float(
        np.sum(grid.stokes_eigenvalues * np.abs(w_hat) ** 2)
    )
