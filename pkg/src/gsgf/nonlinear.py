"""Convective and stretching nonlinearities and the projected momentum right-hand side.

Quadratic products are formed on the 3/2-padded grid and truncated back to the
resolved modes, which makes them exact Galerkin convolutions.  The stress is
also evaluated pointwise on the padded grid; it is not polynomial in ``Du``, so
some aliasing remains there.
"""

from __future__ import annotations

import numpy as np

from .constitutive import ConstitutiveLaw
from .field_ops import (
    divergence_defect,
    divergence_tensor,
    gradient,
    helmholtz_apply,
    leray_project,
    scalar_gradient,
    strain_hat,
)
from .grid import Grid, from_padded, to_padded

SOLENOIDAL_TOL = 1e-10


def _require_solenoidal(u_hat: np.ndarray, grid: Grid) -> None:
    defect = divergence_defect(u_hat, grid)
    if defect > SOLENOIDAL_TOL:
        raise ValueError(f"advecting field is not divergence-free (|k.u|/|u| = {defect:.2e})")


def convect(u_hat: np.ndarray, v_hat: np.ndarray, grid: Grid, check: bool = True) -> np.ndarray:
    """``((u.grad) v)_i = sum_j u_j d_j v_i``."""
    if check:
        _require_solenoidal(u_hat, grid)
    u = to_padded(u_hat, grid)
    gv = to_padded(gradient(v_hat, grid), grid)
    return from_padded(np.einsum("j...,ij...->i...", u, gv), grid)


def stretch(u_hat: np.ndarray, v_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """``(sum_j v_j grad u_j)_i = sum_j v_j d_i u_j``."""
    v = to_padded(v_hat, grid)
    gu = to_padded(gradient(u_hat, grid), grid)
    return from_padded(np.einsum("j...,ji...->i...", v, gu), grid)


def stress_field(D: np.ndarray, law: ConstitutiveLaw) -> np.ndarray:
    """Pointwise ``S(D)`` for a strain field laid out ``(d, d, ...)``."""
    nrm = np.sqrt(np.sum(D * D, axis=(0, 1)))
    return law.viscosity(nrm) * D


def stress_divergence(u_hat: np.ndarray, grid: Grid, law: ConstitutiveLaw) -> np.ndarray:
    """Spectral ``div S(Du)`` with the stress sampled on the padded grid."""
    D = to_padded(strain_hat(u_hat, grid), grid)
    return divergence_tensor(from_padded(stress_field(D, law), grid), grid)


def momentum_rhs(
    u_hat: np.ndarray,
    grid: Grid,
    law: ConstitutiveLaw | None,
    alpha1: float,
    f_hat: np.ndarray | None = None,
) -> np.ndarray:
    """``P[f - (u.grad)v - sum_j v_j grad u_j + div S(Du)]`` with ``v = (I - alpha1 Lap) u``.

    This is ``dv/dt``; :func:`gsgf.field_ops.helmholtz_solve` turns it into
    ``du/dt``.  ``law=None`` drops the stress (used to isolate the inviscid
    dynamics in tests).  Same arithmetic as :func:`convect`, :func:`stretch`
    and :func:`stress_divergence`, with the padded transforms batched.
    """
    d = grid.dim
    v_hat = helmholtz_apply(u_hat, grid, alpha1)
    stacked = np.concatenate([
        u_hat, v_hat,
        gradient(u_hat, grid).reshape((d * d,) + grid.shape),
        gradient(v_hat, grid).reshape((d * d,) + grid.shape),
    ])
    padded = to_padded(stacked, grid)
    u, v = padded[:d], padded[d:2 * d]
    gu = padded[2 * d:2 * d + d * d].reshape((d, d) + grid.padded_shape)
    gv = padded[2 * d + d * d:].reshape((d, d) + grid.padded_shape)
    nl = np.einsum("j...,ij...->i...", u, gv) + np.einsum("j...,ji...->i...", v, gu)
    if law is None:
        rhs = -from_padded(nl, grid)
    elif law.is_linear:
        # constant viscosity: the stress divergence is spectral and needs no padded round trip
        nu = float(law.viscosity(0.0))
        rhs = nu * divergence_tensor(strain_hat(u_hat, grid), grid) - from_padded(nl, grid)
    else:
        D = 0.5 * (gu + np.swapaxes(gu, 0, 1))
        S = stress_field(D, law).reshape((d * d,) + grid.padded_shape)
        back = from_padded(np.concatenate([nl, S]), grid)
        rhs = divergence_tensor(back[d:].reshape((d, d) + grid.shape), grid) - back[:d]
    if f_hat is not None:
        rhs += f_hat
    return leray_project(rhs, grid)


def expanded_nonlinearity(u_hat: np.ndarray, grid: Grid, alpha1: float) -> np.ndarray:
    """``(u.grad)v + sum_j v_j grad u_j`` assembled from its divergence-form expansion.

    Uses, for solenoidal ``u``::

        (u.grad)v_i = u_j d_j u_i - a d_jk(u_j d_k u_i) + a d_j(d_k u_j d_k u_i)
        (v_j grad u_j)_i = d_i(|u|^2 + a |grad u|^2)/2 - a d_k(d_k u_j d_i u_j)

    with ``a = alpha1`` and summation over repeated indices.
    """
    d = grid.dim
    ik = 1j * grid.deriv
    u = to_padded(u_hat, grid)
    gu = to_padded(gradient(u_hat, grid), grid)  # gu[i, k] = d_k u_i

    adv = from_padded(np.einsum("j...,ij...->i...", u, gu), grid)
    # u_j d_k u_i  -> d_j d_k
    flux = from_padded(np.einsum("j...,ik...->ijk...", u, gu), grid)
    second = sum(ik[j] * ik[k] * flux[:, j, k] for j in range(d) for k in range(d))
    # d_k u_j d_k u_i -> d_j
    cross = from_padded(np.einsum("jk...,ik...->ij...", gu, gu), grid)
    first = sum(ik[j] * cross[:, j] for j in range(d))
    convective = adv - alpha1 * second + alpha1 * first

    potential = from_padded(0.5 * (np.sum(u * u, axis=0) + alpha1 * np.sum(gu * gu, axis=(0, 1))), grid)
    # d_k u_j d_i u_j -> d_k
    mixed = from_padded(np.einsum("jk...,ji...->ik...", gu, gu), grid)
    stretching = scalar_gradient(potential, grid) - alpha1 * sum(ik[k] * mixed[:, k] for k in range(d))
    return convective + stretching


def expansion_consistency(u_hat: np.ndarray, grid: Grid, alpha1: float = 1.0) -> float:
    """Relative gap between the direct and expanded nonlinearity, after Leray projection."""
    v_hat = helmholtz_apply(u_hat, grid, alpha1)
    direct = convect(u_hat, v_hat, grid) + stretch(u_hat, v_hat, grid)
    expanded = expanded_nonlinearity(u_hat, grid, alpha1)
    scale = np.sqrt(np.sum(np.abs(direct) ** 2))
    if scale == 0:
        return float(np.sqrt(np.sum(np.abs(expanded) ** 2)))
    gap = leray_project(direct - expanded, grid)
    return float(np.sqrt(np.sum(np.abs(gap) ** 2)) / scale)
