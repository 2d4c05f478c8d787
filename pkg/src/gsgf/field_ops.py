"""Vector and tensor calculus on spectral fields.

A spectral vector field is a complex array ``(d, n, ..., n)`` of normalized
modes (see :mod:`gsgf.grid`); a spectral tensor field is ``(d, d, n, ..., n)``
with entry ``(i, j)`` holding ``d_j u_i`` for gradients.  Derivatives use
wavenumbers with the Nyquist entries zeroed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .grid import Grid, apply_dealias, integrate, inverse_transform


def gradient(u_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral ``(d_j u_i)``: entry ``(i, j)`` is ``i k_j u_hat_i``."""
    return u_hat[:, None] * (1j * grid.deriv)[None, :]


def divergence(u_hat: np.ndarray, grid: Grid) -> np.ndarray:
    return np.sum(1j * grid.deriv * u_hat, axis=0)


def divergence_tensor(T_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Row divergence ``(div T)_i = sum_j d_j T_ij``."""
    return np.sum(T_hat * (1j * grid.deriv)[None, :], axis=1)


def scalar_gradient(f_hat: np.ndarray, grid: Grid) -> np.ndarray:
    return 1j * grid.deriv * f_hat


def laplacian(u_hat: np.ndarray, grid: Grid) -> np.ndarray:
    return -grid.stokes_eigenvalues * u_hat


def strain_hat(u_hat: np.ndarray, grid: Grid) -> np.ndarray:
    g = gradient(u_hat, grid)
    return 0.5 * (g + np.swapaxes(g, 0, 1))


def strain(u_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Symmetric gradient ``Du`` at the collocation points, shape ``(d, d, n, ..., n)``."""
    return inverse_transform(strain_hat(u_hat, grid), grid)


def leray_project(w_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Per mode ``w -> (I - k k^T / |k|^2) w``; the ``k = 0`` mode passes through."""
    k = grid.wavenumbers
    lam = np.where(grid.stokes_eigenvalues == 0, 1, grid.stokes_eigenvalues)
    kdotw = np.sum(k * w_hat, axis=0)
    return w_hat - k * (kdotw / lam)


def helmholtz_apply(u_hat: np.ndarray, grid: Grid, alpha1: float) -> np.ndarray:
    """``v = (I - alpha1 Laplacian) u``."""
    return (1.0 + alpha1 * grid.stokes_eigenvalues) * u_hat


def helmholtz_solve(v_hat: np.ndarray, grid: Grid, alpha1: float) -> np.ndarray:
    """Invert ``(I - alpha1 Laplacian)`` mode by mode; ``alpha1 = 0`` is the identity."""
    if alpha1 < 0:
        raise ValueError(f"alpha1 must be nonnegative, got {alpha1}")
    return v_hat / (1.0 + alpha1 * grid.stokes_eigenvalues)


def remove_mean(w_hat: np.ndarray, grid: Grid) -> np.ndarray:
    out = np.array(w_hat, copy=True)
    out[(...,) + (0,) * grid.dim] = 0.0
    return out


def inner(a_hat: np.ndarray, b_hat: np.ndarray, grid: Grid) -> float:
    """L2 inner product over the box via Parseval, summed over component axes."""
    return grid.volume * float(np.sum((a_hat * np.conj(b_hat)).real))


def norm_sq(a_hat: np.ndarray, grid: Grid) -> float:
    return grid.volume * float(np.sum(np.abs(a_hat) ** 2))


def divergence_defect(u_hat: np.ndarray, grid: Grid) -> float:
    """``max_k |k . u_hat(k)| / ||u_hat||`` (zero for a solenoidal field)."""
    scale = np.sqrt(np.sum(np.abs(u_hat) ** 2))
    if scale == 0:
        return 0.0
    kdotu = np.sum(grid.wavenumbers * u_hat, axis=0)
    return float(np.max(np.abs(kdotu)) / scale)


class SobolevNorms(NamedTuple):
    l2: float
    h1: float
    h2: float
    w1r: float


def sobolev_norms(u_hat: np.ndarray, grid: Grid, r: float) -> SobolevNorms:
    """``(||u||, ||grad u||, ||grad^2 u||, ||grad u||_{L^r})``.

    The L2 quantities come from Parseval; ``||grad^2 u||`` uses
    ``sum |k|^4 |u_hat|^2``.  The L^r norm is a quadrature of the Frobenius
    norm of the dealiased gradient on the base grid.
    """
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    lam = grid.stokes_eigenvalues
    p = np.sum(np.abs(u_hat) ** 2, axis=0)
    l2 = np.sqrt(grid.volume * np.sum(p))
    h1 = np.sqrt(grid.volume * np.sum(lam * p))
    h2 = np.sqrt(grid.volume * np.sum(lam * lam * p))
    g = inverse_transform(apply_dealias(gradient(u_hat, grid), grid), grid)
    mag = np.sqrt(np.sum(g * g, axis=(0, 1)))
    w1r = float(integrate(mag**r, grid)) ** (1.0 / r)
    return SobolevNorms(float(l2), float(h1), float(h2), w1r)
