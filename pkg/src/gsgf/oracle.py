"""Brute-force reference implementations for tiny grids and closed-form solutions.

Nothing here imports the spectral pipeline: wavenumbers, quadrature and
derivatives are rebuilt from scratch so that agreement is evidence, not
tautology.  Costs are polynomial in ``n**d`` and meant for ``n <= 16``.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

MAX_N = 16


def _check_small(n: int) -> None:
    if n > MAX_N:
        raise ValueError(f"oracle grids are limited to n <= {MAX_N}, got {n}")


def _lattice(n: int, dim: int) -> list[tuple[int, ...]]:
    """Integer wavenumbers in ``(-n/2, n/2]`` with their array positions."""
    ks = [k if k <= n // 2 else k - n for k in range(n)]
    return list(itertools.product(ks, repeat=dim))


def oracle_convolution(a_modes: np.ndarray, b_modes: np.ndarray) -> np.ndarray:
    """Modes of the product of two scalar fields by the direct double sum.

    Output ``c(k) = sum_{p+q=k} a(p) b(q)`` restricted to ``|k_i| < n/2``
    (the Nyquist planes are dropped, as in the pipeline).
    """
    n = a_modes.shape[0]
    dim = a_modes.ndim
    _check_small(n)
    out = np.zeros(a_modes.shape, dtype=complex)
    lattice = np.array(_lattice(n, dim))  # (n**d, dim)
    pos = tuple((lattice % n).T)
    a_vals = a_modes[pos]
    b_vals = b_modes[pos]
    half = n // 2
    # outer loop over p, inner sum over every q at once
    for p, av in zip(lattice, a_vals):
        if av == 0:
            continue
        k = lattice + p
        ok = np.all(np.abs(k) < half, axis=1)
        np.add.at(out, tuple((k[ok] % n).T), av * b_vals[ok])
    return out


def oracle_quadrature(field: np.ndarray) -> float:
    """Rectangle rule over ``(0, 2*pi)^d`` for a field sampled on a uniform grid."""
    field = np.asarray(field, dtype=float)
    cell = 1.0
    for m in field.shape:
        cell *= 2.0 * np.pi / m
    total = 0.0
    for value in field.ravel():
        total += value
    return total * cell


def differentiation_matrix(n: int) -> np.ndarray:
    """Dense periodic spectral differentiation matrix on ``n`` (even) points.

    ``D_ij = (-1)^(i-j) cot((i-j) h / 2) / 2`` off the diagonal, zero on it.
    """
    _check_small(n)
    h = 2.0 * np.pi / n
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = 0.5 * (-1.0) ** (i - j) / np.tan((i - j) * h / 2.0)
    return D


def oracle_derivative(field: np.ndarray, axis: int) -> np.ndarray:
    """Derivative along ``axis`` by applying the dense matrix along that axis."""
    field = np.asarray(field, dtype=float)
    D = differentiation_matrix(field.shape[axis])
    return np.moveaxis(np.tensordot(D, np.moveaxis(field, axis, 0), axes=(1, 0)), 0, axis)


# central-difference weights for offsets 1..4 (8th order)
_FD8 = (4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0)


def finite_difference_derivative(field: np.ndarray, axis: int) -> np.ndarray:
    """8th-order centered periodic finite difference along ``axis``; any grid size."""
    field = np.asarray(field, dtype=float)
    h = 2.0 * np.pi / field.shape[axis]
    out = np.zeros_like(field)
    for m, w in enumerate(_FD8, start=1):
        out += w * (np.roll(field, -m, axis=axis) - np.roll(field, m, axis=axis))
    return out / h


def oracle_gradient(u: np.ndarray) -> np.ndarray:
    """Physical gradient ``(d_j u_i)`` of a physical vector field ``(d, n, ..., n)``."""
    d = u.shape[0]
    return np.array([[oracle_derivative(u[i], j) for j in range(d)] for i in range(d)])


def oracle_divergence_tensor(T: np.ndarray) -> np.ndarray:
    d = T.shape[0]
    return np.array([sum(oracle_derivative(T[i, j], j) for j in range(d)) for i in range(d)])


def oracle_leray(w: np.ndarray) -> np.ndarray:
    """Helmholtz projection in physical space with dense operators.

    Solves ``L phi = div w`` with ``L = sum_j D_j^2`` through the pseudo-inverse
    and returns ``w - grad phi``.
    """
    d = w.shape[0]
    shape = w.shape[1:]
    ops, L_pinv = _dense_operators(w.shape[1], d)
    div = sum(ops[j] @ w[j].ravel() for j in range(d))
    phi = L_pinv @ div
    return np.array([w[i] - (ops[i] @ phi).reshape(shape) for i in range(d)])


@functools.lru_cache(maxsize=4)
def _dense_operators(n: int, d: int):
    D1 = differentiation_matrix(n)
    eye = np.eye(n)
    ops = []
    for j in range(d):
        mats = [D1 if a == j else eye for a in range(d)]
        op = mats[0]
        for m in mats[1:]:
            op = np.kron(op, m)
        ops.append(op)
    L = sum(op @ op for op in ops)
    return ops, np.linalg.pinv(L)


def oracle_convect_modes(u_modes: np.ndarray, v_modes: np.ndarray) -> np.ndarray:
    """Modes of ``(u.grad) v`` from mode-space convolutions, wavenumbers rebuilt locally."""
    d = u_modes.shape[0]
    n = u_modes.shape[1]
    k = _wavenumber_arrays(n, d)
    return np.array([
        sum(oracle_convolution(u_modes[j], 1j * k[j] * v_modes[i]) for j in range(d))
        for i in range(d)
    ])


def oracle_stretch_modes(u_modes: np.ndarray, v_modes: np.ndarray) -> np.ndarray:
    """Modes of ``sum_j v_j grad u_j`` by direct convolution."""
    d = u_modes.shape[0]
    n = u_modes.shape[1]
    k = _wavenumber_arrays(n, d)
    return np.array([
        sum(oracle_convolution(v_modes[j], 1j * k[i] * u_modes[j]) for j in range(d))
        for i in range(d)
    ])


def _wavenumber_arrays(n: int, dim: int) -> np.ndarray:
    # Nyquist entries zeroed: odd derivatives of the Nyquist mode vanish on the grid
    k1 = np.array([k if k < n // 2 else (0 if k == n // 2 else k - n) for k in range(n)], dtype=float)
    return np.array(np.meshgrid(*([k1] * dim), indexing="ij"))


def taylor_green_rate(mu_eff: float, alpha1: float) -> float:
    """Decay rate ``mu_eff / (1 + 2 alpha1)`` of the 2D Taylor-Green vortex under the linear law."""
    return mu_eff / (1.0 + 2.0 * alpha1)


def taylor_green_exact(t: float, mu_eff: float, alpha1: float, amplitude: float, n: int,
                       dim: int = 2) -> np.ndarray:
    """Exact Taylor-Green velocity at time ``t`` on ``n x n`` collocation points.

    ``u = A exp(-sigma t) (sin x1 cos x2, -cos x1 sin x2)``.  With a linear law
    ``v = (1 + 2 alpha1) u``, both nonlinear terms are gradients and
    ``Lap u = -2u``, which gives ``sigma = mu_eff / (1 + 2 alpha1)``.
    """
    if dim != 2:
        raise ValueError("the Taylor-Green exact solution is two-dimensional only")
    x = 2.0 * np.pi * np.arange(n) / n
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    amp = amplitude * np.exp(-taylor_green_rate(mu_eff, alpha1) * t)
    return amp * np.array([np.sin(x1) * np.cos(x2), -np.cos(x1) * np.sin(x2)])
