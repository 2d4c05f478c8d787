"""Uniform periodic grid on (0, 2*pi)^d and its discrete Fourier transforms.

Spectral fields store *normalized* modes: ``f_hat = fftn(f) / n**d``, so that
``f(x) = sum_k f_hat[k] exp(i k.x)`` and Parseval reads
``int |f|^2 dx = (2*pi)**d * sum |f_hat|^2``.

Array layout: the last ``dim`` axes are spatial (``x_1`` along the first of
them, ``'ij'`` indexing); any leading axes are component axes, e.g. a vector
field has shape ``(dim, n, ..., n)`` and a tensor field ``(dim, dim, n, ..., n)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi

#: imaginary residue (relative) above which an inverse transform is refused
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Grid:
    """Collocation grid with its integer wavenumber lattice.

    Attributes
    ----------
    dim : int
        Space dimension, 2 or 3.
    n : int
        Points (and modes) per axis.
    wavenumbers : ndarray, shape (dim, n, ..., n)
        Integer lattice in FFT order, values in ``{-n/2+1, ..., n/2}``.
    stokes_eigenvalues : ndarray
        ``|k|^2`` per mode.
    dealias_mask : ndarray of bool
        2/3 rule: true iff ``|k_i| < n/3`` on every axis.
    """

    dim: int
    n: int
    wavenumbers: np.ndarray
    stokes_eigenvalues: np.ndarray
    dealias_mask: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def n_padded(self) -> int:
        """Points per axis of the 3/2-rule grid used for products."""
        return -(-3 * self.n // 2)

    @property
    def padded_shape(self) -> tuple[int, ...]:
        return (self.n_padded,) * self.dim

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def volume(self) -> float:
        return TWO_PI**self.dim

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(range(-self.dim, 0))

    @cached_property
    def resolved(self) -> np.ndarray:
        """Modes kept by the Galerkin truncation (every mode but the Nyquist planes)."""
        return np.all(np.abs(self.wavenumbers) < self.n // 2, axis=0)

    @cached_property
    def deriv(self) -> np.ndarray:
        """Wavenumbers used by differentiation: Nyquist entries set to zero."""
        k = self.wavenumbers.astype(float)
        k[k == self.n // 2] = 0.0
        k.setflags(write=False)
        return k

    @cached_property
    def points(self) -> np.ndarray:
        """Collocation coordinates ``x_j = 2*pi*j/n``, shape (dim, n, ..., n)."""
        x = TWO_PI * np.arange(self.n) / self.n
        return np.array(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def padded_points(self) -> np.ndarray:
        x = TWO_PI * np.arange(self.n_padded) / self.n_padded
        return np.array(np.meshgrid(*([x] * self.dim), indexing="ij"))

    @cached_property
    def _pad_blocks(self) -> list[tuple[tuple[slice, ...], tuple[slice, ...]]]:
        # (base, padded) slices of the resolved modes in the half spectrum:
        # both signs on the leading axes, non-negative on the last one
        h, n, m = self.n // 2, self.n, self.n_padded
        pairs = [(slice(0, h), slice(0, h)), (slice(n - h + 1, n), slice(m - h + 1, m))]
        blocks = []
        for combo in itertools.product(pairs, repeat=self.dim - 1):
            base = tuple(c[0] for c in combo) + (slice(0, h),)
            pad = tuple(c[1] for c in combo) + (slice(0, h),)
            blocks.append(((...,) + base, (...,) + pad))
        return blocks

    def mode_index(self, k) -> tuple[int, ...]:
        """Array index of the integer wavenumber ``k`` (a length-``dim`` sequence)."""
        if len(k) != self.dim:
            raise ValueError(f"wavenumber {tuple(k)} has wrong length for dim={self.dim}")
        half = self.n // 2
        if any(not (-half < int(ki) <= half) for ki in k):
            raise ValueError(f"wavenumber {tuple(k)} outside lattice of n={self.n}")
        return tuple(int(ki) % self.n for ki in k)


def make_grid(dim: int, n: int) -> Grid:
    """Build the grid for ``n`` points per axis on ``(0, 2*pi)^dim``."""
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if int(n) != n or n % 2 or n < 8:
        raise ValueError(f"n must be an even integer >= 8, got {n}")
    n = int(n)
    k1 = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    k1[n // 2] = n // 2
    k = np.array(np.meshgrid(*([k1] * dim), indexing="ij"))
    lam = np.sum(k * k, axis=0)
    mask = np.all(3 * np.abs(k) < n, axis=0)
    for arr in (k, lam, mask):
        arr.setflags(write=False)
    return Grid(dim=dim, n=n, wavenumbers=k, stokes_eigenvalues=lam, dealias_mask=mask)


def _check_shape(f: np.ndarray, shape: tuple[int, ...]) -> None:
    if f.ndim < len(shape) or f.shape[-len(shape):] != shape:
        raise ValueError(f"field shape {f.shape} does not end with grid shape {shape}")


def forward_transform(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Normalized forward DFT over the spatial axes."""
    f = np.asarray(f)
    _check_shape(f, grid.shape)
    return np.fft.fftn(f, axes=grid.axes) / grid.n**grid.dim


def inverse_transform(f_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse of :func:`forward_transform`; returns real collocation values.

    Raises ``ValueError`` if the modes are not conjugate-symmetric, which
    indicates a corrupted state rather than a rounding artefact.
    """
    f_hat = np.asarray(f_hat)
    _check_shape(f_hat, grid.shape)
    g = np.fft.ifftn(f_hat, axes=grid.axes) * grid.n**grid.dim
    return _real_part(g)


def _real_part(g: np.ndarray) -> np.ndarray:
    if np.isrealobj(g):
        return g
    scale = max(float(np.max(np.abs(g), initial=0.0)), 1e-300)
    if np.max(np.abs(g.imag), initial=0.0) > SYMMETRY_TOL * max(scale, 1.0):
        raise ValueError("spectral field is not conjugate-symmetric (corrupted state?)")
    return np.ascontiguousarray(g.real)


def apply_dealias(f_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Zero every mode outside the 2/3-rule mask."""
    return f_hat * grid.dealias_mask


def truncate(f_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Zero the Nyquist planes (projection onto the resolved modes)."""
    return f_hat * grid.resolved


def to_padded(f_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Evaluate resolved modes on the 3/2-rule padded grid (real output).

    Only the half spectrum is used, so the input is assumed conjugate-symmetric.
    """
    m = grid.n_padded
    lead = f_hat.shape[: f_hat.ndim - grid.dim]
    half = np.zeros(lead + (m,) * (grid.dim - 1) + (m // 2 + 1,), dtype=complex)
    for base, pad in grid._pad_blocks:
        half[pad] = f_hat[base]
    return np.fft.irfftn(half, s=grid.padded_shape, axes=grid.axes) * m**grid.dim


def from_padded(g: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward transform on the padded grid, truncated to the resolved base modes."""
    _check_shape(g, grid.padded_shape)
    n, h = grid.n, grid.n // 2
    g_hat = np.fft.rfftn(g, axes=grid.axes) / grid.n_padded**grid.dim
    lead = g.shape[: g.ndim - grid.dim]
    out = np.zeros(lead + grid.shape, dtype=complex)
    for base, pad in grid._pad_blocks:
        out[base] = g_hat[pad]
    # negative last-axis modes from conjugate symmetry
    flipped = out
    neg = (-np.arange(n)) % n
    for ax in grid.axes[:-1]:
        flipped = np.take(flipped, neg, axis=ax)
    out[..., n - h + 1:] = np.conj(flipped[..., h - 1:0:-1])
    return out


def integrate(f: np.ndarray, grid: Grid, padded: bool = False) -> np.ndarray:
    """Rectangle-rule integral over the box of the trailing spatial axes."""
    m = grid.n_padded if padded else grid.n
    return np.sum(f, axis=grid.axes) * (TWO_PI / m) ** grid.dim
