import numpy as np
import pytest
from conftest import random_modes, shear_field, taylor_green_field
from hypothesis import given, settings
from hypothesis import strategies as st

from gsgf import oracle
from gsgf.field_ops import (
    divergence,
    divergence_defect,
    divergence_tensor,
    gradient,
    helmholtz_apply,
    helmholtz_solve,
    inner,
    laplacian,
    leray_project,
    norm_sq,
    remove_mean,
    sobolev_norms,
    strain,
    strain_hat,
)
from gsgf.grid import forward_transform, integrate, inverse_transform, make_grid


def _modes(u, grid):
    return forward_transform(u, grid)


class TestGradient:
    def test_zero(self):
        grid = make_grid(2, 8)
        assert not np.any(gradient(np.zeros((2,) + grid.shape, complex), grid))

    def test_shear(self):
        grid = make_grid(2, 16)
        G = inverse_transform(gradient(_modes(shear_field(grid), grid), grid), grid)
        expected = np.zeros_like(G)
        expected[0, 1] = np.cos(grid.points[1])
        assert np.max(np.abs(G - expected)) < 1e-14

    def test_matches_eighth_order_finite_differences(self, rng):
        grid = make_grid(2, 512)
        u_hat = random_modes(grid, rng, components=2, kmax=3)
        u = inverse_transform(u_hat, grid)
        G = inverse_transform(gradient(u_hat, grid), grid)
        errors = []
        for i in range(2):
            for j in range(2):
                fd = oracle.finite_difference_derivative(u[i], axis=j)
                errors.append(np.max(np.abs(G[i, j] - fd)))
        assert max(errors) / np.max(np.abs(G)) < 1e-10

    def test_finite_difference_order(self):
        errs = []
        for n in (32, 64):
            grid = make_grid(2, n)
            f = np.sin(3 * grid.points[0] + grid.points[1])
            d = oracle.finite_difference_derivative(f, axis=0)
            errs.append(np.max(np.abs(d - 3 * np.cos(3 * grid.points[0] + grid.points[1]))))
        assert np.log2(errs[0] / errs[1]) > 7.5

    def test_matches_dense_oracle(self, rng, small_grid):
        u_hat = random_modes(small_grid, rng, components=small_grid.dim, solenoidal=False)
        u = inverse_transform(u_hat, small_grid)
        G = inverse_transform(gradient(u_hat, small_grid), small_grid)
        ref = oracle.oracle_gradient(u)
        assert np.max(np.abs(G - ref)) / np.max(np.abs(ref)) < 1e-11


class TestStrain:
    def test_zero(self):
        grid = make_grid(3, 8)
        assert not np.any(strain(np.zeros((3,) + grid.shape, complex), grid))

    def test_shear(self):
        grid = make_grid(2, 16)
        D = strain(_modes(shear_field(grid), grid), grid)
        c = np.cos(grid.points[1]) / 2
        assert np.max(np.abs(D[0, 1] - c)) < 1e-14
        assert np.max(np.abs(D[1, 0] - c)) < 1e-14
        assert np.max(np.abs(D[0, 0])) < 1e-14 and np.max(np.abs(D[1, 1])) < 1e-14

    def test_taylor_green(self):
        grid = make_grid(2, 16)
        D = strain(_modes(taylor_green_field(grid), grid), grid)
        x1, x2 = grid.points
        assert np.max(np.abs(D[0, 0] - np.cos(x1) * np.cos(x2))) < 1e-14
        assert np.max(np.abs(D[1, 1] + np.cos(x1) * np.cos(x2))) < 1e-14
        assert np.max(np.abs(D[0, 1])) < 1e-14

    def test_symmetric(self, rng, small_grid):
        D = strain(random_modes(small_grid, rng, components=small_grid.dim), small_grid)
        assert np.array_equal(D, np.swapaxes(D, 0, 1))


class TestDivergenceTensor:
    def test_constant_identity(self):
        grid = make_grid(2, 8)
        T = np.zeros((2, 2) + grid.shape)
        T[0, 0] = T[1, 1] = 3.0
        assert np.max(np.abs(divergence_tensor(_modes(T, grid), grid))) < 1e-15

    def test_single_entry(self):
        grid = make_grid(2, 16)
        T = np.zeros((2, 2) + grid.shape)
        T[0, 1] = np.sin(grid.points[1])
        div = inverse_transform(divergence_tensor(_modes(T, grid), grid), grid)
        assert np.max(np.abs(div[0] - np.cos(grid.points[1]))) < 1e-14
        assert np.max(np.abs(div[1])) < 1e-15

    def test_matches_finite_differences(self, rng):
        grid = make_grid(2, 256)
        T_hat = np.stack([random_modes(grid, rng, components=2, solenoidal=False, kmax=3) for _ in range(2)])
        T = inverse_transform(T_hat, grid)
        div = inverse_transform(divergence_tensor(T_hat, grid), grid)
        ref = np.array([sum(oracle.finite_difference_derivative(T[i, j], j) for j in range(2)) for i in range(2)])
        assert np.max(np.abs(div - ref)) < 1e-10 * np.max(np.abs(ref))

    def test_matches_dense_oracle(self, rng, small_grid):
        d = small_grid.dim
        T_hat = np.stack([random_modes(small_grid, rng, components=d, solenoidal=False) for _ in range(d)])
        div = inverse_transform(divergence_tensor(T_hat, small_grid), small_grid)
        ref = oracle.oracle_divergence_tensor(inverse_transform(T_hat, small_grid))
        assert np.max(np.abs(div - ref)) / np.max(np.abs(ref)) < 1e-11


class TestLeray:
    def _single(self, k, value):
        grid = make_grid(2, 8)
        w = np.zeros((2,) + grid.shape, dtype=complex)
        w[(slice(None),) + grid.mode_index(k)] = value
        out = leray_project(w, grid)
        return out[(slice(None),) + grid.mode_index(k)]

    def test_parallel_annihilated(self):
        assert np.allclose(self._single((1, 0), (1, 0)), (0, 0), atol=0)

    def test_transverse_preserved(self):
        assert np.allclose(self._single((1, 0), (0, 1)), (0, 1), atol=0)

    def test_diagonal_mode(self):
        k = np.array([1.0, 1.0])
        P = np.eye(2) - np.outer(k, k) / k.dot(k)
        assert np.allclose(self._single((1, 1), (1, 0)), P @ [1, 0], atol=1e-16)
        assert np.allclose(self._single((1, 1), (1, 0)), (0.5, -0.5), atol=1e-16)

    def test_idempotent_and_solenoidal(self, rng, small_grid):
        w = random_modes(small_grid, rng, components=small_grid.dim, solenoidal=False)
        p1 = leray_project(w, small_grid)
        p2 = leray_project(p1, small_grid)
        assert np.max(np.abs(p2 - p1)) < 1e-14 * np.max(np.abs(p1))
        assert np.max(np.abs(np.sum(small_grid.wavenumbers * p1, axis=0))) < 1e-15
        assert divergence_defect(p1, small_grid) < 1e-15

    def test_gradient_is_removed(self, rng, small_grid):
        phi = random_modes(small_grid, rng)
        grad = 1j * small_grid.deriv * phi
        assert np.max(np.abs(leray_project(grad, small_grid))) < 1e-15

    def test_matches_dense_oracle(self, rng, small_grid):
        w_hat = random_modes(small_grid, rng, components=small_grid.dim, solenoidal=False)
        w = inverse_transform(w_hat, small_grid)
        ours = inverse_transform(leray_project(w_hat, small_grid), small_grid)
        ref = oracle.oracle_leray(w)
        assert np.max(np.abs(ours - ref)) / np.max(np.abs(ref)) < 1e-11


class TestHelmholtz:
    def test_alpha_zero_is_identity(self, rng):
        grid = make_grid(2, 8)
        v = random_modes(grid, rng, components=2)
        assert np.array_equal(helmholtz_solve(v, grid, 0.0), v)

    def test_single_mode(self):
        grid = make_grid(2, 8)
        v = np.zeros((2,) + grid.shape, dtype=complex)
        v[(1,) + grid.mode_index((1, 0))] = 2.0
        u = helmholtz_solve(v, grid, 0.5)
        assert u[(1,) + grid.mode_index((1, 0))] == pytest.approx(4.0 / 3.0, rel=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(alpha1=st.floats(0.0, 10.0), seed=st.integers(0, 2**32 - 1))
    def test_roundtrip(self, alpha1, seed):
        grid = make_grid(3, 8)
        v = random_modes(grid, np.random.default_rng(seed), components=3)
        back = helmholtz_apply(helmholtz_solve(v, grid, alpha1), grid, alpha1)
        assert np.max(np.abs(back - v)) < 1e-13 * np.max(np.abs(v))
        again = helmholtz_solve(helmholtz_apply(v, grid, alpha1), grid, alpha1)
        assert np.max(np.abs(again - v)) < 1e-13 * np.max(np.abs(v))

    def test_matches_laplacian(self, rng):
        grid = make_grid(2, 12)
        u = random_modes(grid, rng, components=2)
        assert np.allclose(helmholtz_apply(u, grid, 0.3), u - 0.3 * laplacian(u, grid), atol=1e-14)

    def test_negative_alpha_rejected(self):
        grid = make_grid(2, 8)
        with pytest.raises(ValueError):
            helmholtz_solve(np.zeros((2,) + grid.shape, complex), grid, -0.1)


class TestRemoveMean:
    def test_constant(self):
        grid = make_grid(2, 8)
        assert np.max(np.abs(remove_mean(_modes(np.full(grid.shape, 2.5), grid), grid))) == 0

    def test_zero_mean_unchanged(self, rng):
        grid = make_grid(2, 8)
        f = remove_mean(random_modes(grid, rng), grid)
        assert np.array_equal(remove_mean(f, grid), f)

    def test_quadrature_mean(self, rng):
        grid = make_grid(3, 8)
        f = inverse_transform(remove_mean(_modes(rng.standard_normal(grid.shape) + 4.0, grid), grid), grid)
        assert abs(oracle.oracle_quadrature(f)) / grid.volume < 1e-14


class TestSobolevNorms:
    def test_shear(self):
        grid = make_grid(2, 16)
        norms = sobolev_norms(_modes(shear_field(grid), grid), grid, 4.0)
        assert norms.l2**2 == pytest.approx(2 * np.pi**2, rel=1e-14)
        assert norms.h1**2 == pytest.approx(2 * np.pi**2, rel=1e-14)
        assert norms.h2**2 == pytest.approx(2 * np.pi**2, rel=1e-14)
        assert norms.w1r**4 == pytest.approx(1.5 * np.pi**2, rel=1e-13)

    def test_zero(self):
        grid = make_grid(2, 8)
        assert sobolev_norms(np.zeros((2,) + grid.shape, complex), grid, 3.0) == (0.0, 0.0, 0.0, 0.0)

    def test_r_below_two_rejected(self):
        grid = make_grid(2, 8)
        with pytest.raises(ValueError):
            sobolev_norms(np.zeros((2,) + grid.shape, complex), grid, 1.5)

    def test_l2_matches_quadrature(self, rng):
        grid = make_grid(2, 8)
        u_hat = random_modes(grid, rng, components=2)
        u = inverse_transform(u_hat, grid)
        assert sobolev_norms(u_hat, grid, 2.0).l2 ** 2 == pytest.approx(oracle.oracle_quadrature(np.sum(u * u, 0)), rel=1e-12)

    def test_second_gradient_is_frobenius(self, rng):
        grid = make_grid(3, 8)
        u_hat = random_modes(grid, rng, components=3)
        G = gradient(u_hat, grid)
        H = G[:, :, None] * (1j * grid.deriv)[None, None]
        full = grid.volume * np.sum(np.abs(H) ** 2)
        # resolved modes have no Nyquist content, so deriv and the lattice agree
        assert sobolev_norms(u_hat, grid, 2.0).h2 ** 2 == pytest.approx(full, rel=1e-12)


class TestKorn:
    def test_identity_general_field(self, rng, small_grid):
        u = remove_mean(random_modes(small_grid, rng, components=small_grid.dim, solenoidal=False), small_grid)
        Du = strain_hat(u, small_grid)
        lhs = small_grid.volume * np.sum(np.abs(Du) ** 2)
        grad = small_grid.volume * np.sum(np.abs(gradient(u, small_grid)) ** 2)
        div = norm_sq(divergence(u, small_grid), small_grid)
        assert lhs == pytest.approx(0.5 * grad + 0.5 * div, rel=1e-12)

    def test_equality_divergence_free(self, rng, small_grid):
        u = random_modes(small_grid, rng, components=small_grid.dim)
        lhs = small_grid.volume * np.sum(np.abs(strain_hat(u, small_grid)) ** 2)
        grad = small_grid.volume * np.sum(np.abs(gradient(u, small_grid)) ** 2)
        assert lhs == pytest.approx(0.5 * grad, rel=1e-12)
        # Korn bound with c_k = 1/sqrt(2) at q = 2
        assert np.sqrt(lhs) >= np.sqrt(grad) / np.sqrt(2) * (1 - 1e-12)


class TestInner:
    def test_parseval_pairing(self, rng):
        grid = make_grid(2, 8)
        a, b = random_modes(grid, rng, components=2), random_modes(grid, rng, components=2)
        ref = float(integrate(np.sum(inverse_transform(a, grid) * inverse_transform(b, grid), 0), grid))
        assert inner(a, b, grid) == pytest.approx(ref, rel=1e-12)
