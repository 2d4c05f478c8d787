import numpy as np
import pytest

from gsgf import oracle
from gsgf.cli_io.checks import OPERATORS, oracle_errors
from gsgf.grid import make_grid


def _mode(n, k, dim=1):
    a = np.zeros((n,) * dim, dtype=complex)
    a[tuple(np.mod(k, n))] = 1.0
    return a


class TestConvolution:
    def test_zero(self):
        a = _mode(8, (1, 2), dim=2)
        assert not np.any(oracle.oracle_convolution(a, np.zeros_like(a)))

    def test_single_modes_add(self):
        out = oracle.oracle_convolution(_mode(8, (1,)), _mode(8, (2,)))
        assert np.array_equal(out, _mode(8, (3,)))

    def test_cancelling_modes_give_mean(self):
        out = oracle.oracle_convolution(_mode(8, (2, -1), 2), _mode(8, (-2, 1), 2))
        assert np.array_equal(out, _mode(8, (0, 0), 2))

    def test_product_beyond_resolved_band_dropped(self):
        assert not np.any(oracle.oracle_convolution(_mode(8, (1,)), _mode(8, (3,))))

    def test_commutative(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        b = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        assert np.allclose(oracle.oracle_convolution(a, b), oracle.oracle_convolution(b, a), rtol=0, atol=1e-13)

    def test_size_limit(self):
        with pytest.raises(ValueError, match="n <= 16"):
            oracle.oracle_convolution(np.zeros(32), np.zeros(32))


class TestQuadrature:
    def test_constant(self):
        assert oracle.oracle_quadrature(np.full((4, 6), 3.0)) == pytest.approx(3.0 * 4 * np.pi**2, rel=1e-15)

    @pytest.mark.parametrize("n", [4, 8, 10])
    def test_sin_squared(self, n):
        x = 2 * np.pi * np.arange(n) / n
        assert oracle.oracle_quadrature(np.sin(x) ** 2) == pytest.approx(np.pi, rel=1e-14)


class TestDerivative:
    @pytest.mark.parametrize("n", [6, 8, 16])
    def test_sine(self, n):
        x = 2 * np.pi * np.arange(n) / n
        assert np.allclose(oracle.oracle_derivative(np.sin(2 * x), 0), 2 * np.cos(2 * x), rtol=0, atol=1e-13)

    def test_constant(self):
        assert np.allclose(oracle.oracle_derivative(np.ones((8, 8)), 1), 0, atol=1e-14)

    def test_axis(self):
        x = 2 * np.pi * np.arange(8) / 8
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        f = np.sin(X1) * np.cos(3 * X2)
        assert np.allclose(oracle.oracle_derivative(f, 1), -3 * np.sin(X1) * np.sin(3 * X2), atol=1e-13)

    def test_matrix_antisymmetric(self):
        D = oracle.differentiation_matrix(8)
        assert np.array_equal(D, -D.T)

    def test_size_limit(self):
        with pytest.raises(ValueError):
            oracle.differentiation_matrix(18)

    def test_finite_difference_order(self):
        errs = []
        for n in (32, 64):
            x = 2 * np.pi * np.arange(n) / n
            errs.append(np.max(np.abs(oracle.finite_difference_derivative(np.sin(3 * x), 0) - 3 * np.cos(3 * x))))
        assert np.log2(errs[0] / errs[1]) > 7.5


class TestLeray:
    def test_gradient_removed(self):
        x = 2 * np.pi * np.arange(8) / 8
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        w = np.array([np.cos(X1) * np.sin(X2), np.sin(X1) * np.cos(X2)])  # grad(sin x1 sin x2)
        assert np.max(np.abs(oracle.oracle_leray(w))) < 1e-12

    def test_solenoidal_kept(self):
        x = 2 * np.pi * np.arange(8) / 8
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        u = np.array([np.sin(X1) * np.cos(X2), -np.cos(X1) * np.sin(X2)])
        assert np.max(np.abs(oracle.oracle_leray(u) - u)) < 1e-12


class TestTaylorGreen:
    def test_initial_amplitude(self):
        u = oracle.taylor_green_exact(0.0, 1.0, 0.0, 1.7, 8)
        assert np.max(np.abs(u)) == pytest.approx(1.7, rel=1e-15)

    def test_rate(self):
        assert oracle.taylor_green_rate(1.0, 0.25) == pytest.approx(2 / 3)

    def test_decay_value(self):
        u0 = oracle.taylor_green_exact(0.0, 1.0, 0.25, 1.0, 8)
        u1 = oracle.taylor_green_exact(1.0, 1.0, 0.25, 1.0, 8)
        assert np.max(np.abs(u1)) / np.max(np.abs(u0)) == pytest.approx(0.513417, abs=1e-6)

    def test_three_dimensions_rejected(self):
        with pytest.raises(ValueError):
            oracle.taylor_green_exact(0.0, 1.0, 0.0, 1.0, 8, dim=3)

    def test_solenoidal(self):
        u = oracle.taylor_green_exact(0.3, 1.0, 0.5, 1.0, 8)
        div = oracle.oracle_derivative(u[0], 0) + oracle.oracle_derivative(u[1], 1)
        assert np.max(np.abs(div)) < 1e-13


class TestOracleErrors:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_all_operators_agree(self, dim):
        errors = oracle_errors(make_grid(dim, 8), samples=3, seed=dim)
        assert set(errors) == set(OPERATORS)
        assert max(errors.values()) < 1e-12

    def test_detects_a_wrong_operator(self, monkeypatch):
        # a sign-flipped stretch must be reported as an O(1) disagreement
        from gsgf.cli_io import checks

        monkeypatch.setattr(checks, "stretch", lambda u, v, grid: -oracle.oracle_stretch_modes(u, v))
        assert oracle_errors(make_grid(2, 8), samples=1)["stretch"] > 1.0
