import dataclasses
import math

import numpy as np
import pytest

from gsgf.constitutive import ConstitutiveLaw
from gsgf.field_ops import norm_sq
from gsgf.grid import forward_transform, make_grid
from gsgf.stepper import BlowUpError, InitialCondition, SimParams
from gsgf.uniqueness import (
    TwinRecord,
    calibrate,
    envelope_excess,
    gronwall_study,
    perturbation_direction,
    twin_runs,
    uniqueness_experiment,
)


def _params(law=None, n=16, t_end=0.1, dt=5e-3, **kw):
    law = law or ConstitutiveLaw(1.0, 1.0, 4.0)
    return SimParams(grid=make_grid(2, n), law=law, alpha1=0.5, dt=dt, t_end=t_end,
                     ic=InitialCondition("random_band", amplitude=1.0), seed=3, **kw)


class TestDirection:
    @pytest.mark.parametrize("kind", ["random", "taylor_green"])
    def test_unit_norm_and_solenoidal(self, kind):
        params = _params()
        e = perturbation_direction(params, kind)
        e_hat = forward_transform(e, params.grid)
        assert norm_sq(e_hat, params.grid) == pytest.approx(1.0, rel=1e-13)
        assert np.max(np.abs(np.sum(params.grid.wavenumbers * e_hat, axis=0))) < 1e-14

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="direction"):
            perturbation_direction(_params(), "shear")


class TestTwinRuns:
    def test_zero_perturbation_is_bitwise(self):
        rec = uniqueness_experiment(_params(), 0.0)
        assert rec.bitwise_equal
        assert not np.any(rec.W)
        assert math.isnan(calibrate(rec))

    def test_nonzero_perturbation_not_bitwise(self):
        assert not uniqueness_experiment(_params(t_end=0.01), 1e-8).bitwise_equal

    def test_negative_delta(self):
        with pytest.raises(ValueError):
            twin_runs(_params(), [1e-3, -1e-3])

    def test_initial_difference_energy(self):
        params = _params(t_end=0.01)
        delta = 1e-3
        rec = uniqueness_experiment(params, delta)
        e_hat = forward_transform(perturbation_direction(params), params.grid)
        grad_sq = params.grid.volume * np.sum(params.grid.stokes_eigenvalues * np.sum(np.abs(e_hat) ** 2, 0))
        assert rec.W[0] == pytest.approx(delta**2 * (1 + params.alpha1 * grad_sq), rel=1e-8)

    def test_taylor_green_linear_decay(self):
        # linear law: the difference is itself a Taylor-Green mode decaying at rate sigma
        law = ConstitutiveLaw(1.0, 0.0, 3.0)
        params = _params(law=law, t_end=0.2, dt=2e-3)
        params = dataclasses.replace(params, ic=InitialCondition("taylor_green", amplitude=0.5))
        direction = perturbation_direction(params, "taylor_green")
        rec = uniqueness_experiment(params, 1e-4, direction)
        sigma = 1.0 / (1 + 2 * params.alpha1)
        expected = np.exp(-2 * sigma * rec.t)
        assert np.max(np.abs(rec.W / rec.W[0] - expected) / expected) < 1e-3

    def test_blowup_propagates(self):
        # alpha1 = 0 keeps the viscous term stiff, so this dt is far past RK4 stability
        params = dataclasses.replace(_params(n=32, dt=0.05, t_end=1.0), alpha1=0.0)
        with pytest.raises(BlowUpError):
            uniqueness_experiment(params, 1e-3)


class TestCalibration:
    def _record(self, W, F):
        t = np.linspace(0, 1, len(W))
        return TwinRecord(1.0, t, np.asarray(W, float), np.asarray(F, float), False)

    def test_exact_exponential(self):
        t = np.linspace(0, 1, 11)
        rec = TwinRecord(1.0, t, np.exp(0.7 * t), np.ones_like(t), False)
        assert calibrate(rec) == pytest.approx(0.7, rel=1e-12)
        assert envelope_excess(rec, 0.7) == pytest.approx(0.0, abs=1e-14)
        assert envelope_excess(rec, 0.6) > 0

    def test_picks_worst_time(self):
        rec = self._record([1.0, np.e, np.e], [1.0, 1.0, 1.0])
        assert calibrate(rec) == pytest.approx(2.0)

    def test_zero_integral(self):
        assert math.isnan(calibrate(self._record([1.0, 1.0], [0.0, 0.0])))


class TestGronwallStudy:
    def test_rejects_nonpositive_delta(self):
        with pytest.raises(ValueError):
            gronwall_study(_params(), 0.0)

    def test_halving_delta(self):
        report = gronwall_study(_params(t_end=0.2), 1e-6)
        assert report.passed(), report
        assert report.sqrt_w_ratio == pytest.approx(0.5, rel=1e-3)
        assert report.stability < 1e-3
