"""Spectral operators against the dense brute-force references on a small grid."""

from __future__ import annotations

import numpy as np

from .. import oracle
from ..field_ops import divergence, gradient, leray_project
from ..grid import Grid, forward_transform, inverse_transform, truncate
from ..nonlinear import convect, stretch
from ..stepper import project_initial

OPERATORS = ("gradient", "divergence", "leray", "convect", "stretch")


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def random_resolved(grid: Grid, rng: np.random.Generator, solenoidal: bool) -> np.ndarray:
    u_hat = truncate(forward_transform(rng.standard_normal((grid.dim,) + grid.shape), grid), grid)
    return project_initial(u_hat, grid) if solenoidal else u_hat


def oracle_errors(grid: Grid, samples: int = 50, seed: int = 0) -> dict[str, float]:
    """Worst relative disagreement per operator over ``samples`` random fields."""
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(OPERATORS, 0.0)
    for _ in range(samples):
        w_hat = random_resolved(grid, rng, solenoidal=False)
        w = inverse_transform(w_hat, grid)
        errs = {
            "gradient": _relative(inverse_transform(gradient(w_hat, grid), grid), oracle.oracle_gradient(w)),
            "divergence": _relative(
                inverse_transform(divergence(w_hat, grid), grid),
                sum(oracle.oracle_derivative(w[j], j) for j in range(grid.dim)),
            ),
            "leray": _relative(inverse_transform(leray_project(w_hat, grid), grid), oracle.oracle_leray(w)),
        }
        u_hat = random_resolved(grid, rng, solenoidal=True)
        v_hat = random_resolved(grid, rng, solenoidal=False)
        errs["convect"] = _relative(convect(u_hat, v_hat, grid), oracle.oracle_convect_modes(u_hat, v_hat))
        errs["stretch"] = _relative(stretch(u_hat, v_hat, grid), oracle.oracle_stretch_modes(u_hat, v_hat))
        for name, err in errs.items():
            worst[name] = max(worst[name], err)
    return worst
