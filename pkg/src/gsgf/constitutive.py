"""Shear-thickening extra stress ``S(D) = (mu0 + mu1 |D|)^(r-2) D`` and its bounds.

Tensors use the numpy matrix convention: the last two axes are ``(d, d)``;
leading axes are batch axes.  ``|D|`` is the Frobenius norm.

The margin functions return ``lhs - rhs`` of each structural inequality for
the law, so a verified inequality shows up as a nonnegative margin (up to
rounding, which :func:`margin_sweep` tolerates at ``1e-12`` of the term scale).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
ZERO_NORM = 1e-300
THEOREM_MIN_R = 3.0


class TheoremRegimeWarning(UserWarning):
    """Exponent below the range covered by the existence/uniqueness theorem."""


@dataclass(frozen=True)
class ConstitutiveLaw:
    mu0: float
    mu1: float
    r: float

    def __post_init__(self):
        # mu1 = 0 is the linear-law limit; it leaves the structural class (c0 = c3 = 0)
        if not (self.mu0 > 0 and self.mu1 >= 0):
            raise ValueError(f"need mu0 > 0 and mu1 >= 0, got {self.mu0}, {self.mu1}")
        if not self.r >= 2:
            raise ValueError(f"r must be >= 2, got {self.r}")

    @property
    def in_theorem_regime(self) -> bool:
        return self.r >= THEOREM_MIN_R

    @property
    def is_linear(self) -> bool:
        """``S(D) = viscosity(0) D`` exactly (``mu1 = 0`` or ``r = 2``)."""
        return self.mu1 == 0 or self.r == 2

    def warn_if_outside_theorem(self) -> None:
        if not self.in_theorem_regime:
            warnings.warn(
                f"r = {self.r} is outside theorem regime r >= 3", TheoremRegimeWarning, stacklevel=2
            )

    def viscosity(self, norm):
        """Pointwise factor ``(mu0 + mu1 s)^(r-2)`` for shear-rate magnitude ``s``."""
        return np.power(self.mu0 + self.mu1 * np.asarray(norm, dtype=float), self.r - 2.0)


@dataclass(frozen=True)
class DerivedConstants:
    """Explicit structural constants for the law.

    ``c3_monotone`` is the calibrated constant used by the monotonicity margin;
    it is smaller than ``c3`` and is validated by sampling only.
    """

    c0: float
    c1: float
    c2: float
    c3: float
    c4: float
    c3_monotone: float


def derived_constants(law: ConstitutiveLaw) -> DerivedConstants:
    lo = min(law.mu0, law.mu1) ** (law.r - 2.0)
    hi = max(law.mu0, law.mu1) ** (law.r - 2.0)
    c1 = (law.r - 1.0) * hi
    return DerivedConstants(
        c0=lo,
        c1=c1,
        c2=c1,
        c3=lo,
        c4=hi,
        c3_monotone=0.5 * lo * 2.0 ** (2.0 - law.r),
    )


def frobenius(T: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(T * T, axis=(-2, -1)))


def _require_symmetric(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim < 2 or D.shape[-1] != D.shape[-2]:
        raise ValueError(f"expected (..., d, d) tensors, got shape {D.shape}")
    skew = np.max(np.abs(D - np.swapaxes(D, -1, -2)), initial=0.0)
    if skew > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(D), initial=0.0))):
        raise ValueError(f"tensor is not symmetric (max asymmetry {skew:.3e})")
    return D


def stress(D, law: ConstitutiveLaw) -> np.ndarray:
    """``S(D)`` for symmetric ``D`` (batched)."""
    D = _require_symmetric(D)
    return law.viscosity(frobenius(D))[..., None, None] * D


def stress_jacobian(D, law: ConstitutiveLaw) -> np.ndarray:
    """Analytic ``dS_ij / dD_kl``, shape ``(..., d, d, d, d)``.

    Entries are treated as independent, so the identity part is
    ``delta_ik delta_jl``.  At ``D = 0`` the rank-one part is replaced by its
    limit, zero.
    """
    D = _require_symmetric(D)
    d = D.shape[-1]
    nrm = frobenius(D)
    base = law.mu0 + law.mu1 * nrm
    phi = np.power(base, law.r - 2.0)
    safe = np.where(nrm < ZERO_NORM, 1.0, nrm)
    beta = np.where(nrm < ZERO_NORM, 0.0, (law.r - 2.0) * law.mu1 * np.power(base, law.r - 3.0) / safe)
    eye = np.eye(d * d).reshape(d, d, d, d)
    outer = D[..., :, :, None, None] * D[..., None, None, :, :]
    return phi[..., None, None, None, None] * eye + beta[..., None, None, None, None] * outer


def jacobian_form(D, B, law: ConstitutiveLaw) -> np.ndarray:
    """Quadratic form ``dS_ij/dD_kl B_ij B_kl`` without materializing the 4-tensor."""
    D = _require_symmetric(D)
    B = _require_symmetric(B)
    nrm = frobenius(D)
    base = law.mu0 + law.mu1 * nrm
    bb = np.sum(B * B, axis=(-2, -1))
    db = np.sum(D * B, axis=(-2, -1))
    safe = np.where(nrm < ZERO_NORM, 1.0, nrm)
    rank_one = np.where(
        nrm < ZERO_NORM, 0.0, (law.r - 2.0) * law.mu1 * np.power(base, law.r - 3.0) * db * db / safe
    )
    return np.power(base, law.r - 2.0) * bb + rank_one


# --- structural inequalities -------------------------------------------------
# Each *_terms helper returns (lhs, rhs) of "lhs >= rhs"; margins are lhs - rhs.


def _coercivity_terms(D, law, consts):
    D = _require_symmetric(D)
    nrm = frobenius(D)
    lhs = np.sum(stress(D, law) * D, axis=(-2, -1))
    rhs = consts.c3 * np.power(1.0 + nrm, law.r - 2.0) * nrm * nrm
    return lhs, rhs


def _growth_terms(D, law, consts):
    D = _require_symmetric(D)
    nrm = frobenius(D)
    lhs = consts.c4 * nrm * np.power(1.0 + nrm, law.r - 2.0)
    rhs = frobenius(stress(D, law))
    return lhs, rhs


def _monotonicity_terms(B, D, law, consts):
    B = _require_symmetric(B)
    D = _require_symmetric(D)
    diff = B - D
    lhs = np.sum((stress(B, law) - stress(D, law)) * diff, axis=(-2, -1))
    rhs = (
        consts.c3_monotone
        * np.sum(diff * diff, axis=(-2, -1))
        * np.power(1.0 + frobenius(B) + frobenius(D), law.r - 2.0)
    )
    return lhs, rhs


def _jacobian_terms(D, B, law, consts):
    q = jacobian_form(D, B, law)
    weight = np.power(1.0 + frobenius(np.asarray(D, dtype=float)), law.r - 2.0)
    bb = np.sum(np.asarray(B, dtype=float) ** 2, axis=(-2, -1))
    return q, consts.c0 * weight * bb, consts.c1 * weight * bb


def coercivity_margin(D, law: ConstitutiveLaw):
    """``S(D):D - c3 (1+|D|)^(r-2) |D|^2``."""
    lhs, rhs = _coercivity_terms(D, law, derived_constants(law))
    return lhs - rhs


def growth_margin(D, law: ConstitutiveLaw):
    """``c4 |D| (1+|D|)^(r-2) - |S(D)|``."""
    lhs, rhs = _growth_terms(D, law, derived_constants(law))
    return lhs - rhs


def monotonicity_margin(B, D, law: ConstitutiveLaw):
    """``[S(B)-S(D)]:[B-D] - c3' |B-D|^2 (1+|B|+|D|)^(r-2)`` with the calibrated ``c3'``."""
    lhs, rhs = _monotonicity_terms(B, D, law, derived_constants(law))
    return lhs - rhs


def jacobian_form_bounds(D, B, law: ConstitutiveLaw):
    """Margins of ``c0 w |B|^2 <= Q(D,B) <= c1 w |B|^2`` with ``w = (1+|D|)^(r-2)``.

    Returns ``(lower_margin, upper_margin)``, both nonnegative when the
    two-sided bound holds.
    """
    q, lower, upper = _jacobian_terms(D, B, law, derived_constants(law))
    return q - lower, upper - q


def jacobian_norm_margin(D, law: ConstitutiveLaw):
    """``c2 (1+|D|)^(r-2) - ||dS/dD||`` with the operator (spectral) norm on matrices."""
    D = _require_symmetric(D)
    d = D.shape[-1]
    J = stress_jacobian(D, law).reshape(D.shape[:-2] + (d * d, d * d))
    nrm = np.linalg.norm(J, ord=2, axis=(-2, -1))
    return derived_constants(law).c2 * np.power(1.0 + frobenius(D), law.r - 2.0) - nrm


# --- sampling ----------------------------------------------------------------


def random_symmetric(rng: np.random.Generator, count: int, d: int = 3, bound: float = 10.0) -> np.ndarray:
    """``count`` symmetric ``d x d`` tensors with entries uniform in ``[-bound, bound]``."""
    A = rng.uniform(-bound, bound, size=(count, d, d))
    upper = np.triu(A)
    return upper + np.swapaxes(np.triu(A, 1), -1, -2)


@dataclass
class MarginReport:
    """Minimum scaled margin per inequality over a sample set.

    Each entry is ``min((lhs - rhs) / scale)`` with ``scale = max(|lhs|, |rhs|, tiny)``;
    an inequality passes when its value is ``>= -tol``.
    """

    law: ConstitutiveLaw
    samples: int
    minima: dict
    monotone_ratio_min: float
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return all(v >= -self.tol for v in self.minima.values())


def _scaled_min(lhs, rhs) -> float:
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    return float(np.min((lhs - rhs) / scale))


def margin_sweep(
    law: ConstitutiveLaw,
    samples: int = 100_000,
    d: int = 3,
    seed: int = 0,
    bound: float = 10.0,
    chunk: int = 20_000,
) -> MarginReport:
    """Evaluate all five structural margins on random symmetric tensors.

    Pairs ``(B, D)`` are drawn independently; a quarter of the monotonicity
    pairs are made collinear and opposite, where the calibrated constant is
    tightest.
    """
    rng = np.random.default_rng(seed)
    consts = derived_constants(law)
    minima = {"jacobian_lower": np.inf, "jacobian_upper": np.inf, "coercivity": np.inf,
              "growth": np.inf, "monotonicity": np.inf}
    ratio_min = np.inf
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        D = random_symmetric(rng, m, d, bound)
        B = random_symmetric(rng, m, d, bound)
        q, lower, upper = _jacobian_terms(D, B, law, consts)
        minima["jacobian_lower"] = min(minima["jacobian_lower"], _scaled_min(q, lower))
        minima["jacobian_upper"] = min(minima["jacobian_upper"], _scaled_min(upper, q))
        minima["coercivity"] = min(minima["coercivity"], _scaled_min(*_coercivity_terms(D, law, consts)))
        minima["growth"] = min(minima["growth"], _scaled_min(*_growth_terms(D, law, consts)))
        opposite = m // 4
        B[:opposite] = -rng.uniform(0.0, 1.0, size=(opposite, 1, 1)) * D[:opposite]
        lhs, rhs = _monotonicity_terms(B, D, law, consts)
        minima["monotonicity"] = min(minima["monotonicity"], _scaled_min(lhs, rhs))
        if consts.c3_monotone > 0:
            ratio_min = min(ratio_min, float(np.min(lhs / (rhs / consts.c3_monotone))))
        done += m
    return MarginReport(law=law, samples=samples, minima=minima, monotone_ratio_min=ratio_min)


def jacobian_fd_error(law: ConstitutiveLaw, samples: int = 1000, d: int = 3, seed: int = 1,
                      h: float = 1e-6) -> float:
    """Worst relative gap between ``J[D] B`` and a central difference of ``S`` along ``B``."""
    rng = np.random.default_rng(seed)
    D = random_symmetric(rng, samples, d, 10.0)
    B = random_symmetric(rng, samples, d, 1.0)
    jvp = np.einsum("...ijkl,...kl->...ij", stress_jacobian(D, law), B)
    fd = (stress(D + h * B, law) - stress(D - h * B, law)) / (2.0 * h)
    return float(np.max(frobenius(jvp - fd) / frobenius(jvp)))
