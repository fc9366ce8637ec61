"""Closed-form steering quantities, criteria verdicts, and key-rate bounds.

All steering measures are reported in nats (natural logarithms). The
quadrature-inference (Reid) product is deliberately evaluated in the
covariance matrix's current basis; its minimization over local
symplectics lives in :mod:`cvsteer.optimize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DegenerateCorrelation, SingularBlock, SingularMarginal, SteeringError
from .gaussian import (
    OMEGA_1,
    PHYSICALITY_TOL,
    CovMatrix,
    StandardForm,
    SymplecticParams,
)

LN2 = math.log(2.0)

_WISEMAN_FORM = np.zeros((4, 4), dtype=complex)
_WISEMAN_FORM[2:, 2:] = 1j * OMEGA_1
_WISEMAN_FORM.flags.writeable = False


def _schur(m: np.ndarray, kept: slice, removed: slice) -> np.ndarray:
    top = m[removed, removed]
    det_top = float(np.linalg.det(top))
    if det_top <= 1e-14:
        raise SingularBlock(f"block to invert has determinant {det_top:.3e}")
    cross = m[removed, kept]
    out = m[kept, kept] - cross.T @ np.linalg.inv(top) @ cross
    return 0.5 * (out + out.T)


def schur_complement_b(cm: CovMatrix) -> np.ndarray:
    """Schur complement B - C^T A^{-1} C: Bob's conditional second moments
    after optimal Gaussian measurements on Alice."""
    return _schur(cm.matrix, slice(2, 4), slice(0, 2))


def schur_complement_a(cm: CovMatrix) -> np.ndarray:
    """Schur complement A - C B^{-1} C^T (roles of the parties swapped)."""
    return _schur(cm.matrix, slice(0, 2), slice(2, 4))


def gaussian_steering_a_to_b(cm: CovMatrix) -> float:
    """Gaussian A->B steering: max{0, -1/2 ln det(B - C^T A^{-1} C)}.

    A local symplectic invariant; positive exactly when the state is
    steerable by Gaussian measurements on A.
    """
    return max(0.0, -0.5 * math.log(float(np.linalg.det(schur_complement_b(cm)))))


def gaussian_steering_b_to_a(cm: CovMatrix) -> float:
    """Gaussian B->A steering, block roles swapped."""
    return max(0.0, -0.5 * math.log(float(np.linalg.det(schur_complement_a(cm)))))


def _reid_from_matrix(m: np.ndarray) -> float:
    var_xa, var_pa = m[0, 0], m[1, 1]
    if var_xa <= 1e-14 or var_pa <= 1e-14:
        raise SingularMarginal("party-A marginal variances must be positive")
    inf_x = m[2, 2] - m[0, 2] ** 2 / var_xa
    inf_p = m[3, 3] - m[1, 3] ** 2 / var_pa
    return float(inf_x * inf_p)


def reid_product(cm: CovMatrix) -> float:
    """Product of optimal linear-estimator inference variances,

        (Var xB - Cov(xA,xB)^2/Var xA) * (Var pB - Cov(pA,pB)^2/Var pA),

    evaluated in the matrix's current basis. Values below 1 certify
    A->B steerability; the quantity is *not* basis invariant.
    """
    return _reid_from_matrix(cm.matrix)


def check_reid_criterion(cm: CovMatrix) -> bool:
    """True iff the inference-variance product drops below 1."""
    return reid_product(cm) < 1.0


def wiseman_violated_det(cm: CovMatrix) -> bool:
    """Algebraic steerability test: det(B - C^T A^{-1} C) < 1."""
    return float(np.linalg.det(schur_complement_b(cm))) < 1.0


def wiseman_violated_spectral(cm: CovMatrix, tol: float = PHYSICALITY_TOL) -> bool:
    """Spectral steerability test: sigma + i(0 (+) Omega_B) has a negative
    eigenvalue (below -tol, which absorbs the exactly-zero boundary)."""
    lam_min = float(np.linalg.eigvalsh(cm.matrix + _WISEMAN_FORM)[0])
    return lam_min < -tol


def check_wiseman(cm: CovMatrix) -> bool:
    """A->B steerability by Gaussian measurements.

    Runs both equivalent implementations, the algebraic determinant test
    and the spectral test, as a built-in cross validation; a disagreement
    outside the numerically ambiguous band |det - 1| <= 1e-9 raises.
    Returns the algebraic verdict (strict det < 1), which is exactly the
    positivity condition of :func:`gaussian_steering_a_to_b`.
    """
    det_mb = float(np.linalg.det(schur_complement_b(cm)))
    algebraic = det_mb < 1.0
    spectral = wiseman_violated_spectral(cm)
    if algebraic != spectral and abs(det_mb - 1.0) > 1e-9:
        raise SteeringError(
            "steerability tests disagree: det test "
            f"{algebraic} (det = {det_mb!r}) vs spectral test {spectral}"
        )
    return algebraic


def optimal_params(
    sf: StandardForm, v_b: float, w_a: float = 1.0, w_b: float = 1.0
) -> tuple[SymplecticParams, SymplecticParams]:
    """Closed-form family of local symplectics minimizing the inference
    product of a standard-form state, for any value of the free parameter
    ``v_b`` and of the scale parameters ``w_a``, ``w_b``.

    With k = (c1^2 - ab)/(ab - c2^2) and t = ``v_b``, the family is

        party A: (u, v) = ((c1/c2) t,  k (c2/c1) t)
        party B: (u, v) = (t,          k t)

    Applying it to the embedded standard form brings the inference
    product down to its global minimum (b - c1^2/a)(b - c2^2/a).
    When c1 = 0 or c2 = 0 the family degenerates; identity parameters
    are returned since the product then already factorizes at the
    standard form itself.
    """
    if abs(sf.c1) < 1e-12 or abs(sf.c2) < 1e-12:
        return SymplecticParams(0.0, 0.0, 1.0), SymplecticParams(0.0, 0.0, 1.0)
    denom = sf.a * sf.b - sf.c2 ** 2
    if abs(denom) < 1e-12:
        raise DegenerateCorrelation("a*b = c2^2: conditional state is singular")
    k = (sf.c1 ** 2 - sf.a * sf.b) / denom
    p_a = SymplecticParams(u=(sf.c1 / sf.c2) * v_b, v=k * (sf.c2 / sf.c1) * v_b, w=w_a)
    p_b = SymplecticParams(u=v_b, v=k * v_b, w=w_b)
    return p_a, p_b


def key_rate_bound(cm: CovMatrix) -> float:
    """Guaranteed direct-reconciliation secret key rate from the
    inference-variance product in the current basis:
    max{0, ln(2 / (e * sqrt(product)))} nats per use."""
    return max(0.0, LN2 - 1.0 - 0.5 * math.log(reid_product(cm)))


def optimal_key_rate_bound(s_lower: float) -> float:
    """Key-rate bound from a steering-measure value: max{0, S + ln 2 - 1}."""
    if s_lower < 0.0:
        raise ValueError("steering measure values are nonnegative")
    return max(0.0, s_lower + LN2 - 1.0)


@dataclass(frozen=True)
class SteeringReport:
    """All steering quantities computed for one covariance matrix."""

    det_m_b: float
    det_m_a: float
    g_a_to_b: float
    g_b_to_a: float
    reid_product_as_given: float
    reid_violated: bool
    wiseman_violated_a_to_b: bool
    key_rate_bound: float
    optimal_key_rate_bound: float

    def to_json_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            out[key] = _sig12(value) if isinstance(value, float) else value
        return out


def _sig12(x: float) -> float:
    """Round to 12 significant digits for stable serialized output."""
    return float(f"{x:.12g}")


def full_report(cm: CovMatrix) -> SteeringReport:
    """Compute every :class:`SteeringReport` field for a covariance matrix."""
    det_m_b = float(np.linalg.det(schur_complement_b(cm)))
    det_m_a = float(np.linalg.det(schur_complement_a(cm)))
    g_ab = max(0.0, -0.5 * math.log(det_m_b))
    g_ba = max(0.0, -0.5 * math.log(det_m_a))
    reid = reid_product(cm)
    return SteeringReport(
        det_m_b=det_m_b,
        det_m_a=det_m_a,
        g_a_to_b=g_ab,
        g_b_to_a=g_ba,
        reid_product_as_given=reid,
        reid_violated=reid < 1.0,
        wiseman_violated_a_to_b=check_wiseman(cm),
        key_rate_bound=max(0.0, LN2 - 1.0 - 0.5 * math.log(reid)),
        optimal_key_rate_bound=optimal_key_rate_bound(g_ab),
    )
