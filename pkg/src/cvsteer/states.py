"""Generators of test states: vacuum, two-mode squeezed vacuum, noisy and
random covariance matrices, and classical mixtures of Gaussian states.

Mixtures of Gaussians with distinct means are genuinely non-Gaussian
while remaining exactly samplable with a closed-form covariance matrix,
which makes them the workhorse for probing the gap between linear and
optimal inference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnphysicalMixture, UnphysicalState
from .gaussian import CovMatrix, LocalSymplectic, validate_bona_fide


@dataclass(frozen=True)
class GaussianStateSpec:
    """A Gaussian state: covariance matrix plus first moments (vacuum units)."""

    cm: CovMatrix
    mean: np.ndarray = None

    def __post_init__(self):
        mean = np.zeros(4) if self.mean is None else np.asarray(self.mean, dtype=float)
        if mean.shape != (4,):
            raise ValueError(f"mean must have 4 entries, got shape {mean.shape}")
        mean = mean.copy()
        mean.flags.writeable = False
        object.__setattr__(self, "mean", mean)


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Classical mixture of Gaussian states: weights must sum to 1."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), spec) for w, spec in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(w <= 0.0 for w, _ in comps):
            raise ValueError("mixture weights must be positive")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {total!r}")
        object.__setattr__(self, "components", comps)
        mixture_cm(self)  # defensive physicality check of the effective CM


def vacuum() -> GaussianStateSpec:
    """Two-mode vacuum: identity covariance matrix, zero mean."""
    return GaussianStateSpec(CovMatrix(np.eye(4)))


def tmsv(r: float) -> GaussianStateSpec:
    """Two-mode squeezed vacuum with squeezing r >= 0, in standard form:
    a = b = cosh 2r, c1 = -c2 = sinh 2r. Pure (det sigma = 1) for all r."""
    if r < 0:
        raise ValueError("squeezing parameter must be nonnegative")
    ch, sh = np.cosh(2.0 * r), np.sinh(2.0 * r)
    m = np.diag([ch, ch, ch, ch])
    m[0, 2] = m[2, 0] = sh
    m[1, 3] = m[3, 1] = -sh
    return GaussianStateSpec(CovMatrix(m))


def noisy_tmsv(r: float, n_a: float, n_b: float) -> GaussianStateSpec:
    """Two-mode squeezed vacuum with thermal noise n_a, n_b >= 0 added to
    the respective marginals; asymmetric noise produces one-way steering."""
    if n_a < 0 or n_b < 0:
        raise ValueError("added noise must be nonnegative")
    m = tmsv(r).cm.matrix + np.diag([n_a, n_a, n_b, n_b])
    return GaussianStateSpec(CovMatrix(m))


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def _squeeze(s: float) -> np.ndarray:
    return np.diag([np.exp(s), np.exp(-s)])


def _mixer(theta: float) -> np.ndarray:
    """Two-mode rotation mixing the parties; symplectic for any angle."""
    c, s = np.cos(theta), np.sin(theta)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def _direct_sum(top: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4))
    out[:2, :2] = top
    out[2:, 2:] = bottom
    return out


def random_cm(seed: int, max_thermal: float = 3.0) -> GaussianStateSpec:
    """Random bona fide covariance matrix, deterministic per seed.

    sigma = S diag(nu1, nu1, nu2, nu2) S^T with nu_i uniform in
    [1, max_thermal] and S composed as (rotation pair) * (squeeze pair) *
    two-mode mixer * (rotation pair); angles uniform on [0, 2pi),
    squeezes uniform on [0, 1.5]. Generic but not claimed uniform in any
    canonical measure.
    """
    if max_thermal < 1.0:
        raise ValueError("max_thermal must be >= 1")
    rng = np.random.default_rng(seed)
    nu = rng.uniform(1.0, max_thermal, size=2)
    outer = rng.uniform(0.0, 2.0 * np.pi, size=2)
    squeezes = rng.uniform(0.0, 1.5, size=2)
    mix_angle = rng.uniform(0.0, 2.0 * np.pi)
    inner = rng.uniform(0.0, 2.0 * np.pi, size=2)
    full = (
        _direct_sum(_rotation(outer[0]), _rotation(outer[1]))
        @ _direct_sum(_squeeze(squeezes[0]), _squeeze(squeezes[1]))
        @ _mixer(mix_angle)
        @ _direct_sum(_rotation(inner[0]), _rotation(inner[1]))
    )
    m = full @ np.diag([nu[0], nu[0], nu[1], nu[1]]) @ full.T
    return GaussianStateSpec(validate_bona_fide(0.5 * (m + m.T)))


def mixture_cm(mix: GaussianMixtureSpec) -> CovMatrix:
    """Effective covariance matrix of a classical mixture: weighted second
    moments about the mixture mean,

        sum_i w_i (sigma_i + d_i d_i^T) - dbar dbar^T.
    """
    second = np.zeros((4, 4))
    dbar = np.zeros(4)
    for w, spec in mix.components:
        second += w * (spec.cm.matrix + np.outer(spec.mean, spec.mean))
        dbar += w * spec.mean
    m = second - np.outer(dbar, dbar)
    try:
        return validate_bona_fide(0.5 * (m + m.T))
    except UnphysicalState as exc:  # cannot occur for valid components
        raise UnphysicalMixture(f"mixture covariance not physical: {exc}") from exc


def mixture_mean(mix: GaussianMixtureSpec) -> np.ndarray:
    return sum(w * spec.mean for w, spec in mix.components)


def transform_state(spec: GaussianStateSpec, s: LocalSymplectic) -> GaussianStateSpec:
    """Apply a local symplectic to a Gaussian state (CM and mean)."""
    full = s.matrix()
    m = full @ spec.cm.matrix @ full.T
    return GaussianStateSpec(CovMatrix(0.5 * (m + m.T)), full @ spec.mean)


def transform_mixture(mix: GaussianMixtureSpec, s: LocalSymplectic) -> GaussianMixtureSpec:
    """Apply a local symplectic componentwise to a mixture."""
    return GaussianMixtureSpec(
        tuple((w, transform_state(spec, s)) for w, spec in mix.components)
    )


# --- JSON schemas -----------------------------------------------------------

def state_from_json_dict(data: dict):
    """Parse a state file: either a single Gaussian (``{"cm": ...}``) or a
    mixture (``{"components": [{"weight": w, "cm": ..., "mean": ...}, ...]}``).
    """
    from .gaussian import cm_from_json_dict

    if not isinstance(data, dict):
        raise ValueError("expected a JSON object")
    if "components" in data:
        comps = []
        for entry in data["components"]:
            if "weight" not in entry:
                raise ValueError("every mixture component needs a 'weight'")
            cm, mean = cm_from_json_dict(entry)
            comps.append((float(entry["weight"]), GaussianStateSpec(cm, mean)))
        return GaussianMixtureSpec(tuple(comps))
    cm, mean = cm_from_json_dict(data)
    return GaussianStateSpec(cm, mean)


def state_to_json_dict(state) -> dict:
    from .gaussian import cm_to_json_dict

    if isinstance(state, GaussianMixtureSpec):
        return {
            "components": [
                {"weight": w, **cm_to_json_dict(spec.cm, spec.mean)}
                for w, spec in state.components
            ]
        }
    return cm_to_json_dict(state.cm, state.mean)
