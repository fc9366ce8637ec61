"""Covariance-matrix types and local symplectic algebra for two-mode states.

Conventions used throughout the package:

* quadrature ordering (x_A, p_A, x_B, p_B);
* vacuum units: the vacuum covariance matrix is the identity, so every
  variance criterion bound equals 1 (this fixes the hbar convention,
  which is otherwise implicit: [x, p] = i with CM entries being
  symmetrized second moments normalized to vacuum = 1);
* the symplectic form has unit entries, Omega = [[0,1],[-1,0]] per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NotPositiveDefinite,
    NotSymmetric,
    SingularParams,
    UnphysicalState,
)

OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[OMEGA_1, np.zeros((2, 2))], [np.zeros((2, 2)), OMEGA_1]])
OMEGA.flags.writeable = False
OMEGA_1.flags.writeable = False

SYMMETRY_TOL = 1e-12     # relative, on matrix entries
PHYSICALITY_TOL = 1e-10  # eigenvalue floor for sigma + i*Omega
DET_ONE_TOL = 1e-10      # |det - 1| bound for symplectic matrices
CONGRUENCE_TOL = 1e-9    # round-trip / invariance comparisons


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, CovMatrix):
        return m.matrix
    return np.asarray(m, dtype=float)


@dataclass(frozen=True)
class CovMatrix:
    """4x4 symmetric covariance matrix of a two-mode state, vacuum units.

    Construction validates symmetry and the physicality constraint
    sigma + i*Omega >= 0; instances are immutable and safe to share
    between threads.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 real matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("covariance matrix entries must be finite")
        scale = max(1.0, float(np.abs(m).max()))
        if float(np.abs(m - m.T).max()) > SYMMETRY_TOL * scale:
            raise NotSymmetric(
                "matrix is not symmetric within relative tolerance "
                f"{SYMMETRY_TOL:g}"
            )
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        lam_min = float(np.linalg.eigvalsh(m + 1j * OMEGA)[0])
        if lam_min < -PHYSICALITY_TOL:
            raise UnphysicalState(
                "covariance matrix violates sigma + i*Omega >= 0 "
                f"(most negative eigenvalue {lam_min:.6e})",
                min_eigenvalue=lam_min,
            )

    @property
    def block_a(self) -> np.ndarray:
        """Top-left 2x2 marginal block of party A."""
        return self.matrix[:2, :2]

    @property
    def block_b(self) -> np.ndarray:
        """Bottom-right 2x2 marginal block of party B."""
        return self.matrix[2:, 2:]

    @property
    def block_c(self) -> np.ndarray:
        """Top-right 2x2 intermodal correlation block."""
        return self.matrix[:2, 2:]


def validate_bona_fide(matrix) -> CovMatrix:
    """Validate a raw 4x4 matrix as a physical two-mode covariance matrix.

    Returns a :class:`CovMatrix` iff the input is symmetric (1e-12
    relative) and satisfies sigma + i*Omega >= 0 (eigenvalues above
    -1e-10). Raises :class:`NotSymmetric` or :class:`UnphysicalState`
    otherwise; the latter reports the most negative eigenvalue.
    """
    return CovMatrix(_as_matrix(matrix))


@dataclass(frozen=True)
class SymplecticParams:
    """Parameters (u, v, w) of a single-mode symplectic matrix.

    The chart covers all 2x2 symplectics with nonzero lower-right entry;
    it is singular on u*v = 1 and w = 0.
    """

    u: float
    v: float
    w: float

    def __post_init__(self):
        if abs(self.w) < 1e-12:
            raise SingularParams("w must be nonzero")
        if abs(1.0 - self.u * self.v) < 1e-12:
            raise SingularParams("u*v = 1 is outside the parametrization")


def symplectic_from_params(p: SymplecticParams) -> np.ndarray:
    """Build the 2x2 symplectic matrix for parameters (u, v, w).

    Layout: [[1/((1-uv)w), v/((1-uv)w)], [u*w, w]]. The determinant is
    identically 1, which for 2x2 matrices is equivalent to the
    symplectic condition S Omega S^T = Omega.
    """
    denom = (1.0 - p.u * p.v) * p.w
    return np.array([[1.0 / denom, p.v / denom], [p.u * p.w, p.w]])


@dataclass(frozen=True)
class LocalSymplectic:
    """A pair of 2x2 symplectic matrices acting on parties A and B."""

    s_a: np.ndarray
    s_b: np.ndarray

    def __post_init__(self):
        for name in ("s_a", "s_b"):
            s = np.asarray(getattr(self, name), dtype=float)
            if s.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2, got shape {s.shape}")
            det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
            if abs(det - 1.0) > DET_ONE_TOL:
                raise ValueError(f"{name} is not symplectic: det = {det!r}")
            s = s.copy()
            s.flags.writeable = False
            object.__setattr__(self, name, s)

    @classmethod
    def identity(cls) -> "LocalSymplectic":
        return cls(np.eye(2), np.eye(2))

    @classmethod
    def from_params(cls, p_a: SymplecticParams, p_b: SymplecticParams) -> "LocalSymplectic":
        return cls(symplectic_from_params(p_a), symplectic_from_params(p_b))

    def matrix(self) -> np.ndarray:
        """The 4x4 direct sum S_A (+) S_B."""
        out = np.zeros((4, 4))
        out[:2, :2] = self.s_a
        out[2:, 2:] = self.s_b
        return out

    def inverse(self) -> "LocalSymplectic":
        return LocalSymplectic(np.linalg.inv(self.s_a), np.linalg.inv(self.s_b))


def apply_local(cm: CovMatrix, s: LocalSymplectic) -> CovMatrix:
    """Congruence action sigma -> S sigma S^T of a local symplectic pair."""
    full = s.matrix()
    out = full @ cm.matrix @ full.T
    return CovMatrix(0.5 * (out + out.T))


def local_invariants(cm: CovMatrix) -> tuple[float, float, float, float]:
    """The four local symplectic invariants (det A, det B, det C, det sigma)."""
    m = cm.matrix
    return (
        float(np.linalg.det(m[:2, :2])),
        float(np.linalg.det(m[2:, 2:])),
        float(np.linalg.det(m[:2, 2:])),
        float(np.linalg.det(m)),
    )


@dataclass(frozen=True)
class StandardForm:
    """Diagonal-block reduced form diag(a,a), diag(b,b), diag(c1,c2).

    Sign convention: c1 >= |c2| (the reduction below produces it
    automatically; the form is otherwise unique only up to a joint sign
    flip of c1 and c2).
    """

    a: float
    b: float
    c1: float
    c2: float

    def __post_init__(self):
        if self.a < 1.0 - PHYSICALITY_TOL or self.b < 1.0 - PHYSICALITY_TOL:
            raise UnphysicalState(
                f"standard-form marginals must satisfy a, b >= 1 (got a={self.a}, b={self.b})"
            )
        if self.c1 < abs(self.c2) - 1e-9:
            raise ValueError(
                f"sign convention c1 >= |c2| violated (c1={self.c1}, c2={self.c2})"
            )
        self.cm()  # physicality of the embedded matrix

    def cm(self) -> CovMatrix:
        """Embed as a validated 4x4 covariance matrix."""
        m = np.diag([self.a, self.a, self.b, self.b]).astype(float)
        m[0, 2] = m[2, 0] = self.c1
        m[1, 3] = m[3, 1] = self.c2
        return CovMatrix(m)


def _williamson_reducer_2x2(block: np.ndarray) -> np.ndarray:
    """Symplectic S with S block S^T = sqrt(det block) * I, for a 2x2 SPD block."""
    lam, vecs = np.linalg.eigh(block)
    if np.linalg.det(vecs) < 0.0:
        vecs = vecs.copy()
        vecs[:, 0] = -vecs[:, 0]
    nu = float(np.sqrt(lam[0] * lam[1]))
    return np.diag(np.sqrt(nu / lam)) @ vecs.T


def to_standard_form(cm: CovMatrix) -> tuple[StandardForm, LocalSymplectic]:
    """Reduce a covariance matrix to standard form by local symplectics.

    Route: (i) bring each marginal block to sqrt(det) * I with a
    rotation-then-squeeze (the 2x2 special case of normal-mode
    decomposition); (ii) diagonalize the transformed correlation block
    with a pair of proper rotations obtained from its singular vectors
    (rotations leave the isotropic marginals untouched); the
    determinant-corrected SVD ordering then yields c1 >= |c2| >= 0 with
    sign(c2) = sign(det C). A vanishing correlation block degenerates
    gracefully to c1 = c2 = 0 with identity rotations.

    Returns the standard form together with the local symplectic S such
    that ``apply_local(cm, S)`` equals the embedded standard form.
    """
    m = cm.matrix
    red_a = _williamson_reducer_2x2(m[:2, :2])
    red_b = _williamson_reducer_2x2(m[2:, 2:])
    c_mid = red_a @ m[:2, 2:] @ red_b.T
    u, sv, vt = np.linalg.svd(c_mid)
    v = vt.T
    u = u @ np.diag([1.0, np.linalg.det(u)])
    v = v @ np.diag([1.0, np.linalg.det(v)])
    rot_a, rot_b = u.T, v.T
    s = LocalSymplectic(rot_a @ red_a, rot_b @ red_b)
    reduced = apply_local(cm, s).matrix
    sf = StandardForm(
        a=float(np.sqrt(np.linalg.det(m[:2, :2]))),
        b=float(np.sqrt(np.linalg.det(m[2:, 2:]))),
        c1=float(reduced[0, 2]),
        c2=float(reduced[1, 3]),
    )
    return sf, s


def symplectic_eigenvalues(cm) -> tuple[float, float]:
    """Symplectic spectrum: moduli of the eigenvalues of i*Omega*sigma.

    Accepts a :class:`CovMatrix` or a raw symmetric positive-definite
    4x4 array, and returns the two doubly-degenerate moduli sorted
    descending. Both are >= 1 exactly when the matrix is physical.
    """
    m = _as_matrix(cm)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.T).max()) > SYMMETRY_TOL * scale:
        raise NotPositiveDefinite("matrix is not symmetric")
    if float(np.linalg.eigvalsh(m)[0]) <= 0.0:
        raise NotPositiveDefinite("matrix is not positive definite")
    mods = np.sort(np.abs(np.linalg.eigvals(OMEGA @ m)))
    nu_small = 0.5 * (mods[0] + mods[1])
    nu_large = 0.5 * (mods[2] + mods[3])
    return float(nu_large), float(nu_small)


def swap_parties(cm: CovMatrix) -> CovMatrix:
    """Relabel the two modes (A <-> B); the permutation is symplectic."""
    perm = [2, 3, 0, 1]
    return CovMatrix(cm.matrix[np.ix_(perm, perm)])


# --- JSON schema for covariance-matrix files -------------------------------

CM_CONVENTION = "vacuum-unit"


def cm_from_json_dict(data: dict) -> tuple[CovMatrix, np.ndarray]:
    """Parse ``{"cm": [[...]], "mean": [...], "convention": ...}``.

    ``mean`` defaults to zeros; a ``convention`` field, when present,
    must equal ``"vacuum-unit"``.
    """
    if not isinstance(data, dict) or "cm" not in data:
        raise ValueError("expected an object with a 'cm' field")
    convention = data.get("convention", CM_CONVENTION)
    if convention != CM_CONVENTION:
        raise ValueError(f"unsupported convention {convention!r}; expected {CM_CONVENTION!r}")
    cm = validate_bona_fide(np.asarray(data["cm"], dtype=float))
    mean = np.asarray(data.get("mean", np.zeros(4)), dtype=float)
    if mean.shape != (4,):
        raise ValueError(f"mean must have 4 entries, got shape {mean.shape}")
    return cm, mean


def cm_to_json_dict(cm: CovMatrix, mean=None) -> dict:
    out = {"cm": cm.matrix.tolist(), "convention": CM_CONVENTION}
    if mean is not None:
        out["mean"] = np.asarray(mean, dtype=float).tolist()
    return out
