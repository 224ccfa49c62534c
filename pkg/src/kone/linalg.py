"""Dense linear-algebra kernels: spectra, Perron pairs, and the alignment basis change."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "PerronData",
    "NonPositivePairing",
    "leading_eigenpair",
    "mean_matrix",
    "build_alignment",
    "orthonormal_completion",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every decision routine.

    eig_gap        relative tolerance for treating eigenvalue moduli as coincident
    lp_feas        LP feasibility tolerance, relative to the tested vector
    member_margin  perturbation size for interior-membership tests
    sign_eps       inner products below -sign_eps count as genuinely negative
    dedup_angle    rays closer than this angle are merged
    """

    eig_gap: float = 1e-9
    lp_feas: float = 1e-9
    member_margin: float = 1e-8
    sign_eps: float = 1e-10
    dedup_angle: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("eig_gap", "lp_feas", "member_margin", "sign_eps", "dedup_angle"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_master(cls, tol: float) -> "Tolerances":
        """Rescale all thresholds so lp_feas == tol, keeping the default ratios."""
        return cls(
            eig_gap=tol,
            lp_feas=tol,
            member_margin=10.0 * tol,
            sign_eps=0.1 * tol,
            dedup_angle=10.0 * tol,
        )


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class PerronData:
    """Leading eigenvalue of a matrix with its (provisionally signed) unit eigenvector.

    ``simple`` is True only when the leading eigenvalue is the unique point of
    the spectrum at maximal modulus and its eigenspace is one-dimensional.
    ``geometric_simple`` drops the modulus-uniqueness requirement: the
    eigenvector is unique up to scaling, but other eigenvalues may share the
    modulus (e.g. a negative or complex partner on the spectral circle).
    """

    eigenvalue: float
    right_vector: np.ndarray
    simple: bool
    spectral_radius: float
    geometric_simple: bool = True


class NonPositivePairing(ValueError):
    """Left/right leading eigenvectors pair non-positively; no alignment exists."""


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def _geometric_multiplicity(A: np.ndarray, lam: float) -> int:
    # singular values of (A - lam I) below 1e-9 * ||A|| count as zero
    d = A.shape[0]
    s = np.linalg.svd(A - lam * np.eye(d), compute_uv=False)
    scale = max(float(np.linalg.norm(A, 2)), 1e-300)
    return d - int(np.count_nonzero(s > 1e-9 * scale))


def leading_eigenpair(A, tol: Tolerances = DEFAULT_TOL) -> PerronData | None:
    """Spectral radius, leading eigenvalue and eigenvector of a real square matrix.

    Returns None when no real nonnegative eigenvalue attains the spectral
    radius within the relative gap ``tol.eig_gap`` (such a matrix cannot
    belong to a family with a common invariant cone).  The eigenvector sign
    is provisional; callers orient it against dual data.
    """
    A = _as_square(A)
    w, vecs = np.linalg.eig(A)
    moduli = np.abs(w)
    rho = float(moduli.max())
    band = tol.eig_gap * rho
    top = moduli >= rho - band
    realish = np.abs(w.imag) <= band
    nonneg = w.real >= -band
    cand = top & realish & nonneg
    if not cand.any():
        return None
    idx_c = np.flatnonzero(cand)
    idx = int(idx_c[np.argmax(w.real[idx_c])])
    lam = max(float(w.real[idx]), 0.0)
    v = vecs[:, idx]
    v = v.real if np.linalg.norm(v.real) >= np.linalg.norm(v.imag) else v.imag
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return None
    v = v / nv
    geom_simple = _geometric_multiplicity(A, lam) == 1
    simple = int(np.count_nonzero(top)) == 1 and geom_simple
    return PerronData(
        eigenvalue=lam,
        right_vector=v,
        simple=simple,
        spectral_radius=rho,
        geometric_simple=geom_simple,
    )


def mean_matrix(matrices) -> np.ndarray:
    """Entrywise arithmetic mean of a nonempty sequence of equally sized matrices."""
    mats = [_as_square(M) for M in matrices]
    if not mats:
        raise ValueError("need at least one matrix")
    return np.mean(np.stack(mats), axis=0)


def build_alignment(v, v_star, kappa: float = 1.0, tol: Tolerances = DEFAULT_TOL):
    """Symmetric positive-definite change of basis sending the left leading
    eigenvector onto the right one.

    Builds P = v v^T/(v*,v) + kappa (I - v* v*^T/(v*,v*)), factors it as
    P = V V^T by Cholesky and returns (P, V, c) where c = V^{-1} v normalized.
    After this basis change the transformed mean matrix has coinciding unit
    left and right leading eigenvectors, both equal to c.

    Raises NonPositivePairing when (v*, v) <= sign_eps: for an irreducible
    family this already rules out a common invariant cone.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    pairing = float(v_star @ v)
    if pairing <= tol.sign_eps:
        raise NonPositivePairing(
            f"(v*, v) = {pairing:.3e} is not positive; cannot align eigenvectors"
        )
    v = v / np.linalg.norm(v)
    v_star = v_star / float(v_star @ v)
    d = v.size
    P = np.outer(v, v) / float(v_star @ v) + kappa * (
        np.eye(d) - np.outer(v_star, v_star) / float(v_star @ v_star)
    )
    V = np.linalg.cholesky(P)
    c = np.linalg.solve(V, v)
    c = c / np.linalg.norm(c)
    return P, V, c


def orthonormal_completion(c) -> np.ndarray:
    """Orthonormal matrix whose first column is the given unit vector.

    Computed from a single Householder reflection (sign chosen for stability),
    so the completion is deterministic in c.
    """
    c = np.asarray(c, dtype=float)
    nc = float(np.linalg.norm(c))
    if abs(nc - 1.0) > 1e-9:
        raise ValueError("center vector must have unit norm")
    c = c / nc
    d = c.size
    e1 = np.zeros(d)
    e1[0] = 1.0
    if c[0] >= 0.0:
        u = c + e1  # reflection maps e1 -> -c; negate to land on c
        H = np.eye(d) - 2.0 * np.outer(u, u) / float(u @ u)
        return -H
    w = c - e1
    return np.eye(d) - 2.0 * np.outer(w, w) / float(w @ w)
