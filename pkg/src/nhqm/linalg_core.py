"""Dense linear algebra used by every other module.

Eigen-decomposition of general complex matrices with dual (left) vectors,
Hermitian square roots and a guarded matrix exponential.  LAPACK does the
heavy lifting through scipy; this module adds the ordering, normalisation
and failure checks the rest of the toolkit relies on.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    NonConvergence,
    NotHermitian,
    NotPositiveDefinite,
    Overflow,
    Singular,
)


@dataclass(frozen=True)
class ToleranceConfig:
    residual_tol: float = 1e-10
    degeneracy_gap: float = 1e-8
    hbar: float = 1.0
    # looser bound for symmetry/metric identities that accumulate rounding
    symmetry_tol: float = 1e-8
    # eigenvector matrices with a larger condition number count as defective
    max_condition: float = 1e12


DEFAULT_TOL = ToleranceConfig()


@dataclass
class BiorthogonalSpectrum:
    """Eigenvalues with right vectors (columns) and dual left vectors (columns).

    ``left_vectors[:, m].conj() @ right_vectors[:, n] == delta_mn``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    degeneracy_flags: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        R = self.right_vectors
        return (R * self.eigenvalues) @ self.left_vectors.conj().T


def as_operator(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def fro(A) -> float:
    return float(np.linalg.norm(A))


def is_hermitian(A, tol=1e-12) -> bool:
    A = np.asarray(A)
    return fro(A - A.conj().T) <= tol * max(1.0, fro(A))


def _sort_order(values: np.ndarray) -> np.ndarray:
    # lexicographic on (Re, Im); Re is rounded so conjugate pairs with
    # rounding noise in the real part still order by Im
    re = np.round(values.real, 12) + 0.0
    return np.lexsort((values.imag, re))


def _degeneracy_flags(values: np.ndarray, gap: float) -> np.ndarray:
    d = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(d, np.inf)
    return (d < gap).any(axis=1) if len(values) > 1 else np.zeros(len(values), bool)


def _dual_vectors(R: np.ndarray) -> np.ndarray:
    return inv(R).conj().T


def eig_general(A, cfg: ToleranceConfig = DEFAULT_TOL) -> BiorthogonalSpectrum:
    """Eigen-decomposition of a square complex matrix.

    Eigenvalues are sorted by (Re, Im).  Right vectors are scaled to unit
    Euclidean norm and the left vectors are the rows of the inverse of the
    right-vector matrix, so the pair is biorthonormal by construction.
    """
    A = as_operator(A)
    if not np.all(np.isfinite(A)):
        raise NonConvergence("matrix has non-finite entries")
    try:
        w, R = sla.eig(A)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise NonConvergence(str(exc)) from exc
    order = _sort_order(w)
    w, R = w[order], R[:, order]
    R = R / np.linalg.norm(R, axis=0)
    L = _dual_vectors(R)
    scale = max(fro(A), np.finfo(float).tiny)
    resid = np.linalg.norm(A @ R - R * w, axis=0).max() if len(w) else 0.0
    if resid > cfg.residual_tol * scale:
        raise NonConvergence(f"eigen-residual {resid:.3e} exceeds tolerance")
    return BiorthogonalSpectrum(w, R, L, _degeneracy_flags(w, cfg.degeneracy_gap))


def biorthonormalize(spec: BiorthogonalSpectrum, cfg: ToleranceConfig = DEFAULT_TOL) -> BiorthogonalSpectrum:
    """Re-impose unit-norm right vectors and exact duality.

    Raises DegenerateSpectrum when two eigenvalues are closer than the
    configured gap: the dual basis is then not unique.
    """
    if np.any(spec.degeneracy_flags):
        raise DegenerateSpectrum("eigenvalues closer than the degeneracy gap")
    R = spec.right_vectors / np.linalg.norm(spec.right_vectors, axis=0)
    L = _dual_vectors(R)
    return BiorthogonalSpectrum(spec.eigenvalues.copy(), R, L, spec.degeneracy_flags.copy())


def condition_number(spec: BiorthogonalSpectrum) -> float:
    return float(np.linalg.cond(spec.right_vectors))


def hermitian_sqrt(A, signs=None, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a Hermitian positive-definite matrix.

    By default the positive root.  ``signs`` (one +1/-1 per eigenvalue of A,
    ascending order) selects one of the other Hermitian roots instead.
    """
    A = as_operator(A)
    if not is_hermitian(A, cfg.symmetry_tol):
        raise NotHermitian("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    w, Q = np.linalg.eigh(A)
    if w[0] <= 0 or w[0] <= cfg.degeneracy_gap * max(1.0, abs(w[-1])):
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e}")
    root = np.sqrt(w)
    if signs is not None:
        signs = np.asarray(signs, dtype=float)
        if signs.shape != root.shape or not np.all(np.abs(signs) == 1):
            raise DimensionMismatch("signs must be +1/-1, one per eigenvalue")
        root = root * signs
    S = (Q * root) @ Q.conj().T
    return 0.5 * (S + S.conj().T)


def sqrt_posdef(A, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return hermitian_sqrt(A, None, cfg)


def expm(A, scale: complex = 1.0, max_norm: float = 700.0) -> np.ndarray:
    """exp(scale * A).  Raises Overflow when ||scale*A|| exceeds ``max_norm``."""
    A = as_operator(A)
    B = scale * A
    nrm = np.linalg.norm(B, 1)
    if not np.isfinite(nrm) or nrm > max_norm:
        raise Overflow(f"||scale*A|| = {nrm:.3e} exceeds {max_norm}")
    return sla.expm(B)


def inv(A) -> np.ndarray:
    """Inverse via LU; callers that care about conditioning check it themselves."""
    A = as_operator(A)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            warnings.simplefilter("ignore", RuntimeWarning)
            out = sla.solve(A, np.eye(A.shape[0], dtype=complex))
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise Singular("matrix is singular") from exc
    if not np.all(np.isfinite(out)):
        raise Singular("matrix is singular")
    return out
