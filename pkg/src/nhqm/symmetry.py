"""PT symmetry: residuals, phase classification, charge operator, inner products.

T acts as entry-wise complex conjugation in the computational basis, so
PT-invariance of a matrix H reads  H = P conj(H) P.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BrokenSymmetry, DimensionMismatch, NotPTInvariant
from .linalg_core import (
    DEFAULT_TOL,
    BiorthogonalSpectrum,
    ToleranceConfig,
    as_operator,
    biorthonormalize,
    eig_general,
    fro,
)

UNBROKEN = "Unbroken"
BROKEN = "Broken"


@dataclass
class ParityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        P = as_operator(self.matrix)
        n = P.shape[0]
        if fro(P @ P - np.eye(n)) > 1e-12 * n or fro(P - P.conj().T) > 1e-12 * n:
            raise DimensionMismatch("parity must be a Hermitian involution")
        self.matrix = P

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def sigma_x(cls) -> "ParityOperator":
        return cls(np.array([[0, 1], [1, 0]], dtype=complex))

    @classmethod
    def fock(cls, n: int) -> "ParityOperator":
        return cls(np.diag((-1.0) ** np.arange(n)).astype(complex))


def default_parity(dim: int) -> ParityOperator:
    """sigma_x for two-level models, (-1)^n on a truncated Fock basis otherwise."""
    return ParityOperator.sigma_x() if dim == 2 else ParityOperator.fock(dim)


@dataclass
class PTClassification:
    kind: str
    pt_residual: float
    conjugate_pairs: list = field(default_factory=list)

    @property
    def unbroken(self) -> bool:
        return self.kind == UNBROKEN


@dataclass
class ChargeOperator:
    matrix: np.ndarray
    signs: np.ndarray


def _parity_matrix(P, dim: int) -> np.ndarray:
    M = P.matrix if isinstance(P, ParityOperator) else as_operator(P)
    if M.shape[0] != dim:
        raise DimensionMismatch(f"parity has dimension {M.shape[0]}, operator {dim}")
    return M


def pt_transform(v, P) -> np.ndarray:
    """Apply PT to a vector or matrix (P conj(.) for vectors, P conj(.) P for matrices)."""
    v = np.asarray(v, dtype=complex)
    Pm = _parity_matrix(P, v.shape[0])
    return Pm @ v.conj() if v.ndim == 1 else Pm @ v.conj() @ Pm


def pt_residual(H, P) -> float:
    H = as_operator(H)
    nrm = fro(H)
    if nrm == 0:
        return 0.0
    return fro(H - pt_transform(H, P)) / nrm


def _pair_greedy(E: np.ndarray) -> list:
    # match each eigenvalue to the closest conjugate among the unused ones
    unused = list(range(len(E)))
    pairs = []
    while unused:
        m = unused.pop(0)
        if not unused:
            pairs.append((m, m))
            break
        cand = unused + [m]
        d = [abs(E[m] - np.conj(E[n])) for n in cand]
        n = cand[int(np.argmin(d))]
        if n != m:
            unused.remove(n)
        pairs.append((m, n))
    return pairs


def _vectors_pt_invariant(spec: BiorthogonalSpectrum, Pm: np.ndarray, tol: float) -> bool:
    R = spec.right_vectors
    E = spec.eigenvalues
    done = np.zeros(len(E), bool)
    for n in range(len(E)):
        if done[n]:
            continue
        cluster = [n] if not spec.degeneracy_flags[n] else list(
            np.flatnonzero(np.abs(E - E[n]) < 10 * max(tol, 1e-8)))
        done[cluster] = True
        B = R[:, cluster]
        Q, _ = np.linalg.qr(B)
        v = Pm @ B.conj()
        # PT must map the eigen-space into itself
        if np.linalg.norm(v - Q @ (Q.conj().T @ v)) > tol * np.linalg.norm(v):
            return False
    return True


def classify_pt(H, P, cfg: ToleranceConfig = DEFAULT_TOL) -> PTClassification:
    """Decide whether PT symmetry of H is unbroken (real spectrum, PT-invariant eigenvectors)."""
    H = as_operator(H)
    Pm = _parity_matrix(P, H.shape[0])
    res = pt_residual(H, Pm)
    if res > cfg.symmetry_tol:
        raise NotPTInvariant(f"PT residual {res:.3e} exceeds {cfg.symmetry_tol:.1e}")
    spec = eig_general(H, cfg)
    E = spec.eigenvalues
    real = np.all(np.abs(E.imag) <= cfg.residual_tol * (1 + np.abs(E)))
    pairs = _pair_greedy(E)
    if real and _vectors_pt_invariant(spec, Pm, cfg.symmetry_tol):
        return PTClassification(UNBROKEN, res, pairs)
    return PTClassification(BROKEN, res, pairs)


def pt_inner(f, g, P) -> complex:
    """(PT f)^T g."""
    f = np.asarray(f, dtype=complex)
    return complex(pt_transform(f, P) @ np.asarray(g, dtype=complex))


def cpt_inner(f, g, C, P) -> complex:
    """(CPT f)^T g."""
    Cm = C.matrix if isinstance(C, ChargeOperator) else np.asarray(C)
    f = np.asarray(f, dtype=complex)
    return complex((Cm @ pt_transform(f, P)) @ np.asarray(g, dtype=complex))


def pt_norms(spec: BiorthogonalSpectrum, P) -> np.ndarray:
    R = spec.right_vectors
    Pm = _parity_matrix(P, R.shape[0])
    return np.einsum("in,in->n", Pm @ R.conj(), R)


def build_charge_operator(spec: BiorthogonalSpectrum, P, cfg: ToleranceConfig = DEFAULT_TOL) -> ChargeOperator:
    """C = sum_n s_n |phi_n><chi_n| with s_n the sign of the PT-norm of phi_n."""
    spec = biorthonormalize(spec, cfg)
    norms = pt_norms(spec, P)
    if np.any(np.abs(norms.imag) > 1e-8 * np.abs(norms.real)):
        raise BrokenSymmetry("PT-norm of an eigenvector is not real")
    if np.any(np.abs(norms.real) <= cfg.symmetry_tol):
        raise BrokenSymmetry("PT-norm of an eigenvector vanishes")
    signs = np.sign(norms.real)
    R, L = spec.right_vectors, spec.left_vectors
    C = (R * signs) @ L.conj().T
    return ChargeOperator(C, signs.astype(int))


def cpt_normalized_vectors(spec: BiorthogonalSpectrum, P) -> np.ndarray:
    """Right vectors rescaled to PT-invariant phase and unit CPT norm."""
    R = spec.right_vectors
    Pm = _parity_matrix(P, R.shape[0])
    out = np.empty_like(R)
    for n in range(R.shape[1]):
        phi = R[:, n]
        c = phi.conj() @ (Pm @ phi.conj())
        # choose the phase so that P conj(phi) = phi
        phi = phi * np.exp(0.5j * np.angle(c))
        nrm = (Pm @ phi.conj()) @ phi
        out[:, n] = phi / np.sqrt(abs(nrm))
    return out
