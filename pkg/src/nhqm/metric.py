"""Positive metric, Dyson map and the Hermitian equivalent of a quasi-Hermitian H."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComplexSpectrum, DimensionMismatch, MetricMismatch
from .linalg_core import (
    DEFAULT_TOL,
    BiorthogonalSpectrum,
    ToleranceConfig,
    as_operator,
    biorthonormalize,
    fro,
    hermitian_sqrt,
    inv,
)


@dataclass
class MetricPair:
    eta: np.ndarray
    eta_inv: np.ndarray
    rho: np.ndarray
    rho_inv: np.ndarray


@dataclass
class HermitianEquivalent:
    h: np.ndarray
    transform_residual: float


def _check_real(spec: BiorthogonalSpectrum, cfg: ToleranceConfig):
    E = spec.eigenvalues
    bad = np.abs(E.imag) > cfg.residual_tol * (1 + np.abs(E))
    if np.any(bad):
        raise ComplexSpectrum(f"eigenvalue {E[np.argmax(bad)]} is not real")


def metric_pair(eta, rho_signs=None, cfg: ToleranceConfig = DEFAULT_TOL) -> MetricPair:
    """Complete a metric into a MetricPair; rho is its Hermitian square root.

    ``rho_signs`` picks a non-positive Hermitian root (see ``hermitian_sqrt``).
    """
    eta = as_operator(eta)
    eta = 0.5 * (eta + eta.conj().T)
    rho = hermitian_sqrt(eta, rho_signs, cfg)
    eta_inv = inv(eta)
    return MetricPair(eta, 0.5 * (eta_inv + eta_inv.conj().T), rho, inv(rho))


def metric_from_spectrum(spec: BiorthogonalSpectrum, cfg: ToleranceConfig = DEFAULT_TOL, *,
                         weights=None, unit_determinant: bool = False, rho_signs=None) -> MetricPair:
    """eta = sum_n c_n |chi_n><chi_n| for a real, non-degenerate spectrum.

    Right vectors have unit norm and c_n = 1 unless ``weights`` is given.
    ``unit_determinant`` rescales eta so that det(eta) = 1.
    """
    spec = biorthonormalize(spec, cfg)
    _check_real(spec, cfg)
    c = np.ones(spec.dim) if weights is None else np.asarray(weights, dtype=float)
    if c.shape != (spec.dim,) or np.any(c <= 0):
        raise DimensionMismatch("weights must be positive, one per eigenvalue")
    L, R = spec.left_vectors, spec.right_vectors
    eta = (L * c) @ L.conj().T
    if unit_determinant:
        det = np.linalg.det(eta).real
        eta = eta / det ** (1.0 / spec.dim)
    return metric_pair(eta, rho_signs, cfg)


def pseudo_hermiticity_residual(H, eta) -> float:
    """||H^+ eta - eta H|| / (||eta|| ||H||)."""
    H, eta = as_operator(H), as_operator(eta)
    den = fro(eta) * fro(H)
    return fro(H.conj().T @ eta - eta @ H) / den if den else 0.0


def hermitian_equivalent(H, mp: MetricPair, cfg: ToleranceConfig = DEFAULT_TOL) -> HermitianEquivalent:
    """h = rho H rho^-1, after checking that eta actually intertwines H."""
    H = as_operator(H)
    if mp.eta.shape != H.shape:
        raise DimensionMismatch("metric and Hamiltonian dimensions differ")
    res = pseudo_hermiticity_residual(H, mp.eta)
    if res > cfg.symmetry_tol:
        raise MetricMismatch(f"pseudo-Hermiticity residual {res:.3e}")
    h = mp.rho @ H @ mp.rho_inv
    return HermitianEquivalent(h, fro(h - h.conj().T) / max(fro(h), 1e-300))


def pseudo_inner(f, g, eta) -> complex:
    """<f|eta|g>."""
    f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
    return complex(f.conj() @ (np.asarray(eta) @ g))


def metric_from_pc(P, C) -> np.ndarray:
    """eta = P C, the metric induced by the charge operator."""
    Pm = P.matrix if hasattr(P, "matrix") else np.asarray(P)
    Cm = C.matrix if hasattr(C, "matrix") else np.asarray(C)
    return Pm @ Cm


def metric_from_dyson(rho) -> MetricPair:
    """MetricPair for an arbitrary invertible Dyson map (eta = rho^+ rho)."""
    rho = as_operator(rho)
    rho_inv = inv(rho)
    eta = rho.conj().T @ rho
    return MetricPair(0.5 * (eta + eta.conj().T), rho_inv @ rho_inv.conj().T, rho, rho_inv)
