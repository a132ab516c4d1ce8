"""Floquet analysis of periodic (possibly non-Hermitian) Hamiltonians.

U(t) = Z(t) exp(-i M t / hbar) with Z periodic, M = (i hbar / tau) log U(tau).
Quasi-energies are folded into the strip (-pi hbar/tau, pi hbar/tau].
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import TimeDependentModel, evolution_operator
from .errors import DefectiveMonodromy, GridMismatch
from .linalg_core import DEFAULT_TOL, ToleranceConfig, condition_number, eig_general, expm
from .symmetry import PTClassification, classify_pt

STABLE = "Stable"
UNSTABLE = "Unstable"


@dataclass
class FloquetResult:
    period: float
    monodromy: np.ndarray
    generator: np.ndarray
    quasienergies: np.ndarray
    Z_samples: np.ndarray = field(default_factory=lambda: np.empty(0))
    sample_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    stability: str = STABLE
    hbar: float = 1.0

    def propagator(self, k: int) -> np.ndarray:
        """Reconstructed U(t_k) = Z(t_k) exp(-i M t_k / hbar)."""
        t = self.sample_times[k]
        return self.Z_samples[k] @ expm(self.generator, -1j * t / self.hbar)


def fold(values, period: float, hbar: float = 1.0) -> np.ndarray:
    """Map real parts into (-pi hbar/tau, pi hbar/tau]."""
    values = np.asarray(values, dtype=complex)
    w = 2 * np.pi * hbar / period
    re = values.real - w * np.ceil((values.real - 0.5 * w) / w)
    return re + 1j * values.imag


def monodromy(model: TimeDependentModel, period: float, steps: int, hbar: float = 1.0,
              t0: float = 0.0) -> np.ndarray:
    if period <= 0:
        raise GridMismatch("period must be positive")
    _, U = evolution_operator(model, t0, t0 + period, steps, hbar, stride=steps)
    return U[-1]


def classify_stability(quasienergies, tol: float = 1e-8) -> str:
    """Stable iff max |Im eps| <= tol * (1 + max |eps|)."""
    q = np.asarray(quasienergies)
    return STABLE if np.max(np.abs(q.imag)) <= tol * (1 + np.max(np.abs(q))) else UNSTABLE


def floquet_decompose(model: TimeDependentModel, period: float, steps: int, hbar: float = 1.0,
                      cfg: ToleranceConfig = DEFAULT_TOL, n_samples: int = 0,
                      stability_tol: float = 1e-8) -> FloquetResult:
    """Monodromy, Floquet generator, folded quasi-energies and optional Z(t) samples.

    ``n_samples`` > 0 stores Z(t) at that many evenly spaced grid times in
    [0, tau] (``steps`` must be a multiple of ``n_samples``).
    """
    if n_samples and steps % n_samples:
        raise GridMismatch("steps must be a multiple of n_samples")
    stride = steps // n_samples if n_samples else steps
    times, U = evolution_operator(model, 0.0, period, steps, hbar, stride=stride)
    Ut = U[-1]
    spec = eig_general(Ut, cfg)
    if condition_number(spec) > cfg.max_condition:
        raise DefectiveMonodromy(f"eigenvector condition number {condition_number(spec):.3e}")
    eps = fold(1j * hbar / period * np.log(spec.eigenvalues), period, hbar)
    R, L = spec.right_vectors, spec.left_vectors
    M = (R * eps) @ L.conj().T
    result = FloquetResult(period, Ut, M, eps, stability=classify_stability(eps, stability_tol), hbar=hbar)
    if n_samples:
        result.sample_times = times
        result.Z_samples = np.array([Uk @ expm(M, 1j * t / hbar) for t, Uk in zip(times, U)])
    return result


def unfold_to(quasienergies, targets, period: float, hbar: float = 1.0):
    """Match each target to the nearest quasi-energy modulo hbar*omega.

    Returns arrays (index, k, value) where value = eps[index] + k hbar omega.
    """
    w = 2 * np.pi * hbar / period
    q = np.asarray(quasienergies)
    idx, ks, vals = [], [], []
    for E in np.atleast_1d(targets):
        k = np.round((E.real - q.real) / w)
        cand = q + k * w
        j = int(np.argmin(np.abs(cand - E)))
        idx.append(j)
        ks.append(int(k[j]))
        vals.append(cand[j])
    return np.array(idx), np.array(ks), np.array(vals)


def classify_m_pt(M, P, cfg: ToleranceConfig = DEFAULT_TOL) -> PTClassification:
    """PT phase of the Floquet generator."""
    return classify_pt(M, P, cfg)
