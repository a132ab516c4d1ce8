"""Reference quantities for Hermitian Hamiltonians.

Sudden-limit error estimate, discrete Berry phase, Berry curvature,
adiabaticity measure and Lewis-Riesenfeld phases.  These are the Hermitian
baselines the non-Hermitian machinery is compared with.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from .dynamics import TimeDependentModel, time_derivative
from .errors import GapClosure, GridMismatch, NotHermitian, NotInvariant
from .linalg_core import as_operator, fro, is_hermitian


@dataclass
class ParameterPath:
    """Samples of a parameter-dependent Hamiltonian along a path.

    ``samples`` has shape (K, n, n).  For a closed path the last sample is
    not repeated; the loop closes from samples[-1] back to samples[0].
    """

    samples: np.ndarray
    closed: bool = True

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 3 or self.samples.shape[1] != self.samples.shape[2]:
            raise GridMismatch("samples must have shape (K, n, n)")
        for H in self.samples:
            if not is_hermitian(H, 1e-10):
                raise NotHermitian("path sample is not Hermitian")


@dataclass
class BerryResult:
    phases: np.ndarray
    band_energies: np.ndarray
    min_gap: float


def _bands(samples):
    E, V = np.linalg.eigh(samples)
    return E, V


def _min_gap(E) -> float:
    if E.shape[1] < 2:
        return np.inf
    return float(np.min(np.diff(E, axis=1)))


def align_phases(V: np.ndarray) -> np.ndarray:
    """Fix eigenvector phases along a sequence by maximal overlap with the predecessor.

    V has shape (K, n, bands) with eigenvectors as columns.
    """
    V = V.copy()
    for k in range(1, len(V)):
        ov = np.einsum("ib,ib->b", V[k - 1].conj(), V[k])
        V[k] *= np.exp(-1j * np.angle(ov))
    return V


def sudden_error_estimate(model: TimeDependentModel, T: float, psi0, hbar: float = 1.0,
                          nodes: int = 129) -> float:
    """(T^2/hbar^2) Var_psi0(Hbar) with Hbar the average of H(s) over s in [0, 1].

    The model is read in reduced time s = t/T.
    """
    if nodes % 2 == 0 or nodes < 3:
        raise GridMismatch("Simpson averaging needs an odd number of nodes")
    s = np.linspace(0.0, 1.0, nodes)
    Hs = np.array([model.hamiltonian(si) for si in s])
    Hbar = simpson(Hs, x=s, axis=0)
    psi = np.asarray(psi0, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    m1 = psi.conj() @ Hbar @ psi
    m2 = psi.conj() @ Hbar @ Hbar @ psi
    return float((T / hbar) ** 2 * np.real(m2 - m1 * m1.conjugate()))


def discrete_berry_phase(path: ParameterPath, gap_tol: float = 1e-8) -> BerryResult:
    """gamma_n = -Im log prod_k <phi_n(k)|phi_n(k+1)> around a closed path."""
    if not path.closed:
        raise GridMismatch("Berry phase needs a closed path")
    E, V = _bands(path.samples)
    gap = _min_gap(E)
    if gap < gap_tol:
        raise GapClosure(f"minimum gap {gap:.3e} along the path")
    return BerryResult(berry_phase_from_vectors(V), E, gap)


def berry_phase_from_vectors(V) -> np.ndarray:
    """Loop phase per band from eigenvectors V of shape (K, n, bands), any gauge."""
    V = np.asarray(V, dtype=complex)
    nxt = np.roll(V, -1, axis=0)
    ov = np.einsum("kib,kib->kb", V.conj(), nxt)
    return -np.angle(np.prod(ov / np.abs(ov), axis=0))


def berry_curvature_sum(H, dH, gap_tol: float = 1e-8) -> np.ndarray:
    """Berry curvature vector of every band at one parameter point.

    ``dH`` is the sequence (dH/dR_x, dH/dR_y, dH/dR_z).  Returns shape
    (bands, 3):  V_i = -Im sum_{j != i} <i|dH|j> x <j|dH|i> / (E_i - E_j)^2.
    """
    H = as_operator(H)
    E, U = np.linalg.eigh(H)
    if len(E) > 1 and np.min(np.diff(E)) < gap_tol:
        raise GapClosure("degenerate bands")
    G = np.array([U.conj().T @ as_operator(d) @ U for d in dH])  # (3, n, n)
    n = len(E)
    out = np.zeros((n, 3))
    for i in range(n):
        acc = np.zeros(3, dtype=complex)
        for j in range(n):
            if j == i:
                continue
            a = G[:, i, j]
            b = G[:, j, i]
            acc += np.cross(a, b) / (E[i] - E[j]) ** 2
        out[i] = -acc.imag
    return out


def adiabatic_metric(path: ParameterPath, ds: float, hbar: float = 1.0, gap_tol: float = 1e-8) -> float:
    """hbar sup_{s, i != j} |<phi_i|d phi_j/ds| / (E_i - E_j)| on a uniform grid of spacing ds."""
    E, V = _bands(path.samples)
    gap = _min_gap(E)
    if gap < gap_tol:
        raise GapClosure(f"minimum gap {gap:.3e} along the path")
    V = align_phases(V)
    times = np.arange(len(V)) * ds
    dV = time_derivative(V, times)
    worst = 0.0
    for k in range(len(V)):
        A = V[k].conj().T @ dV[k]
        dE = E[k][:, None] - E[k][None, :]
        np.fill_diagonal(dE, np.inf)
        worst = max(worst, float(np.max(np.abs(A / dE))))
    return hbar * worst


def lewis_riesenfeld_phase(invariant: Callable[[float], np.ndarray], hamiltonian: Callable[[float], np.ndarray],
                           t0: float, t1: float, steps: int, band: int, hbar: float = 1.0,
                           check_tol: float = 1e-6):
    """Phase alpha(t) = (1/hbar) int <phi|(i hbar d/dt - H)|phi> dt for one invariant eigenvector.

    Returns ``(times, alpha, phi)`` with phi the continuity-aligned
    eigenvectors.  Raises NotInvariant when dI/dt + (i/hbar)[H, I] is not
    small relative to ||I||.
    """
    times = np.linspace(t0, t1, steps + 1)
    I = np.array([as_operator(invariant(t)) for t in times])
    H = np.array([as_operator(hamiltonian(t)) for t in times])
    dI = time_derivative(I, times)
    scale = max(fro(Ik) for Ik in I)
    worst = max(fro(dI[k] + 1j / hbar * (H[k] @ I[k] - I[k] @ H[k])) for k in range(len(times)))
    if worst > check_tol * (1 + scale):
        raise NotInvariant(f"invariant residual {worst:.3e}")
    _, V = np.linalg.eigh(I)
    phi = align_phases(V)[:, :, band]
    dphi = time_derivative(phi, times)
    integrand = np.einsum("ki,ki->k", phi.conj(), 1j * hbar * dphi - np.einsum("kij,kj->ki", H, phi)) / hbar
    alpha = cumulative_trapezoid(integrand.real, times, initial=0.0)
    return times, alpha, phi
