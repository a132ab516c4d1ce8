"""Time-dependent non-Hermitian evolution.

The propagator is the exponential midpoint rule

    psi_{k+1} = exp(-i dt/hbar H(t_k + dt/2)) psi_k

which is second order in dt and exact for time-independent H.  The module
also carries the time-dependent metric relations: the generalised Dyson
generator, the residual of  H^+ eta - eta H = i hbar d(eta)/dt,  and the
transport of an initial metric along the flow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, GridMismatch, NonFinite
from .linalg_core import as_operator, expm, fro, inv


@dataclass
class TimeDependentModel:
    """H(t) = sum_k coeffs[k](t) * basis_ops[k]."""

    basis_ops: Sequence[np.ndarray]
    coeffs: Sequence[Callable[[float], complex]]
    dim: int = 0

    def __post_init__(self):
        self.basis_ops = [as_operator(B) for B in self.basis_ops]
        if len(self.basis_ops) != len(self.coeffs):
            raise DimensionMismatch("one coefficient function per basis operator")
        shapes = {B.shape for B in self.basis_ops}
        if len(shapes) != 1:
            raise DimensionMismatch("basis operators have different shapes")
        self.dim = self.basis_ops[0].shape[0]

    @classmethod
    def constant(cls, H) -> "TimeDependentModel":
        return cls([as_operator(H)], [lambda t: 1.0])

    def hamiltonian(self, t: float) -> np.ndarray:
        H = np.zeros((self.dim, self.dim), dtype=complex)
        for c, B in zip(self.coeffs, self.basis_ops):
            H += complex(c(t)) * B
        return H


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    norms_eta: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class GeneratorReport:
    h_gen: np.ndarray
    fring_residual: np.ndarray
    mostafazadeh_term: np.ndarray


def _grid(t0, t1, steps):
    if steps < 1:
        raise GridMismatch("steps must be positive")
    return np.linspace(t0, t1, steps + 1)


def _step(model, t, dt, hbar):
    return expm(model.hamiltonian(t + 0.5 * dt), -1j * dt / hbar)


def integrate_schrodinger(model: TimeDependentModel, psi0, t0: float, t1: float, steps: int,
                          hbar: float = 1.0, eta=None) -> Trajectory:
    """Propagate psi0 over [t0, t1].  ``eta`` (matrix or callable of t) adds <psi|eta|psi>."""
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (model.dim,):
        raise DimensionMismatch(f"state has shape {psi.shape}, model dimension {model.dim}")
    times = _grid(t0, t1, steps)
    dt = (t1 - t0) / steps
    states = np.empty((steps + 1, model.dim), dtype=complex)
    states[0] = psi
    for k in range(steps):
        with np.errstate(over="ignore", invalid="ignore"):
            psi = _step(model, times[k], dt, hbar) @ psi
        if not np.all(np.isfinite(psi)):
            raise NonFinite("state became non-finite", index=k + 1)
        states[k + 1] = psi
    norms = np.empty(0)
    if eta is not None:
        get = eta if callable(eta) else (lambda t, e=np.asarray(eta): e)
        norms = np.array([np.real(s.conj() @ get(t) @ s) for t, s in zip(times, states)])
    return Trajectory(times, states, norms)


def evolution_operator(model: TimeDependentModel, t0: float, t1: float, steps: int,
                       hbar: float = 1.0, stride: int = 1):
    """Propagator U(t, t0) on the uniform grid.

    Returns ``(times, U)`` where ``U[j]`` is the propagator at ``times[j]``;
    every ``stride``-th grid point is kept (the final one always is).
    """
    times = _grid(t0, t1, steps)
    dt = (t1 - t0) / steps
    U = np.eye(model.dim, dtype=complex)
    keep = [0]
    out = [U.copy()]
    for k in range(steps):
        with np.errstate(over="ignore", invalid="ignore"):
            U = _step(model, times[k], dt, hbar) @ U
        if not np.all(np.isfinite(U)):
            raise NonFinite("propagator became non-finite", index=k + 1)
        if (k + 1) % stride == 0 or k + 1 == steps:
            keep.append(k + 1)
            out.append(U.copy())
    return times[keep], np.array(out)


def time_derivative(samples, times) -> np.ndarray:
    """Centred differences inside, second-order one-sided stencils at the ends."""
    samples = np.asarray(samples)
    times = np.asarray(times, dtype=float)
    if len(samples) != len(times):
        raise GridMismatch("samples and times differ in length")
    if len(times) < 3:
        raise GridMismatch("at least three samples are needed")
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise GridMismatch("time grid must be uniform")
    return np.gradient(samples, dt[0], axis=0, edge_order=2)


def dyson_generator(H, rho, rho_dot, hbar: float = 1.0, ordering: str = "right", rho_inv=None) -> np.ndarray:
    """Generalised Dyson generator for a time-dependent map.

    ``ordering="right"`` gives  rho H rho^-1 + i hbar rho_dot rho^-1  (the
    Hermitian Hamiltonian whenever rho maps solutions of H to solutions of
    a Hermitian problem).  ``ordering="left"`` gives
    rho H rho^-1 - i hbar rho^-1 rho_dot, kept as a diagnostic.
    """
    rho_inv = inv(rho) if rho_inv is None else rho_inv
    base = rho @ as_operator(H) @ rho_inv
    if ordering == "right":
        return base + 1j * hbar * rho_dot @ rho_inv
    if ordering == "left":
        return base - 1j * hbar * rho_inv @ rho_dot
    raise ValueError(f"unknown ordering {ordering!r}")


def znojil_generator(H, rho, rho_dot, hbar: float = 1.0, rho_inv=None) -> np.ndarray:
    """H - i hbar rho^-1 rho_dot."""
    rho_inv = inv(rho) if rho_inv is None else rho_inv
    return as_operator(H) - 1j * hbar * rho_inv @ rho_dot


def fring_residual(H, eta, eta_dot, hbar: float = 1.0, block: int | None = None) -> float:
    """||H^+ eta - eta H - i hbar eta_dot|| / (||eta|| (||H|| + 1)).

    With ``block`` the residual and the norms are restricted to the leading
    block after the products are formed (for truncated infinite models).
    """
    H, eta = as_operator(H), as_operator(eta)
    r = H.conj().T @ eta - eta @ H - 1j * hbar * np.asarray(eta_dot)
    b = H.shape[0] if block is None else block
    return fro(r[:b, :b]) / (fro(eta[:b, :b]) * (fro(H[:b, :b]) + 1.0))


def mostafazadeh_term(eta, eta_inv_dot, hbar: float = 1.0) -> np.ndarray:
    """-i hbar eta d(eta^-1)/dt, the correction in H^+ = eta H eta^-1 - i hbar eta d(eta^-1)/dt."""
    return -1j * hbar * as_operator(eta) @ np.asarray(eta_inv_dot)


def generator_report(H_samples, rho_samples, times, hbar: float = 1.0) -> GeneratorReport:
    """Time-dependent metric diagnostics along sampled H(t) and rho(t)."""
    H_samples = np.asarray(H_samples, dtype=complex)
    rho_samples = np.asarray(rho_samples, dtype=complex)
    if H_samples.shape != rho_samples.shape:
        raise GridMismatch("H and rho samples differ in shape")
    rho_dot = time_derivative(rho_samples, times)
    eta = np.conj(np.transpose(rho_samples, (0, 2, 1))) @ rho_samples
    eta_dot = time_derivative(eta, times)
    eta_inv = np.array([inv(e) for e in eta])
    eta_inv_dot = time_derivative(eta_inv, times)
    h = np.array([znojil_generator(Hk, rk, rd, hbar) for Hk, rk, rd in zip(H_samples, rho_samples, rho_dot)])
    res = np.array([fring_residual(Hk, ek, ed, hbar) for Hk, ek, ed in zip(H_samples, eta, eta_dot)])
    mt = np.array([mostafazadeh_term(ek, ed, hbar) for ek, ed in zip(eta, eta_inv_dot)])
    return GeneratorReport(h, res, mt)


def eta_transport(eta0, U_samples) -> np.ndarray:
    """eta(t) = (U^+)^-1 eta0 U^-1 for each propagator sample."""
    eta0 = as_operator(eta0)
    out = []
    for U in np.asarray(U_samples):
        Ui = inv(U)
        e = Ui.conj().T @ eta0 @ Ui
        out.append(0.5 * (e + e.conj().T))
    return np.array(out)
