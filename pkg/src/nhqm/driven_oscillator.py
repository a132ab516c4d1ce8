"""Harmonic oscillator with an imaginary linear drive.

    H(t) = p^2/2m + m w0^2 x^2/2 - i lam cos(w t + phi) x

on a truncated Fock basis, with its closed-form classical orbit,
quasi-energies and Floquet modes.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .dynamics import TimeDependentModel
from .errors import DimensionMismatch, ResonanceError


@dataclass(frozen=True)
class OscillatorParams:
    m: float = 1.0
    omega0: float = 1.0
    lam: float = 0.1
    omega: float = 2.0
    phi: float = 0.0
    hbar: float = 1.0

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega

    @property
    def detuning(self) -> float:
        """omega0^2 - omega^2."""
        return self.omega0 ** 2 - self.omega ** 2

    def check_resonance(self, tol: float = 1e-12):
        if abs(self.detuning) <= tol * max(self.omega0 ** 2, self.omega ** 2):
            raise ResonanceError("drive frequency equals the natural frequency")


@dataclass(frozen=True)
class FockTruncation:
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise DimensionMismatch("truncation needs at least two levels")


def fock_operators(trunc: FockTruncation, params: OscillatorParams = OscillatorParams()):
    """(a, a^+, x, p) on the first N number states."""
    N = trunc.N
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    m, w0, hb = params.m, params.omega0, params.hbar
    x = np.sqrt(hb / (2 * m * w0)) * (a + ad)
    p = 1j * np.sqrt(hb * m * w0 / 2) * (ad - a)
    return a, ad, x, p


def build_hamiltonian(params: OscillatorParams, trunc: FockTruncation) -> TimeDependentModel:
    params.check_resonance()
    _, _, x, p = fock_operators(trunc, params)
    H0 = p @ p / (2 * params.m) + 0.5 * params.m * params.omega0 ** 2 * x @ x
    lam, w, phi = params.lam, params.omega, params.phi
    return TimeDependentModel([H0, x], [lambda t: 1.0, lambda t: -1j * lam * np.cos(w * t + phi)])


def classical_solution(params: OscillatorParams, t):
    """Periodic orbit (x_c, p_c) of  m x'' + m w0^2 x = i lam cos(w t + phi).

    The drive is imaginary, so the orbit is too:
    x_c = i lam cos(w t + phi) / (m (w0^2 - w^2)),  p_c = m dx_c/dt.
    """
    params.check_resonance()
    t = np.asarray(t, dtype=float)
    u = params.omega * t + params.phi
    amp = params.lam / (params.m * params.detuning)
    xc = 1j * amp * np.cos(u)
    pc = -1j * params.m * amp * params.omega * np.sin(u)
    return xc, pc


def quasienergy_closed_form(params: OscillatorParams, n) -> np.ndarray:
    """hbar w0 (n + 1/2) + lam^2 / (4 m (w0^2 - w^2))."""
    params.check_resonance()
    n = np.asarray(n, dtype=float)
    return params.hbar * params.omega0 * (n + 0.5) + params.lam ** 2 / (4 * params.m * params.detuning)


def _hermite(n: int, z):
    # physicists' Hermite polynomials, valid for complex arguments
    h0 = np.ones_like(z)
    if n == 0:
        return h0
    h1 = 2 * z
    for k in range(1, n):
        h0, h1 = h1, 2 * z * h1 - 2 * k * h0
    return h1


def _classical_action(params: OscillatorParams, t):
    # integral over [0, t] of p_c^2/2m - m w0^2 x_c^2/2 + f x_c  with f = i lam cos(u)
    m, w0, w, lam, phi = params.m, params.omega0, params.omega, params.lam, params.phi
    A = lam / (m * params.detuning)
    # with x_c = iA cos u and p_c = -i m A w sin u the integrand is
    # -m A^2 w^2 sin^2/2 + m w0^2 A^2 cos^2/2 - lam A cos^2
    c_sin2 = -0.5 * m * A * A * w * w
    c_cos2 = 0.5 * m * w0 * w0 * A * A - lam * A

    def int_sin2(t):
        return 0.5 * t - (np.sin(2 * (w * t + phi)) - np.sin(2 * phi)) / (4 * w)

    def int_cos2(t):
        return 0.5 * t + (np.sin(2 * (w * t + phi)) - np.sin(2 * phi)) / (4 * w)

    return c_sin2 * int_sin2(t) + c_cos2 * int_cos2(t)


def floquet_mode(params: OscillatorParams, n: int, x, t) -> np.ndarray:
    """Solution of the driven problem built on the n-th oscillator eigenstate.

    Phi_n(x, t) = exp(i/hbar [p_c (x - x_c) + S(t)]) phi_n(x - x_c) exp(-i w0 (n+1/2) t)

    with S the classical action along the orbit.  It satisfies
    Phi_n(x, t + tau) = exp(-i eps_n tau / hbar) Phi_n(x, t).
    """
    params.check_resonance()
    x = np.asarray(x, dtype=float)
    m, w0, hb = params.m, params.omega0, params.hbar
    xc, pc = classical_solution(params, t)
    y = x - xc
    k = np.sqrt(m * w0 / hb)
    norm = (m * w0 / (np.pi * hb)) ** 0.25 / np.sqrt(2.0 ** n * factorial(n))
    base = norm * np.exp(-0.5 * (k * y) ** 2) * _hermite(n, k * y)
    phase = (pc * y + _classical_action(params, t)) / hb - w0 * (n + 0.5) * t
    return base * np.exp(1j * phase)
