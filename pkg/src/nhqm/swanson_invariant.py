"""Swanson oscillator  H = w (a^+a + 1/2) + alpha a^2 + beta a^+2  and its pseudo-invariants.

Everything is written in terms of the su(1,1) generators

    K0 = (a^+a + 1/2)/2,   K+ = a^+2/2,   K- = a^2/2,

so H = 2w K0 + 2alpha K- + 2beta K+.  The Dyson map is parametrised by
real functions Phi(t), chi(t) through

    rho = exp(-Phi K+) theta0^K0 exp(-Phi K-),   theta0 = Phi^2 - chi,

which maps the pseudo-Hermitian invariant onto K0.  theta0 may be negative
(the physically relevant static branch has theta0 < 0); the power then
uses the principal complex logarithm.

Truncated Fock matrices only realise the su(1,1) algebra away from the top
two levels, so operator identities are checked on a leading "safe" block.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .dynamics import time_derivative
from .errors import ConstraintViolation, DimensionMismatch, GridMismatch, SingularTheta
from .linalg_core import fro

Func = Callable[[float], complex]


def _const(v):
    return lambda t: v


def _deriv(f: Func, t: float, h: float = 1e-5) -> complex:
    return (f(t + h) - f(t - h)) / (2 * h)


@dataclass
class SwansonCoefficients:
    """Time-dependent (possibly complex) w(t), alpha(t), beta(t)."""

    omega: Func
    alpha: Func
    beta: Func

    @classmethod
    def static(cls, omega, alpha, beta) -> "SwansonCoefficients":
        return cls(_const(complex(omega)), _const(complex(alpha)), _const(complex(beta)))

    def at(self, t: float):
        return complex(self.omega(t)), complex(self.alpha(t)), complex(self.beta(t))


@dataclass
class DeltaState:
    """Coefficients of I = d1 (a^+a + 1/2) + d2 a^2 + d3 a^+2."""

    d1: complex
    d2: complex
    d3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.d1, self.d2, self.d3], dtype=complex)


@dataclass
class AuxiliaryParams:
    """Real Phi(t), chi(t); optional exact derivatives (else centred differences)."""

    Phi: Func
    chi: Func
    Phi_dot: Func | None = None
    chi_dot: Func | None = None
    is_static: bool = False

    @classmethod
    def static(cls, Phi, chi) -> "AuxiliaryParams":
        return cls(_const(float(Phi)), _const(float(chi)), _const(0.0), _const(0.0), True)

    def values(self, t: float):
        """(Phi, chi, theta0, Phi_dot, theta0_dot) at t."""
        P, c = float(self.Phi(t)), float(self.chi(t))
        Pd = float(self.Phi_dot(t)) if self.Phi_dot else float(_deriv(self.Phi, t))
        cd = float(self.chi_dot(t)) if self.chi_dot else float(_deriv(self.chi, t))
        return P, c, P * P - c, Pd, 2 * P * Pd - cd

    def deltas(self, t: float) -> DeltaState:
        P, c, th0, _, _ = self.values(t)
        _check_theta(th0)
        return DeltaState(-(P * P + c) / (2 * th0), -c * P / (2 * th0), -P / (2 * th0))


@dataclass
class InvariantPair:
    I_ph: np.ndarray
    I_h: np.ndarray
    k_n: np.ndarray


def _check_theta(th0, tol=1e-12):
    if abs(th0) < tol:
        raise SingularTheta("theta0 = Phi^2 - chi vanishes")


def su11_generators(N: int):
    """(K0, K+, K-) on the first N number states."""
    if N < 3:
        raise DimensionMismatch("truncation needs at least three levels")
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)
    ad = a.T.copy()
    K0 = 0.5 * (ad @ a + 0.5 * np.eye(N))
    return K0, 0.5 * ad @ ad, 0.5 * a @ a


def safe_block(N: int) -> int:
    """Leading block on which the truncated generators close the algebra."""
    return N - 2


def swanson_matrix(coeffs: SwansonCoefficients, t: float, N: int) -> np.ndarray:
    K0, Kp, Km = su11_generators(N)
    w, al, be = coeffs.at(t)
    return 2 * w * K0 + 2 * al * Km + 2 * be * Kp


def swanson_model(coeffs: SwansonCoefficients, N: int):
    """The truncated Hamiltonian as a TimeDependentModel."""
    from .dynamics import TimeDependentModel

    K0, Kp, Km = su11_generators(N)
    return TimeDependentModel(
        [2 * K0, 2 * Km, 2 * Kp], [coeffs.omega, coeffs.alpha, coeffs.beta])


def _rates(d, w, al, be, hbar):
    # from dI/dt = (i/hbar)[I, H]
    d1, d2, d3 = d
    return np.array([
        4j * (be * d2 - al * d3),
        2j * (w * d2 - al * d1),
        2j * (be * d1 - w * d3),
    ]) / hbar


def delta_odes(coeffs: SwansonCoefficients, delta0, t0: float, t1: float, steps: int, hbar: float = 1.0):
    """RK4 integration of the invariant coefficients.  Returns (times, deltas[K, 3])."""
    d = delta0.as_array() if isinstance(delta0, DeltaState) else np.asarray(delta0, dtype=complex)
    if steps < 1:
        raise GridMismatch("steps must be positive")
    times = np.linspace(t0, t1, steps + 1)
    dt = (t1 - t0) / steps
    out = np.empty((steps + 1, 3), dtype=complex)
    out[0] = d

    def f(t, y):
        return _rates(y, *coeffs.at(t), hbar)

    for k in range(steps):
        t = times[k]
        k1 = f(t, d)
        k2 = f(t + dt / 2, d + dt / 2 * k1)
        k3 = f(t + dt / 2, d + dt / 2 * k2)
        k4 = f(t + dt, d + dt * k3)
        d = d + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = d
    return times, out


def constraint_residuals(coeffs: SwansonCoefficients, aux: AuxiliaryParams, t: float, hbar: float = 1.0):
    """Residuals of the three conditions that make the invariant real and consistent.

    1. theta0_dot = (2/hbar)(theta0/Phi)[-2 Phi Im w + Im alpha + (2 Phi^2 + chi) Im beta]
    2. Phi_dot    = (2/hbar)[-Phi Im w + Im alpha + Phi^2 Im beta]
    3. chi Re beta = Re alpha,  (Phi^2+chi) Re alpha = chi Phi Re w,
       Phi Re w = (Phi^2+chi) Re beta      (largest absolute residual)
    """
    w, al, be = coeffs.at(t)
    P, c, th0, Pd, thd = aux.values(t)
    bracket = -2 * P * w.imag + al.imag + (2 * P * P + c) * be.imag
    if abs(P) > 1e-12:
        r1 = thd - 2 / hbar * th0 / P * bracket
    else:
        r1 = P * thd - 2 / hbar * th0 * bracket
    r2 = Pd - 2 / hbar * (-P * w.imag + al.imag + P * P * be.imag)
    r3 = max(abs(c * be.real - al.real),
             abs((P * P + c) * al.real - c * P * w.real),
             abs(P * w.real - (P * P + c) * be.real))
    return abs(r1), abs(r2), r3


def theta_params(epsilon: float, mu: float):
    """(theta0, Phi, chi) of rho = exp(eps(a^+a+1/2) + mu a^2 + mu a^+2), real eps, mu.

    Only the branch theta^2 = eps^2 - 4 mu^2 > 0 is supported.
    """
    th2 = epsilon ** 2 - 4 * mu ** 2
    if th2 <= 0:
        raise SingularTheta("only eps^2 > 4 mu^2 is supported")
    th = np.sqrt(th2)
    ch, sh = np.cosh(th), np.sinh(th)
    den = ch - epsilon / th * sh
    if abs(den) < 1e-14:
        raise SingularTheta("cosh(theta) = (eps/theta) sinh(theta)")
    th0 = den ** -2
    chi = -(ch + epsilon / th * sh) / den
    theta_minus = 2 * mu * sh / (th * ch - epsilon * sh)
    return th0, -theta_minus, chi


def static_auxiliary(omega: float, alpha: float, beta: float) -> AuxiliaryParams:
    """Constant (Phi, chi) for real static coefficients with omega^2 > 4 alpha beta.

    Picks the root with |Phi| < 1, the one whose Dyson map acts on
    normalisable states.
    """
    if beta == 0:
        if alpha != 0:
            raise ConstraintViolation("beta = 0 requires alpha = 0")
        return AuxiliaryParams.static(0.0, -1.0)
    disc = omega * omega - 4 * alpha * beta
    if disc <= 0:
        raise ConstraintViolation("omega^2 <= 4 alpha beta: no real invariant")
    chi = alpha / beta
    Phi = (omega - np.sign(omega) * np.sqrt(disc)) / (2 * beta)
    if abs(Phi) >= 1:
        raise ConstraintViolation("no root with |Phi| < 1")
    _check_theta(Phi * Phi - chi)
    return AuxiliaryParams.static(Phi, chi)


def coefficients_from_dyson(aux: AuxiliaryParams, energy: Func, hbar: float = 1.0) -> SwansonCoefficients:
    """Swanson coefficients whose Dyson map is rho(Phi, chi) and whose Hermitian partner is energy(t) (a^+a + 1/2).

    H = rho^-1 h rho - i hbar rho^-1 rho_dot  with h = 2 energy(t) K0.  The
    result satisfies the three invariant conditions identically.
    """
    def parts(t):
        P, c, th0, Pd, thd = aux.values(t)
        _check_theta(th0)
        return P, c, th0, Pd, thd, float(energy(t))

    def omega(t):
        P, c, th0, Pd, thd, e = parts(t)
        return -e * (P * P + c) / th0 - 0.5j * hbar * (thd - 2 * P * Pd) / th0

    def alpha(t):
        P, c, th0, Pd, thd, e = parts(t)
        return -e * c * P / th0 + 0.5j * hbar * (Pd * P * P / th0 - thd * P / th0 + Pd)

    def beta(t):
        P, c, th0, Pd, thd, e = parts(t)
        return -e * P / th0 + 0.5j * hbar * Pd / th0

    return SwansonCoefficients(omega, alpha, beta)


def exp_raising(c: complex, N: int) -> np.ndarray:
    """exp(c K+) on N levels: <n+2k| exp(c K+) |n> = (c/2)^k / k! sqrt((n+2k)!/n!).

    K+ is nilpotent on a truncated basis, so this is exact.  exp(c K-) is
    the transpose.
    """
    if c == 0:
        return np.eye(N, dtype=complex)
    n = np.arange(N)
    row, col = n[:, None], n[None, :]
    gap = row - col
    mask = (gap >= 0) & (gap % 2 == 0)
    k = np.where(mask, gap // 2, 0)
    logmag = k * np.log(abs(c) / 2) - gammaln(k + 1) + 0.5 * (gammaln(row + 1) - gammaln(col + 1))
    vals = np.exp(logmag + 1j * np.angle(c) * k)
    return np.where(mask, vals, 0.0).astype(complex)


def dyson_map(aux: AuxiliaryParams, t: float, N: int, pad: int | None = None):
    """(rho, rho^-1) restricted to the first N levels, built in N + pad levels."""
    P, c, th0, _, _ = aux.values(t)
    _check_theta(th0)
    big = N + (2 * N if pad is None else pad)
    k0 = (np.arange(big) + 0.5) / 2
    logth = np.log(complex(th0))
    down, up = exp_raising(-P, big), exp_raising(P, big)
    rho = (down * np.exp(logth * k0)) @ down.T
    rho_inv = (up.T * np.exp(-logth * k0)) @ up
    return rho[:N, :N], rho_inv[:N, :N]


def metric_operator(aux: AuxiliaryParams, t: float, N: int, pad: int | None = None) -> np.ndarray:
    """eta = rho^+ rho on the first N levels (formed before truncating)."""
    big = N + (2 * N if pad is None else pad)
    rho, _ = dyson_map(aux, t, big, pad=0)
    eta = rho.conj().T @ rho
    return eta[:N, :N]


def build_invariant_pair(aux: AuxiliaryParams, t: float, N: int) -> InvariantPair:
    """I_PH = -(1/theta0)[(Phi^2+chi) K0 + chi Phi K- + Phi K+], normalised so that rho I_PH rho^-1 = K0."""
    P, c, th0, _, _ = aux.values(t)
    _check_theta(th0)
    K0, Kp, Km = su11_generators(N)
    I_ph = -((P * P + c) * K0 + c * P * Km + P * Kp) / th0
    return InvariantPair(I_ph, K0, (np.arange(N) + 0.5) / 2)


def von_neumann_residual(I_samples, H_samples, times, hbar: float = 1.0, block: int | None = None) -> float:
    """max_t ||dI/dt - (i/hbar)[I, H]|| / ||I|| on the leading block."""
    I = np.asarray(I_samples, dtype=complex)
    H = np.asarray(H_samples, dtype=complex)
    if I.shape != H.shape:
        raise GridMismatch("I and H samples differ in shape")
    b = safe_block(I.shape[1]) if block is None else block
    if len(times) >= 3:
        dI = time_derivative(I, times)
    else:
        dI = np.zeros_like(I)
    worst = 0.0
    for k in range(len(I)):
        r = dI[k] - 1j / hbar * (I[k] @ H[k] - H[k] @ I[k])
        worst = max(worst, fro(r[:b, :b]) / fro(I[k][:b, :b]))
    return worst


def phase_coefficients(coeffs: SwansonCoefficients, aux: AuxiliaryParams, t: float, hbar: float = 1.0):
    """(W, U, V) with  i hbar rho d(rho^-1)/dt - rho H rho^-1 = 2W K0 + 2U K- + 2V K+."""
    w, al, be = coeffs.at(t)
    P, c, th0, Pd, thd = aux.values(t)
    _check_theta(th0)
    W = (w * (P * P + c) - 2 * P * (al + be * c) - 0.5j * hbar * (thd - 2 * P * Pd)) / th0
    U = (w * P - al - be * P * P + 0.5j * hbar * Pd) / th0
    V = (w * c * P - al * P * P - be * c * c + 0.5j * hbar * (th0 * Pd + P * P * Pd - P * thd)) / th0
    return W, U, V


def gamma_phase(coeffs: SwansonCoefficients, aux: AuxiliaryParams, n: int, times, hbar: float = 1.0,
                tol: float = 1e-8):
    """gamma_n(t) = (2 k_n / hbar) int_0^t W dt'  with k_n = (n + 1/2)/2.

    Returns ``(gamma, imag_part)``: the real phase and the accumulated
    imaginary part (zero whenever the invariant conditions hold).  Raises
    ConstraintViolation if U or V, or Im W, exceed ``tol`` anywhere.
    """
    from scipy.integrate import cumulative_trapezoid

    times = np.asarray(times, dtype=float)
    Wv = np.empty(len(times), dtype=complex)
    for k, t in enumerate(times):
        W, U, V = phase_coefficients(coeffs, aux, t, hbar)
        if max(abs(U), abs(V), abs(W.imag)) > tol:
            raise ConstraintViolation(f"off-diagonal phase terms at t={t}: |U|={abs(U):.2e} |V|={abs(V):.2e}")
        Wv[k] = W
    kn = (n + 0.5) / 2
    g = 2 * kn / hbar * cumulative_trapezoid(Wv, times, initial=0.0)
    return g.real, g.imag


def amplitudes(psi0, aux: AuxiliaryParams, t0: float = 0.0) -> np.ndarray:
    """C_n = <phi_n|eta|psi0> = <n|rho|psi0>."""
    psi0 = np.asarray(psi0, dtype=complex)
    rho, _ = dyson_map(aux, t0, len(psi0))
    return rho @ psi0


def assemble_solution(coeffs: SwansonCoefficients, aux: AuxiliaryParams, C_n, times, N: int,
                      hbar: float = 1.0) -> np.ndarray:
    """Phi(t) = sum_n C_n exp(i gamma_n(t)) rho(t)^-1 |n>, sampled at ``times``.

    Only the leading entries of C_n (its length) are used.
    """
    C_n = np.asarray(C_n, dtype=complex)
    times = np.asarray(times, dtype=float)
    gam = np.array([gamma_phase(coeffs, aux, n, times, hbar)[0] for n in range(len(C_n))])
    out = np.empty((len(times), N), dtype=complex)
    fixed = dyson_map(aux, times[0], N)[1] if aux.is_static else None
    for k, t in enumerate(times):
        rho_inv = fixed if fixed is not None else dyson_map(aux, t, N)[1]
        out[k] = rho_inv[:, :len(C_n)] @ (C_n * np.exp(1j * gam[:, k]))
    return out


def schrodinger_residual(states, times, hamiltonian, hbar: float = 1.0, block: int | None = None) -> float:
    """max over interior samples of ||i hbar dPhi/dt - H Phi|| / ||Phi|| (centred differences).

    ``hamiltonian`` is a callable of t or a fixed matrix.
    """
    states = np.asarray(states)
    if len(states) != len(times):
        raise GridMismatch("states and times differ in length")
    H = hamiltonian if callable(hamiltonian) else (lambda t, M=np.asarray(hamiltonian): M)
    b = states.shape[1] if block is None else block
    d = time_derivative(states, times)
    worst = 0.0
    for k in range(1, len(times) - 1):
        r = 1j * hbar * d[k] - H(times[k]) @ states[k]
        worst = max(worst, np.linalg.norm(r[:b]) / np.linalg.norm(states[k]))
    return worst
