import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nhqm.dynamics import (
    TimeDependentModel,
    dyson_generator,
    eta_transport,
    evolution_operator,
    fring_residual,
    generator_report,
    integrate_schrodinger,
    mostafazadeh_term,
    time_derivative,
    znojil_generator,
)
from nhqm.driven_oscillator import FockTruncation, OscillatorParams, build_hamiltonian
from nhqm.errors import DimensionMismatch, GridMismatch, NonFinite
from nhqm.linalg_core import eig_general, expm
from nhqm.metric import metric_from_spectrum, pseudo_hermiticity_residual
from nhqm.models import Brachistochrone
from nhqm.swanson_invariant import dyson_map, metric_operator, su11_generators, swanson_matrix
from swanson_fixtures import energy, engineered_model

SZ = np.diag([1.0, -1.0]).astype(complex)


def test_zero_hamiltonian_keeps_state():
    model = TimeDependentModel.constant(np.zeros((2, 2)))
    traj = integrate_schrodinger(model, [0.6, 0.8j], 0, 5, 50)
    np.testing.assert_array_equal(traj.states, np.tile([0.6, 0.8j], (51, 1)))


def test_stationary_state_phase():
    traj = integrate_schrodinger(TimeDependentModel.constant(SZ), [1, 0], 0, 3, 300)
    np.testing.assert_allclose(traj.states[:, 0], np.exp(-1j * traj.times), atol=1e-12)
    np.testing.assert_allclose(traj.states[:, 1], 0, atol=0)


def test_brachistochrone_pseudo_norm_constant():
    H = Brachistochrone(1, 2, np.pi / 2).hamiltonian()
    eta = metric_from_spectrum(eig_general(H)).eta
    traj = integrate_schrodinger(TimeDependentModel.constant(H), [1, 0], 0, 20, 20000, eta=eta)
    assert np.ptp(traj.norms_eta) <= 1e-7 * traj.norms_eta[0]


def test_state_shape_checked():
    with pytest.raises(DimensionMismatch):
        integrate_schrodinger(TimeDependentModel.constant(SZ), [1, 0, 0], 0, 1, 10)


def test_non_finite_reports_index():
    H = np.diag([400j, 0])
    with pytest.raises(NonFinite) as info:
        integrate_schrodinger(TimeDependentModel.constant(H), [1, 0], 0, 100, 100)
    assert info.value.index > 0


def test_constant_propagator_is_exponential():
    H = Brachistochrone(1, 2, 0.3).hamiltonian()
    times, U = evolution_operator(TimeDependentModel.constant(H), 0.5, 2.5, 200, stride=50)
    for t, Uk in zip(times, U):
        assert np.abs(Uk - expm(H, -1j * (t - 0.5))).max() <= 1e-8


def test_commuting_family_matches_quadrature():
    f = lambda t: 1 + 0.5 * np.cos(t)
    model = TimeDependentModel([SZ], [f])
    _, U = evolution_operator(model, 0, 4, 2000, stride=2000)
    integral = 4 + 0.5 * np.sin(4.0)  # closed-form antiderivative
    assert np.abs(U[-1] - expm(SZ, -1j * integral)).max() <= 1e-7


def test_group_property(rng):
    A = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3)]
    A = [0.3 * a for a in A]
    model = TimeDependentModel(A, [lambda t: 1.0, lambda t: np.cos(2 * t), lambda t: np.sin(2 * t)])
    _, full = evolution_operator(model, 0, 2, 2000, stride=2000)
    _, first = evolution_operator(model, 0, 1, 1000, stride=1000)
    _, second = evolution_operator(model, 1, 2, 1000, stride=1000)
    assert np.abs(second[-1] @ first[-1] - full[-1]).max() <= 1e-7


def _sz_error(steps):
    model = TimeDependentModel([SZ], [lambda t: 1 + 0.5 * np.cos(3 * t)])
    psi0 = np.array([1, 1]) / np.sqrt(2)
    ref = integrate_schrodinger(model, psi0, 0, 2, 10 * steps).states[-1]
    return np.linalg.norm(integrate_schrodinger(model, psi0, 0, 2, steps).states[-1] - ref)


def test_second_order_convergence():
    ratio = _sz_error(100) / _sz_error(200)
    assert 3.5 <= ratio <= 4.5


def test_unitarity_for_hermitian_drive():
    model = TimeDependentModel([SZ, np.array([[0, 1], [1, 0]], dtype=complex)],
                               [lambda t: 1.0, lambda t: 0.7 * np.sin(1.3 * t)])
    _, U = evolution_operator(model, 0, 5, 1000, stride=1000)
    assert np.abs(U[-1].conj().T @ U[-1] - np.eye(2)).max() <= 1e-7


def test_time_derivative_grid_checks():
    with pytest.raises(GridMismatch):
        time_derivative(np.zeros(3), [0, 1, 3])
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(time_derivative(t ** 2, t), 2 * t, atol=1e-12)


def test_znojil_trivial_cases():
    H = Brachistochrone(1, 2, 0.3).hamiltonian()
    I = np.eye(2)
    np.testing.assert_allclose(znojil_generator(H, 2 * I, 0 * I), H)
    t = 0.7
    rho, rho_dot = np.exp(t) * I, np.exp(t) * I
    np.testing.assert_allclose(znojil_generator(H, rho, rho_dot, hbar=1.0), H - 1j * I, atol=1e-14)


def _rho_stencil(aux, t, N, h=5e-4):
    ts = np.array([t - h, t, t + h])
    maps = [dyson_map(aux, s, N) for s in ts]
    rho = np.array([m[0] for m in maps])
    return rho[1], time_derivative(rho, ts)[1], maps[1][1]


@pytest.mark.parametrize("t", [0.1, 0.5, 0.9])
def test_generators_on_engineered_swanson(t):
    aux, coeffs = engineered_model()
    N, block = 80, 12
    K0 = su11_generators(N)[0]
    rho, rho_dot, rho_inv = _rho_stencil(aux, t, N)
    H = swanson_matrix(coeffs, t, N)
    # Dyson relation: h = rho H rho^-1 + i hbar rho_dot rho^-1 must be the Hermitian partner
    h = dyson_generator(H, rho, rho_dot, rho_inv=rho_inv)
    assert np.abs((h - 2 * energy(t) * K0)[:block, :block]).max() <= 1e-6
    # the reversed ordering is off at order one
    h_left = dyson_generator(H, rho, rho_dot, ordering="left", rho_inv=rho_inv)
    assert np.abs((h_left - 2 * energy(t) * K0)[:block, :block]).max() > 0.1
    # Znojil: observable rho^-1 h rho generates the flow after subtracting i hbar rho^-1 rho_dot
    theta = rho_inv @ (2 * energy(t) * K0) @ rho
    gen = znojil_generator(theta, rho, rho_dot, rho_inv=rho_inv)
    assert np.abs((gen - H)[:block, :block]).max() <= 1e-6


def test_fring_residual_static_reduces():
    H = Brachistochrone(1, 2, 0.3).hamiltonian()
    eta = metric_from_spectrum(eig_general(H)).eta
    r = fring_residual(H, eta, np.zeros((2, 2)))
    assert r <= 1e-12
    eta_bad = np.diag([1.0, 2.0])
    expected = pseudo_hermiticity_residual(H, eta_bad) * np.linalg.norm(H) / (np.linalg.norm(H) + 1)
    assert fring_residual(H, eta_bad, np.zeros((2, 2))) == pytest.approx(expected, rel=1e-12)
    Hh = np.array([[1.0, 0.5], [0.5, 0.0]])
    assert fring_residual(Hh, np.eye(2), np.zeros((2, 2))) == 0


def test_fring_residual_engineered_swanson():
    aux, coeffs = engineered_model()
    N, block = 30, 26
    times = np.linspace(0, 2, 2001)
    eta = np.array([metric_operator(aux, t, N) for t in times])
    eta_dot = time_derivative(eta, times)
    worst = max(fring_residual(swanson_matrix(coeffs, t, N), e, ed, block=block)
                for t, e, ed in list(zip(times, eta, eta_dot))[1:-1:50])
    assert worst <= 1e-6


def test_mostafazadeh_term_static_is_zero():
    eta = np.array([[2.0, 0.5j], [-0.5j, 1.0]])
    np.testing.assert_array_equal(mostafazadeh_term(eta, np.zeros((2, 2))), 0)


def test_generator_report_constant_map():
    H = Brachistochrone(1, 2, 0.3).hamiltonian()
    mp = metric_from_spectrum(eig_general(H))
    times = np.linspace(0, 1, 5)
    rep = generator_report([H] * 5, [mp.rho] * 5, times)
    np.testing.assert_allclose(rep.h_gen, np.array([H] * 5), atol=1e-12)
    assert rep.fring_residual.max() <= 1e-12
    np.testing.assert_allclose(rep.mostafazadeh_term, 0, atol=1e-12)


def test_eta_transport_unitary_keeps_identity():
    model = TimeDependentModel([SZ, np.array([[0, 1], [1, 0]], dtype=complex)], [lambda t: 1, lambda t: np.cos(t)])
    _, U = evolution_operator(model, 0, 2, 200, stride=20)
    np.testing.assert_allclose(eta_transport(np.eye(2), U), np.array([np.eye(2)] * len(U)), atol=1e-12)


def test_eta_transport_static_quasi_hermitian():
    H = Brachistochrone(1, 2, 0.6).hamiltonian()
    eta0 = metric_from_spectrum(eig_general(H)).eta
    _, U = evolution_operator(TimeDependentModel.constant(H), 0, 5, 500, stride=50)
    for e in eta_transport(eta0, U):
        assert np.abs(e - eta0).max() <= 1e-8


def test_eta_transport_driven_oscillator(rng):
    p = OscillatorParams()
    model = build_hamiltonian(p, FockTruncation(20))
    _, U = evolution_operator(model, 0, p.period, 400, stride=40)
    eta = eta_transport(np.eye(20), U)
    u0 = rng.normal(size=20) + 1j * rng.normal(size=20)
    v0 = rng.normal(size=20) + 1j * rng.normal(size=20)
    ref = np.vdot(u0, v0)
    for Uk, ek in zip(U, eta):
        val = np.vdot(Uk @ u0, ek @ (Uk @ v0))
        assert abs(val - ref) <= 1e-6 * abs(ref)


@given(st.integers(0, 2**32 - 1))
def test_model_sums_terms(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.normal(size=(2, 3, 3))
    m = TimeDependentModel([A, B], [lambda t: 2.0, lambda t: t])
    np.testing.assert_allclose(m.hamiltonian(0.5), 2 * A + 0.5 * B)
