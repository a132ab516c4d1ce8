import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_diagonalizable, taylor_expm
from nhqm.errors import DegenerateSpectrum, NotPositiveDefinite, Overflow, Singular
from nhqm.linalg_core import (
    DEFAULT_TOL,
    biorthonormalize,
    eig_general,
    expm,
    hermitian_sqrt,
    inv,
    sqrt_posdef,
)
from nhqm.models import Brachistochrone

SQRT3 = 1.7320508075688772  # mpmath.sqrt(3) rounded to double


def test_diagonal_spectrum_and_basis():
    spec = eig_general(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(spec.eigenvalues, [1, 2, 3])
    np.testing.assert_allclose(np.abs(spec.right_vectors), np.eye(3)[:, [1, 2, 0]], atol=1e-15)


def test_brachistochrone_unbroken_eigenvalues():
    spec = eig_general(Brachistochrone(1, 2, np.pi / 2).hamiltonian())
    np.testing.assert_allclose(spec.eigenvalues, [-SQRT3, SQRT3], atol=1e-12)


def test_brachistochrone_broken_pair_sorted_by_imaginary_part():
    spec = eig_general(Brachistochrone(2, 1, np.pi / 2).hamiltonian())
    np.testing.assert_allclose(spec.eigenvalues, [-1j * SQRT3, 1j * SQRT3], atol=1e-12)


def test_hermitian_left_equals_right():
    A = np.array([[2, 1 - 1j, 0], [1 + 1j, 3, 0.5], [0, 0.5, -1]])
    spec = biorthonormalize(eig_general(A))
    np.testing.assert_allclose(spec.left_vectors, spec.right_vectors, atol=1e-12)


def test_brachistochrone_overlap_is_identity():
    spec = biorthonormalize(eig_general(Brachistochrone(1, 2, np.pi / 2).hamiltonian()))
    G = spec.left_vectors.conj().T @ spec.right_vectors
    assert np.abs(G - np.eye(2)).max() <= 1e-12


def test_completeness_random_5x5(rng):
    spec = biorthonormalize(eig_general(random_diagonalizable(rng, 5)))
    P = spec.right_vectors @ spec.left_vectors.conj().T
    assert np.abs(P - np.eye(5)).max() <= 1e-12


def test_left_vectors_are_eigenvectors_of_adjoint(rng):
    A = random_diagonalizable(rng, 6)
    spec = eig_general(A)
    L = spec.left_vectors
    r = A.conj().T @ L - L * spec.eigenvalues.conj()
    assert np.linalg.norm(r) <= 1e-9 * np.linalg.norm(A) * np.linalg.norm(L)


def test_degenerate_spectrum_refused():
    A = np.diag([1.0, 1.0 + 1e-12, 2.0])
    spec = eig_general(A)
    assert spec.degeneracy_flags.tolist() == [True, True, False]
    with pytest.raises(DegenerateSpectrum):
        biorthonormalize(spec)


@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_reconstruction_property(seed, n):
    A = random_diagonalizable(np.random.default_rng(seed), n)
    spec = eig_general(A)
    if spec.degeneracy_flags.any():
        return
    spec = biorthonormalize(spec)
    assert np.linalg.norm(A - spec.reconstruct()) <= 1e-8 * np.linalg.norm(A)


def test_sqrt_examples():
    np.testing.assert_allclose(sqrt_posdef(np.eye(3)), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(sqrt_posdef(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)


def test_sqrt_of_brachistochrone_metric_squares_back():
    # alpha = pi/6: closed-form metric and its indefinite root
    a = np.pi / 6
    eta = np.array([[1, -1j * np.sin(a)], [1j * np.sin(a), 1]]) / np.cos(a)
    rho_closed = np.array([[np.sin(a / 2), -1j * np.cos(a / 2)],
                          [1j * np.cos(a / 2), np.sin(a / 2)]]) / np.sqrt(np.cos(a))
    assert np.abs(rho_closed @ rho_closed - eta).max() <= 1e-14
    # the printed root is Hermitian but indefinite; it is the (-, +) branch
    np.testing.assert_allclose(hermitian_sqrt(eta, signs=[-1, 1]), rho_closed, atol=1e-14)
    pos = sqrt_posdef(eta)
    assert np.linalg.eigvalsh(pos).min() > 0
    np.testing.assert_allclose(pos @ pos, eta, atol=1e-14)


def test_sqrt_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        sqrt_posdef(np.diag([1.0, -1.0]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_sqrt_commutes_with_input(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A = X @ X.conj().T + np.eye(n)
    S = sqrt_posdef(A)
    assert np.linalg.norm(S @ A - A @ S) <= 1e-10 * np.linalg.norm(A)


def test_expm_examples():
    A = np.array([[0.3, 1j], [2, -1]])
    np.testing.assert_allclose(expm(A, 0), np.eye(2), atol=0)
    np.testing.assert_allclose(expm(np.diag([1.0, 2.0])), np.diag([np.e, np.e ** 2]), rtol=1e-14)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    oracle = taylor_expm(1j * np.pi / 2 * sx)
    np.testing.assert_allclose(oracle, 1j * sx, atol=1e-14)
    np.testing.assert_allclose(expm(sx, 1j * np.pi / 2), oracle, atol=1e-14)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_expm_matches_taylor_series(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A *= 1.5 / np.linalg.norm(A, 2)
    np.testing.assert_allclose(expm(A), taylor_expm(A), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(-2, 2), st.floats(-2, 2))
def test_expm_semigroup(seed, s, t):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    A /= np.linalg.norm(A, 2)
    lhs = expm(A, s) @ expm(A, t)
    assert np.linalg.norm(lhs - expm(A, s + t)) <= 1e-10 * max(1.0, np.linalg.norm(lhs))


def test_expm_overflow_guard():
    with pytest.raises(Overflow):
        expm(np.eye(2) * 1e4)


def test_inv_singular():
    with pytest.raises(Singular):
        inv(np.zeros((2, 2)))


def test_default_hbar_is_one():
    assert DEFAULT_TOL.hbar == 1.0
