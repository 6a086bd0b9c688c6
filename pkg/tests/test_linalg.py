import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dark_zeno.errors import HermiticityError, NormalizationError
from dark_zeno.linalg import (
    as_hermitian,
    as_state,
    complement_basis,
    fidelity,
    fix_phase,
    hermitian_eigendecomposition,
    projector_from_state,
    random_hermitian,
    random_orthogonal_state,
    random_state,
    unitary_exp,
)

dimensions = st.integers(min_value=2, max_value=8)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(n=dimensions, seed=seeds)
@settings(max_examples=1000, deadline=None)
def test_eigendecomposition_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(n, rng)
    eig = hermitian_eigendecomposition(a)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert np.max(np.abs(eig.reconstruct() - a)) <= 1e-10 * max(1.0, np.max(np.abs(a)))
    gram = eig.eigenvectors.conj().T @ eig.eigenvectors
    assert np.allclose(gram, np.eye(n), atol=1e-12)


@given(n=dimensions, seed=seeds, t=st.floats(min_value=-10.0, max_value=10.0))
@settings(max_examples=1000, deadline=None)
def test_spectral_exponential_is_unitary(n, seed, t):
    rng = np.random.default_rng(seed)
    u = unitary_exp(random_hermitian(n, rng), t)
    assert np.max(np.abs(u @ u.conj().T - np.eye(n))) <= 1e-12


@given(n=dimensions, seed=seeds)
@settings(max_examples=1000, deadline=None)
def test_projector_is_idempotent_and_kills_f(n, seed):
    rng = np.random.default_rng(seed)
    f = random_state(n, rng)
    p = projector_from_state(f)
    assert np.max(np.abs(p @ p - p)) <= 1e-12
    assert np.max(np.abs(p - p.conj().T)) <= 1e-12
    assert np.linalg.norm(p @ f) <= 1e-12


@given(n=dimensions, seed=seeds)
@settings(max_examples=1000, deadline=None)
def test_complement_basis_is_orthonormal_and_orthogonal(n, seed):
    rng = np.random.default_rng(seed)
    f = random_state(n, rng)
    q = complement_basis(f)
    assert q.shape == (n, n - 1)
    assert np.allclose(q.conj().T @ q, np.eye(n - 1), atol=1e-12)
    assert np.max(np.abs(f.conj() @ q)) <= 1e-12


def test_exponential_at_zero_time_is_exact_identity(rng):
    u = unitary_exp(random_hermitian(4, rng), 0.0)
    assert np.array_equal(u, np.eye(4, dtype=np.complex128))


def test_exponential_of_diagonal():
    u = unitary_exp(np.diag([0.0, 1.0, 2.0]), 0.5)
    assert np.allclose(np.diag(u), np.exp(-0.5j * np.array([0.0, 1.0, 2.0])), atol=1e-14)


def test_fix_phase_makes_leading_component_real_positive(rng):
    vectors = fix_phase(np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0])
    for k in range(4):
        lead = vectors[np.flatnonzero(np.abs(vectors[:, k]) > 1e-10)[0], k]
        assert abs(lead.imag) <= 1e-14
        assert lead.real > 0


def test_fidelity_ignores_global_phase(rng):
    psi = random_state(5, rng)
    assert fidelity(psi, np.exp(0.7j) * psi) == pytest.approx(1.0, abs=1e-14)


def test_random_orthogonal_state(rng):
    f = random_state(6, rng)
    psi = random_orthogonal_state(f, rng)
    assert abs(np.vdot(f, psi)) <= 1e-14
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-14)


def test_non_hermitian_rejected():
    with pytest.raises(HermiticityError):
        as_hermitian([[0.0, 1.0], [0.0, 0.0]])


def test_non_square_rejected():
    with pytest.raises(HermiticityError):
        as_hermitian(np.zeros((2, 3)))


def test_hermiticity_tolerance_scales_with_entries():
    big = np.array([[1e6, 1.0], [1.0 + 1e-7, 0.0]])
    as_hermitian(big)
    with pytest.raises(HermiticityError):
        as_hermitian(np.array([[1.0, 1.0], [1.0 + 1e-7, 0.0]]))


@pytest.mark.parametrize("state", [[1.0], [[1.0, 0.0]], [1.0, 1.0]])
def test_invalid_states_rejected(state):
    with pytest.raises(NormalizationError):
        as_state(state)


def test_subnormalized_state_allowed_unless_unit_required():
    psi = as_state([0.6, 0.0])
    assert psi.dtype == np.complex128
    with pytest.raises(NormalizationError):
        as_state([0.6, 0.0], unit=True)


SQRT_HALF = np.sqrt(0.5)


@pytest.mark.parametrize(
    "matrix, values, vectors",
    [
        (np.diag([0.0, 1.0, 2.0]), [0.0, 1.0, 2.0], np.eye(3)),
        ([[0.0, 1.0], [1.0, 0.0]], [-1.0, 1.0], [[SQRT_HALF, SQRT_HALF], [-SQRT_HALF, SQRT_HALF]]),
    ],
)
def test_known_eigenpairs(matrix, values, vectors):
    eig = hermitian_eigendecomposition(matrix)
    assert np.allclose(eig.eigenvalues, values, atol=1e-14)
    assert np.allclose(eig.eigenvectors, vectors, atol=1e-14)


@pytest.mark.parametrize(
    "matrix, t, expected",
    [
        (np.diag([0.0, 1.0, 2.0]), np.pi, np.diag([1.0, -1.0, 1.0])),
        ([[0.0, 1.0], [1.0, 0.0]], np.pi / 2, [[0.0, -1j], [-1j, 0.0]]),
    ],
)
def test_known_exponentials(matrix, t, expected):
    assert np.allclose(unitary_exp(matrix, t), expected, atol=1e-14)


@pytest.mark.parametrize(
    "f, expected",
    [
        ([1.0, 0.0, 0.0], np.diag([0.0, 1.0, 1.0])),
        ([SQRT_HALF, SQRT_HALF], [[0.5, -0.5], [-0.5, 0.5]]),
        ([SQRT_HALF, 1j * SQRT_HALF], [[0.5, 0.5j], [-0.5j, 0.5]]),
    ],
)
def test_known_projectors(f, expected):
    assert np.allclose(projector_from_state(f), expected, atol=1e-15)


def test_projector_needs_unit_state():
    with pytest.raises(NormalizationError):
        projector_from_state([1.0, 1.0])
