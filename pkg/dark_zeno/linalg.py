"""Dense complex linear algebra: Hermitian eigendecomposition, spectral exponentials, projectors.

States are 1-D ``complex128`` arrays, operators are 2-D ``complex128`` arrays.
The validators below are the only place that decides what counts as a state,
a unit state or a Hermitian operator.
"""
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from dark_zeno.config import DEFAULT_TOLERANCES
from dark_zeno.errors import HermiticityError, NormalizationError

logger = logging.getLogger(__name__)

StateVector = npt.NDArray[np.complex128]
Operator = npt.NDArray[np.complex128]


def as_state(x, *, unit=False, tol=DEFAULT_TOLERANCES) -> StateVector:
    """Validate and convert ``x`` to a state vector of dimension >= 2.

    Sub-normalized states are allowed (discrete dark runs are never
    renormalized); ``unit=True`` additionally demands ||x|| = 1.
    """
    psi = np.asarray(x, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] < 2:
        raise NormalizationError(f"State must be a vector of dimension >= 2, got shape {psi.shape}")
    norm_sq = float(np.vdot(psi, psi).real)
    if norm_sq > 1.0 + tol.subnormal_slack and not unit:
        raise NormalizationError(f"Squared norm {norm_sq:.15g} exceeds 1")
    if unit and abs(np.sqrt(norm_sq) - 1.0) > tol.unit_norm:
        raise NormalizationError(f"Expected a unit state, got norm {np.sqrt(norm_sq):.15g}")
    return psi


def as_hermitian(a, *, tol=DEFAULT_TOLERANCES) -> Operator:
    """Validate and convert ``a`` to a square Hermitian matrix."""
    mat = np.asarray(a, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise HermiticityError(f"Operator must be a square matrix, got shape {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat)))) if mat.size else 1.0
    deviation = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if deviation > tol.hermiticity * scale:
        raise HermiticityError(f"Operator is not Hermitian: max |A - A^H| = {deviation:.3e}")
    return mat


def hermitize(a) -> Operator:
    """Symmetrize away round-off: (A + A^H) / 2."""
    return 0.5 * (a + a.conj().T)


def inner(a, b) -> complex:
    """<a|b>, conjugating the first argument."""
    return complex(np.vdot(a, b))


def norm(a) -> float:
    return float(np.linalg.norm(a))


def fidelity(a, b) -> float:
    """|<a|b>| / (||a|| ||b||); 1 means equal up to a global phase."""
    return abs(inner(a, b)) / (norm(a) * norm(b))


def commutator(a, b) -> Operator:
    return a @ b - b @ a


def fix_phase(vectors, *, tol=DEFAULT_TOLERANCES):
    """Rotate each column so its first component above the significance floor is real positive."""
    vectors = np.array(vectors, dtype=np.complex128, copy=True)
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        significant = np.flatnonzero(np.abs(column) > tol.phase_significance)
        if significant.size:
            lead = column[significant[0]]
            vectors[:, k] = column * (abs(lead) / lead)
    return vectors


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: npt.NDArray[np.float64]
    # columns are the eigenvectors
    eigenvectors: Operator

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> Operator:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply_function(self, fn) -> Operator:
        """V diag(fn(lambda)) V^H."""
        v = self.eigenvectors
        return (v * fn(self.eigenvalues)) @ v.conj().T


def hermitian_eigendecomposition(a, *, tol=DEFAULT_TOLERANCES) -> EigenDecomposition:
    """Orthonormal eigenbasis with ascending eigenvalues and a fixed phase convention."""
    mat = as_hermitian(a, tol=tol)
    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitize(mat))
    return EigenDecomposition(
        eigenvalues=np.asarray(eigenvalues, dtype=np.float64),
        eigenvectors=fix_phase(eigenvectors, tol=tol),
    )


def unitary_exp(a, t, *, tol=DEFAULT_TOLERANCES) -> Operator:
    """e^{-i A t} computed spectrally."""
    if t == 0:
        mat = as_hermitian(a, tol=tol)
        return np.eye(mat.shape[0], dtype=np.complex128)
    return hermitian_eigendecomposition(a, tol=tol).apply_function(lambda lam: np.exp(-1j * lam * t))


def projector_from_state(f, *, tol=DEFAULT_TOLERANCES) -> Operator:
    """P = I - |f><f| for a unit state f."""
    f = as_state(f, unit=True, tol=tol)
    return np.eye(f.shape[0], dtype=np.complex128) - np.outer(f, f.conj())


def complement_basis(f) -> Operator:
    """Orthonormal columns spanning the complement of ``f``."""
    f = np.asarray(f, dtype=np.complex128)
    return scipy.linalg.null_space(f.conj()[np.newaxis, :])


def random_hermitian(n, rng, scale=1.0) -> Operator:
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (x + x.conj().T)


def random_state(n, rng) -> StateVector:
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    return x / np.linalg.norm(x)


def random_orthogonal_state(f, rng) -> StateVector:
    """Random unit state orthogonal to ``f``."""
    x = random_state(f.shape[0], rng)
    x = x - f * np.vdot(f, x)
    return x / np.linalg.norm(x)
