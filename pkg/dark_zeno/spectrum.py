"""Closed-form dark evolution for commuting K and H: the Zeno spectrum and its consequences."""
import logging
import math
from dataclasses import dataclass

import numpy as np

from dark_zeno.config import DEFAULT_TOLERANCES
from dark_zeno.errors import (
    CommutatorError,
    ConsistencyError,
    NormalizationError,
    SetupError,
    UnsupportedVariantError,
)
from dark_zeno.linalg import (
    StateVector,
    as_hermitian,
    as_state,
    commutator,
    complement_basis,
    fix_phase,
    hermitian_eigendecomposition,
    hermitize,
    projector_from_state,
    unitary_exp,
)
from dark_zeno.paths import PathPeriod

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ZenoSpectrum:
    omegas: np.ndarray
    # columns u_k, orthonormal and orthogonal to f(0)
    modes: np.ndarray
    coefficients: np.ndarray

    def __len__(self):
        return self.omegas.shape[0]

    def weights(self):
        return np.abs(self.coefficients) ** 2

    def summary(self):
        return {
            "omegas": [float(w) for w in self.omegas],
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }


@dataclass(frozen=True)
class ThreeLevelSpectrumResult:
    xi: float
    eta: float
    omega_plus: float
    omega_minus: float


def _require_commuting(H, K, tol):
    gap = np.linalg.norm(commutator(K, H))
    bound = tol.commutator * np.linalg.norm(K) * np.linalg.norm(H)
    if gap > bound:
        raise CommutatorError(
            f"K and H do not commute (||[K,H]||_F = {gap:.3e}); no closed form exists, "
            "integrate the time-ordered evolution with continuous_dark_run instead"
        )


def static_comoving_hamiltonian(H, K, f0, *, tol=DEFAULT_TOLERANCES):
    """P(0) (H - K) P(0), the co-moving generator when [K, H] = 0."""
    P0 = projector_from_state(f0, tol=tol)
    return hermitize(P0 @ (H - K) @ P0)


def zeno_spectrum(H, K, f0, psi0, *, tol=DEFAULT_TOLERANCES) -> ZenoSpectrum:
    """Diagonalize P(0)(H - K)P(0) on the complement of f0 and expand psi0 in its eigenvectors."""
    H = as_hermitian(H, tol=tol)
    K = as_hermitian(K, tol=tol)
    f0 = as_state(f0, unit=True, tol=tol)
    psi0 = as_state(psi0, tol=tol)
    _require_commuting(H, K, tol)

    Q = complement_basis(f0)
    reduced = Q.conj().T @ static_comoving_hamiltonian(H, K, f0, tol=tol) @ Q
    eig = hermitian_eigendecomposition(hermitize(reduced), tol=tol)
    modes = fix_phase(Q @ eig.eigenvectors, tol=tol)
    coefficients = modes.conj().T @ psi0
    logger.debug(f"Zeno spectrum {eig.eigenvalues} with weights {np.abs(coefficients) ** 2}")
    return ZenoSpectrum(omegas=eig.eigenvalues, modes=modes, coefficients=coefficients)


def three_level_frequencies(a, Omega, *, tol=DEFAULT_TOLERANCES) -> ThreeLevelSpectrumResult:
    """Eigenvalues of P(0) K P(0) on the complement of f(0) for a 3-level path with H = 0."""
    a = np.asarray(a, dtype=np.complex128)
    Omega = np.asarray(Omega, dtype=np.float64)
    if a.shape != (3,) or Omega.shape != (3,):
        raise NormalizationError("Three-level formulas need exactly three amplitudes and frequencies")
    w = np.abs(a) ** 2
    if abs(w.sum() - 1.0) > tol.unit_norm:
        raise NormalizationError(f"Amplitudes must satisfy sum |a_j|^2 = 1, got {w.sum():.15g}")

    xi = float(Omega.sum() - w @ Omega)
    eta = float(w[0] * Omega[1] * Omega[2] + w[1] * Omega[0] * Omega[2] + w[2] * Omega[0] * Omega[1])
    discriminant = xi * xi - 4.0 * eta
    scale = max(1.0, xi * xi, abs(4.0 * eta))
    if discriminant < -tol.consistency * scale:
        raise ConsistencyError(f"xi^2 - 4 eta = {discriminant:.3e} < 0: complex spectrum for Hermitian input")
    root = math.sqrt(max(discriminant, 0.0))
    return ThreeLevelSpectrumResult(
        xi=xi,
        eta=eta,
        omega_plus=0.5 * (xi + root),
        omega_minus=0.5 * (xi - root),
    )


def closed_form_solution(psi0, H, K, f0, t, *, tol=DEFAULT_TOLERANCES) -> StateVector:
    """Psi(t) = e^{-iKt} e^{-i P(0)(H-K)P(0) t} psi0 for commuting K and H."""
    H = as_hermitian(H, tol=tol)
    K = as_hermitian(K, tol=tol)
    f0 = as_state(f0, unit=True, tol=tol)
    psi0 = as_state(psi0, unit=True, tol=tol)
    _require_commuting(H, K, tol)
    overlap = abs(np.vdot(f0, psi0))
    if overlap > tol.orthogonality_setup:
        raise SetupError(f"Initial state must be orthogonal to f(0): |<f0|psi0>| = {overlap:.3e}")
    H_tilde = static_comoving_hamiltonian(H, K, f0, tol=tol)
    return unitary_exp(K, t, tol=tol) @ (unitary_exp(H_tilde, t, tol=tol) @ psi0)


def expansion_state(spectrum: ZenoSpectrum, K, t, *, tol=DEFAULT_TOLERANCES) -> StateVector:
    """sum_k c_k e^{-i omega_k t} e^{-iKt} |u_k>."""
    comoving = spectrum.modes @ (spectrum.coefficients * np.exp(-1j * spectrum.omegas * t))
    return unitary_exp(K, t, tol=tol) @ comoving


def cyclic_return_fidelity(spectrum: ZenoSpectrum, period: PathPeriod) -> float:
    """|sum_k |c_k|^2 e^{-i omega_k T}| = |<Psi(0)|Psi(T)>| after one period of the path."""
    if not period.is_periodic:
        raise UnsupportedVariantError(f"Cyclic return needs a periodic path, got {period}")
    amplitude = np.sum(spectrum.weights() * np.exp(-1j * spectrum.omegas * period.period))
    return float(min(1.0, abs(amplitude)))
