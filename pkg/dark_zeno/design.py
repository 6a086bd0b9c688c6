"""Inverse problem: choose |f(t)> so that dark evolution follows a prescribed Psi(t).

Also the phase diagnostics of the resulting trajectories (parallel transport and
the discretized geometric phase). The phase formula is a Bargmann-invariant sum
over consecutive overlaps.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from dark_zeno.config import DEFAULT_TOLERANCES, Tolerances
from dark_zeno.errors import (
    CompatibilityError,
    DegenerateTargetError,
    NormalizationError,
    ParallelTransportError,
    UndefinedPhaseError,
)
from dark_zeno.linalg import StateVector, as_hermitian, as_state, unitary_exp
from dark_zeno.paths import DesignedPath, ModePath, central_difference

logger = logging.getLogger(__name__)


class PrescribedTrajectory(ABC):
    @abstractmethod
    def state_at(self, t: float) -> StateVector:
        ...

    @abstractmethod
    def derivative_at(self, t: float) -> StateVector:
        ...

    @property
    @abstractmethod
    def dim(self) -> int:
        ...


@dataclass(frozen=True, eq=False)
class FunctionTrajectory(PrescribedTrajectory):
    state_fn: Callable[[float], StateVector]
    derivative_fn: Optional[Callable[[float], StateVector]] = None
    dimension: int = 0
    tol: Tolerances = DEFAULT_TOLERANCES

    @classmethod
    def free_evolution(cls, H, psi0, *, tol=DEFAULT_TOLERANCES):
        """Psi(t) = e^{-iHt} psi0, which satisfies the dark compatibility condition for any H."""
        H = as_hermitian(H, tol=tol)
        psi0 = as_state(psi0, unit=True, tol=tol)
        return cls(
            state_fn=lambda t: unitary_exp(H, t, tol=tol) @ psi0,
            derivative_fn=lambda t: -1j * (H @ (unitary_exp(H, t, tol=tol) @ psi0)),
            dimension=psi0.shape[0],
            tol=tol,
        )

    @property
    def dim(self):
        return self.dimension

    def state_at(self, t):
        return np.asarray(self.state_fn(t), dtype=np.complex128)

    def derivative_at(self, t):
        if self.derivative_fn is not None:
            return np.asarray(self.derivative_fn(t), dtype=np.complex128)
        return central_difference(self.state_at, t, self.tol.fd_step)


@dataclass(frozen=True, eq=False)
class ModeTrajectory(PrescribedTrajectory):
    """Psi(t) = sum_j sqrt(p_j) e^{-i nu_j t} |j>."""

    p: np.ndarray
    nu: np.ndarray
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        nu = np.asarray(self.nu, dtype=np.float64)
        if p.ndim != 1 or p.shape != nu.shape or p.shape[0] < 2:
            raise NormalizationError(f"p and nu must be equal-length lists of length >= 2, got {p.shape}, {nu.shape}")
        if np.any(p < 0):
            raise NormalizationError("Probabilities p_j must be non-negative")
        if abs(p.sum() - 1.0) > self.tol.probability_sum:
            raise NormalizationError(f"Probabilities must sum to 1, got {p.sum():.15g}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "nu", nu)

    @property
    def dim(self):
        return self.p.shape[0]

    @property
    def transport_defect(self):
        """sum_j p_j nu_j, zero for parallel transport."""
        return float(self.p @ self.nu)

    def state_at(self, t):
        return np.sqrt(self.p) * np.exp(-1j * self.nu * t)

    def derivative_at(self, t):
        return -1j * self.nu * self.state_at(t)


@dataclass(frozen=True, eq=False)
class DesignResult:
    path: DesignedPath
    normalization: Callable[[float], float]
    compatibility_residual: float
    grid: np.ndarray
    # N_f on the grid, and <dPsi|dPsi> + <Psi|H^2|Psi> to the -1/2 (drops the cross term)
    normalization_samples: np.ndarray
    cross_term_free_samples: np.ndarray

    def summary(self):
        return {
            "compatibility_residual": self.compatibility_residual,
            "normalization": {
                "t": [float(t) for t in self.grid],
                "N_f": [float(n) for n in self.normalization_samples],
            },
            "max_cross_term_deviation": float(np.max(np.abs(self.normalization_samples - self.cross_term_free_samples))),
        }


def _compatibility(psi, psi_dot, H):
    return abs(1j * np.vdot(psi, psi_dot) - np.vdot(psi, H @ psi))


def validate_dark_compatibility(traj: PrescribedTrajectory, H, grid, *, tol=DEFAULT_TOLERANCES) -> float:
    """max_t |i<Psi|dPsi/dt> - <Psi|H|Psi>| over the grid."""
    H = as_hermitian(H, tol=tol)
    residuals = [_compatibility(traj.state_at(t), traj.derivative_at(t), H) for t in grid]
    return float(max(residuals)) if residuals else 0.0


def design_monitored_state(traj: PrescribedTrajectory, H, grid, *, tol=DEFAULT_TOLERANCES) -> DesignResult:
    """f(t) = N_f (H Psi - i dPsi/dt) with N_f real positive."""
    H = as_hermitian(H, tol=tol)
    grid = np.asarray(grid, dtype=np.float64)
    residual = validate_dark_compatibility(traj, H, grid, tol=tol)
    if residual > tol.compatibility:
        raise CompatibilityError(
            f"Trajectory violates i<Psi|dPsi/dt> = <Psi|H|Psi> (residual {residual:.3e}); "
            "dark evolution cannot follow it"
        )

    def unnormalized(t):
        psi = traj.state_at(t)
        return H @ psi - 1j * traj.derivative_at(t), psi

    def inverse_square(t):
        v, _ = unnormalized(t)
        value = float(np.vdot(v, v).real)
        if value < tol.degenerate_target:
            raise DegenerateTargetError(
                f"H Psi - i dPsi/dt vanishes at t = {t:g}: nothing to measure, f is undefined"
            )
        return value

    def normalization(t):
        return 1.0 / math.sqrt(inverse_square(t))

    def state(t):
        v, _ = unnormalized(t)
        return v * normalization(t)

    samples = []
    cross_term_free = []
    for t in grid:
        f = state(t)
        psi = traj.state_at(t)
        overlap = abs(np.vdot(psi, f))
        if overlap > tol.unit_norm + normalization(t) * tol.compatibility:
            raise CompatibilityError(f"Designed f is not orthogonal to Psi at t = {t:g}: |<Psi|f>| = {overlap:.3e}")
        psi_dot = traj.derivative_at(t)
        samples.append(normalization(t))
        cross_term_free.append(1.0 / math.sqrt(float(np.vdot(psi_dot, psi_dot).real + np.vdot(H @ psi, H @ psi).real)))

    path = DesignedPath(state_fn=state, dimension=traj.dim, tol=tol)
    logger.info(f"Designed monitored state on {grid.shape[0]} grid points, compatibility residual {residual:.3e}")
    return DesignResult(
        path=path,
        normalization=normalization,
        compatibility_residual=residual,
        grid=grid,
        normalization_samples=np.array(samples),
        cross_term_free_samples=np.array(cross_term_free),
    )


def mode_design(p, nu, *, tol=DEFAULT_TOLERANCES) -> tuple[ModeTrajectory, ModePath]:
    """Closed form f(t) = N_f sum_j sqrt(p_j) nu_j e^{-i nu_j t} |j> for the mode trajectory."""
    traj = ModeTrajectory(p=p, nu=nu, tol=tol)
    populated = traj.nu[traj.p > 0]
    if np.unique(populated).shape[0] < 2:
        raise DegenerateTargetError("Need at least two distinct frequencies with p_j > 0 to move the state")
    if abs(traj.transport_defect) > tol.transport:
        raise ParallelTransportError(
            f"Parallel transport needs sum_j p_j nu_j = 0, got {traj.transport_defect:.3e}"
        )
    weights = np.sqrt(traj.p) * traj.nu
    amplitudes = weights / np.linalg.norm(weights)
    path = ModePath(amplitudes=amplitudes.astype(np.complex128), frequencies=traj.nu, tol=tol)
    return traj, path


def sample_trajectory(traj: PrescribedTrajectory, grid) -> np.ndarray:
    return np.array([traj.state_at(t) for t in grid])


def _consecutive_overlaps(states):
    return np.einsum("ij,ij->i", states[:-1].conj(), states[1:])


def parallel_transport_residual(traj) -> float:
    """max_i | <Psi_i|Psi_{i+1}> - ||Psi_i|| ||Psi_{i+1}|| | / dt_i."""
    states = traj.states
    if states.shape[0] < 2:
        return 0.0
    norms = np.linalg.norm(states, axis=1)
    overlaps = _consecutive_overlaps(states)
    dts = np.diff(traj.times)
    return float(np.max(np.abs(overlaps - norms[:-1] * norms[1:]) / dts))


def local_phases(traj, *, tol=DEFAULT_TOLERANCES) -> np.ndarray:
    """Arg <Psi(t_i)|Psi(t_{i+1})> for every step."""
    overlaps = _consecutive_overlaps(traj.states)
    norms = np.linalg.norm(traj.states, axis=1)
    magnitude = np.abs(overlaps) / (norms[:-1] * norms[1:])
    if np.any(magnitude < tol.overlap_floor):
        i = int(np.argmax(magnitude < tol.overlap_floor))
        raise UndefinedPhaseError(f"Consecutive states at t = {traj.times[i]:g} are orthogonal; phase undefined")
    return np.angle(overlaps)


def is_closed(traj, *, tol=DEFAULT_TOLERANCES) -> bool:
    """Last state equals the first up to a global phase."""
    first = traj.states[0] / np.linalg.norm(traj.states[0])
    last = traj.states[-1] / np.linalg.norm(traj.states[-1])
    distance = math.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(first, last))))
    return distance <= tol.closed_path


def pancharatnam_phase(traj, *, tol=DEFAULT_TOLERANCES) -> float:
    """Sum of consecutive overlap phases, closed with Arg<Psi_last|Psi_0> for loops; wrapped to (-pi, pi]."""
    if np.any(np.linalg.norm(traj.states, axis=1) < tol.overlap_floor):
        raise UndefinedPhaseError("Trajectory contains a vanishing state")
    if traj.states.shape[0] < 2:
        return 0.0
    total = float(np.sum(local_phases(traj, tol=tol)))
    if is_closed(traj, tol=tol):
        total += float(np.angle(np.vdot(traj.states[-1], traj.states[0])))
    wrapped = math.remainder(total, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True, eq=False)
class SampledStates:
    """Minimal trajectory view (times + rows of states) for phase diagnostics of prescribed targets."""

    times: np.ndarray
    states: np.ndarray


def sampled_states(traj: PrescribedTrajectory, grid) -> SampledStates:
    grid = np.asarray(grid, dtype=np.float64)
    return SampledStates(times=grid, states=sample_trajectory(traj, grid))
