"""Dark evolution: sequential negative-result measurements and their continuous limit."""
import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import pandas as pd

from dark_zeno.config import DEFAULT_TOLERANCES
from dark_zeno.errors import PathError, SetupError
from dark_zeno.linalg import (
    Operator,
    StateVector,
    as_hermitian,
    as_state,
    hermitize,
    projector_from_state,
    unitary_exp,
)
from dark_zeno.paths import MonitoredPath, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DarkTrajectory:
    times: np.ndarray
    # rows are states; discrete runs keep the raw sub-normalized vectors
    states: np.ndarray
    norms: np.ndarray
    survival_probability: np.ndarray
    orthogonality_residual: np.ndarray
    mode: Literal["discrete", "continuous", "comoving", "closed_form"]
    step: float

    def __len__(self):
        return self.times.shape[0]

    @property
    def dim(self):
        return self.states.shape[1]

    @property
    def final_state(self) -> StateVector:
        return self.states[-1]

    def normalized_states(self) -> np.ndarray:
        return self.states / self.norms[:, np.newaxis]

    def prefix(self, m):
        """The first m steps (m + 1 time points)."""
        return DarkTrajectory(
            times=self.times[: m + 1],
            states=self.states[: m + 1],
            norms=self.norms[: m + 1],
            survival_probability=self.survival_probability[: m + 1],
            orthogonality_residual=self.orthogonality_residual[: m + 1],
            mode=self.mode,
            step=self.step,
        )

    def to_frame(self) -> pd.DataFrame:
        columns = {"t": self.times}
        for j in range(self.dim):
            columns[f"re_psi_{j}"] = self.states[:, j].real
        for j in range(self.dim):
            columns[f"im_psi_{j}"] = self.states[:, j].imag
        columns["norm"] = self.norms
        columns["survival_prob"] = self.survival_probability
        columns["orth_residual"] = self.orthogonality_residual
        return pd.DataFrame(columns)


def check_initial_orthogonality(psi0, states, tol):
    """Accept psi0 when it is orthogonal to at least one of the given monitored states."""
    overlap = min(abs(np.vdot(f, psi0)) for f in states)
    if overlap > tol.orthogonality_setup:
        raise SetupError(
            f"Initial state must be orthogonal to the monitored state: |<f|psi0>| = {overlap:.3e}"
        )


def discrete_dark_step(psi, f_next, H, tau, *, tol=DEFAULT_TOLERANCES) -> StateVector:
    """(I - |f_next><f_next|) e^{-iH tau} psi, left unnormalized."""
    psi = as_state(psi, tol=tol)
    P = projector_from_state(f_next, tol=tol)
    return P @ (unitary_exp(H, tau, tol=tol) @ psi)


def discrete_dark_run(psi0, path: MonitoredPath, H, tau, M, *, tol=DEFAULT_TOLERANCES) -> DarkTrajectory:
    """Apply M measurement steps at t = n tau, n = 1..M, sampling f_n = f(n tau)."""
    psi = as_state(psi0, unit=True, tol=tol)
    H = as_hermitian(H, tol=tol)
    if tau <= 0 or M < 1:
        raise ValueError(f"Need tau > 0 and M >= 1, got tau={tau}, M={M}")

    f_start = path.state(0.0)
    f_first = path.state(tau)
    check_initial_orthogonality(psi, (f_start, f_first), tol)

    U = unitary_exp(H, tau, tol=tol)
    times = tau * np.arange(M + 1)
    states = np.empty((M + 1, psi.shape[0]), dtype=np.complex128)
    residuals = np.empty(M + 1)
    states[0] = psi
    residuals[0] = abs(np.vdot(f_start, psi))
    for n in range(1, M + 1):
        f = path.state(times[n])
        psi = U @ psi
        psi = psi - f * np.vdot(f, psi)
        states[n] = psi
        residuals[n] = abs(np.vdot(f, psi))

    norms = np.linalg.norm(states, axis=1)
    logger.info(f"Discrete dark run: tau={tau:g}, M={M}, survival probability {norms[-1] ** 2:.12g}")
    return DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=residuals,
        mode="discrete",
        step=float(tau),
    )


def effective_hamiltonian(H, f, fdot, *, tol=DEFAULT_TOLERANCES) -> Operator:
    """H_D = P H P + i(|fdot><f| - |f><fdot|), P = I - |f><f|."""
    f = as_state(f, unit=True, tol=tol)
    fdot = np.asarray(fdot, dtype=np.complex128)
    drift = abs(np.vdot(f, fdot).real)
    if drift > tol.path_norm_drift:
        raise PathError(f"Path derivative changes the norm of f: Re<f|fdot> = {drift:.3e}")
    P = projector_from_state(f, tol=tol)
    H = as_hermitian(H, tol=tol)
    return hermitize(P @ H @ P + 1j * (np.outer(fdot, f.conj()) - np.outer(f, fdot.conj())))


def measurement_limit_generator(H, f, fdot, *, tol=DEFAULT_TOLERANCES) -> Operator:
    """P H P + i dP/dt: the non-Hermitian generator of the frequent-measurement limit.

    Agrees with effective_hamiltonian on every state orthogonal to f.
    """
    f = as_state(f, unit=True, tol=tol)
    fdot = np.asarray(fdot, dtype=np.complex128)
    P = projector_from_state(f, tol=tol)
    P_dot = -(np.outer(fdot, f.conj()) + np.outer(f, fdot.conj()))
    return P @ as_hermitian(H, tol=tol) @ P + 1j * P_dot


def orthogonality_decay_rate(f, fdot) -> complex:
    """Rate r in d/dt <f|Psi> = r <f|Psi>; purely imaginary for unit-norm paths."""
    return -complex(np.vdot(f, fdot))


def time_grid(T, dt):
    if T <= 0 or dt <= 0:
        raise ValueError(f"Need T > 0 and dt > 0, got T={T}, dt={dt}")
    steps = max(1, int(round(T / dt)))
    return steps, T / steps


def _propagate(psi, generator, steps, dt, observe, tol):
    """Exponential midpoint chain: psi(t + dt) = exp(-i G(t + dt/2) dt) psi(t)."""
    states = np.empty((steps + 1, psi.shape[0]), dtype=np.complex128)
    residuals = np.empty(steps + 1)
    times = dt * np.arange(steps + 1)
    states[0] = psi
    residuals[0] = observe(0.0, psi)
    for n in range(steps):
        psi = unitary_exp(generator(times[n] + 0.5 * dt), dt, tol=tol) @ psi
        states[n + 1] = psi
        residuals[n + 1] = observe(times[n + 1], psi)
    return times, states, residuals


def continuous_dark_run(psi0, path: MonitoredPath, H, T, dt, *, tol=DEFAULT_TOLERANCES) -> DarkTrajectory:
    """Integrate i dPsi/dt = H_D(t) Psi with the exponential midpoint propagator."""
    psi = as_state(psi0, unit=True, tol=tol)
    H = as_hermitian(H, tol=tol)
    check_initial_orthogonality(psi, (path.state(0.0),), tol)
    steps, dt = time_grid(T, dt)

    def generator(t):
        f, fdot = evaluate(path, t)
        return effective_hamiltonian(H, f, fdot, tol=tol)

    times, states, residuals = _propagate(
        psi, generator, steps, dt, lambda t, state: abs(np.vdot(path.state(t), state)), tol
    )
    norms = np.linalg.norm(states, axis=1)
    logger.info(
        f"Continuous dark run: T={T:g}, dt={dt:g}, steps={steps}, "
        f"max |1-||psi|||={np.max(np.abs(norms - 1.0)):.3e}, max orth residual={np.max(residuals):.3e}"
    )
    return DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=residuals,
        mode="continuous",
        step=dt,
    )


def comoving_hamiltonian(H, K, f0, t, *, tol=DEFAULT_TOLERANCES) -> Operator:
    """P(0) (e^{iKt} H e^{-iKt} - K) P(0)."""
    H = as_hermitian(H, tol=tol)
    K = as_hermitian(K, tol=tol)
    P0 = projector_from_state(f0, tol=tol)
    rotate = unitary_exp(K, -t, tol=tol)
    return hermitize(P0 @ (rotate @ H @ rotate.conj().T - K) @ P0)


def comoving_run(psi0, H, K, f0, T, dt, *, tol=DEFAULT_TOLERANCES) -> DarkTrajectory:
    """Time-ordered propagation in the frame where f is stationary.

    Works for any [K, H]; lab-frame states are e^{-iKt} times the stored ones.
    """
    psi = as_state(psi0, unit=True, tol=tol)
    f0 = as_state(f0, unit=True, tol=tol)
    check_initial_orthogonality(psi, (f0,), tol)
    steps, dt = time_grid(T, dt)
    times, states, residuals = _propagate(
        psi,
        lambda t: comoving_hamiltonian(H, K, f0, t, tol=tol),
        steps,
        dt,
        lambda t, state: abs(np.vdot(f0, state)),
        tol,
    )
    norms = np.linalg.norm(states, axis=1)
    return DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=residuals,
        mode="comoving",
        step=dt,
    )


def to_lab_frame(traj: DarkTrajectory, K, *, tol=DEFAULT_TOLERANCES) -> np.ndarray:
    """Rows e^{-iKt} psi_comoving(t)."""
    return np.array([unitary_exp(K, t, tol=tol) @ psi for t, psi in zip(traj.times, traj.states)])


def max_normalized_gap(discrete: DarkTrajectory, continuous: DarkTrajectory) -> float:
    """max_t || Psi_discrete / ||Psi_discrete|| - Psi_continuous || at the discrete times."""
    stride = discrete.step / continuous.step
    if abs(stride - round(stride)) > 1e-6 or round(stride) < 1:
        raise ValueError(f"Continuous step {continuous.step} does not divide tau = {discrete.step}")
    stride = int(round(stride))
    reference = continuous.states[::stride][: len(discrete)]
    if reference.shape[0] < len(discrete):
        raise ValueError("Continuous run is shorter than the discrete run")
    return float(np.max(np.linalg.norm(discrete.normalized_states() - reference, axis=1)))


def survival_deficit(traj: DarkTrajectory) -> float:
    """1 - ||Psi_M||^2, the probability that some measurement fired."""
    return float(1.0 - traj.survival_probability[-1])


def steps_for(T, tau):
    """Measurement count that covers [0, T] with interval tau."""
    return max(1, int(math.floor(T / tau + 0.5)))
