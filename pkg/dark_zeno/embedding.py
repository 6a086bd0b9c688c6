"""Dark evolution without measurements: a large energy shift E on |f(t)>.

The model Hamiltonian E|f(t)><f(t)| keeps a state that starts orthogonal to
f(0) almost orthogonal to f(t); the leftover amplitude alpha(t) = <f|psi_s>
is of order 1/E and the dark component approaches the Zeno dynamics.
"""
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.ndimage import uniform_filter1d

from dark_zeno.config import DEFAULT_TOLERANCES
from dark_zeno.dynamics import DarkTrajectory, check_initial_orthogonality, time_grid
from dark_zeno.errors import PhysicsValidationError, RegimeWarning, ResolutionError
from dark_zeno.linalg import as_state, unitary_exp
from dark_zeno.paths import MonitoredPath, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddedTrajectory:
    times: np.ndarray
    full_states: np.ndarray
    dark_states: np.ndarray
    alpha: np.ndarray
    orthogonality_residual: np.ndarray
    energy: float
    step: float

    def __len__(self):
        return self.times.shape[0]

    @property
    def dim(self):
        return self.full_states.shape[1]

    def decomposition_residual(self) -> float:
        """max_t | ||Psi||^2 + |alpha|^2 - 1 |."""
        total = np.linalg.norm(self.dark_states, axis=1) ** 2 + np.abs(self.alpha) ** 2
        return float(np.max(np.abs(total - 1.0)))

    def to_frame(self) -> pd.DataFrame:
        norms = np.linalg.norm(self.dark_states, axis=1)
        columns = {"t": self.times}
        for j in range(self.dim):
            columns[f"re_psi_{j}"] = self.dark_states[:, j].real
        for j in range(self.dim):
            columns[f"im_psi_{j}"] = self.dark_states[:, j].imag
        columns["norm"] = norms
        columns["survival_prob"] = norms**2
        columns["orth_residual"] = self.orthogonality_residual
        columns["re_alpha"] = self.alpha.real
        columns["im_alpha"] = self.alpha.imag
        return pd.DataFrame(columns)


def embedded_run(psi0, path: MonitoredPath, E, T, dt, *, tol=DEFAULT_TOLERANCES) -> EmbeddedTrajectory:
    """Integrate i dpsi_s/dt = E |f><f|psi_s> with the exponential midpoint propagator."""
    psi = as_state(psi0, unit=True, tol=tol)
    if E < 0:
        raise ResolutionError(f"Energy shift must be non-negative, got E={E}")
    steps, dt = time_grid(T, dt)
    if E > 0 and dt > tol.embedding_dt_factor / E * (1.0 + 1e-12):
        raise ResolutionError(
            f"dt={dt:g} does not resolve the energy scale: need dt <= {tol.embedding_dt_factor:g}/E = "
            f"{tol.embedding_dt_factor / E:.3g}"
        )
    check_initial_orthogonality(psi, (path.state(0.0),), tol)

    n = psi.shape[0]
    times = dt * np.arange(steps + 1)
    full = np.empty((steps + 1, n), dtype=np.complex128)
    dark = np.empty_like(full)
    alpha = np.empty(steps + 1, dtype=np.complex128)
    residuals = np.empty(steps + 1)

    def record(k, state):
        f = path.state(times[k])
        amplitude = np.vdot(f, state)
        full[k] = state
        alpha[k] = amplitude
        dark[k] = state - amplitude * f
        residuals[k] = abs(np.vdot(f, dark[k]))

    record(0, psi)
    for k in range(steps):
        f_mid = path.state(times[k] + 0.5 * dt)
        psi = unitary_exp(E * np.outer(f_mid, f_mid.conj()), dt, tol=tol) @ psi
        record(k + 1, psi)

    logger.info(
        f"Embedded run: E={E:g}, T={T:g}, dt={dt:g}, steps={steps}, max |alpha|={np.max(np.abs(alpha)):.3e}"
    )
    return EmbeddedTrajectory(
        times=times,
        full_states=full,
        dark_states=dark,
        alpha=alpha,
        orthogonality_residual=residuals,
        energy=float(E),
        step=dt,
    )


def dark_deviation(embedded: EmbeddedTrajectory, dark: DarkTrajectory) -> float:
    """max_t ||Psi_embedded(t) - Psi_dark(t)|| on a shared time grid."""
    if len(embedded) != len(dark) or not np.allclose(embedded.times, dark.times, rtol=0.0, atol=1e-12):
        raise ValueError("Embedded and dark trajectories must share the same time grid")
    return float(np.max(np.linalg.norm(embedded.dark_states - dark.states, axis=1)))


def adiabatic_alpha(traj: EmbeddedTrajectory, path: MonitoredPath) -> np.ndarray:
    """i<f|dPsi/dt>/E, evaluated as -i<df/dt|Psi>/E (equal while Psi is orthogonal to f)."""
    if traj.energy <= 0:
        raise PhysicsValidationError("The adiabatic amplitude needs E > 0")
    values = np.empty(len(traj), dtype=np.complex128)
    for k, (t, psi) in enumerate(zip(traj.times, traj.dark_states)):
        _, fdot = evaluate(path, t)
        values[k] = -1j * np.vdot(fdot, psi) / traj.energy
    return values


def _window(traj, periods):
    width = 2.0 * math.pi * periods / traj.energy
    size = int(round(width / traj.step))
    size += 1 - size % 2
    if size >= len(traj):
        raise ResolutionError(
            f"Run of {len(traj)} steps is shorter than the {size}-step filter window at E={traj.energy:g}"
        )
    return size


def filtered_alpha(traj: EmbeddedTrajectory, periods=None, *, tol=DEFAULT_TOLERANCES):
    """Boxcar average of alpha over `periods` oscillations at frequency E.

    Returns (interior slice, averaged series); values outside the slice are
    affected by the edges and should be ignored.
    """
    if traj.energy <= 0:
        raise PhysicsValidationError("Filtering fast oscillations needs E > 0")
    size = _window(traj, tol.filter_periods if periods is None else periods)
    averaged = uniform_filter1d(traj.alpha.real, size, mode="nearest") + 1j * uniform_filter1d(
        traj.alpha.imag, size, mode="nearest"
    )
    half = size // 2
    return slice(half, len(traj) - half), averaged


def adiabatic_alpha_check(traj: EmbeddedTrajectory, path: MonitoredPath, *, tol=DEFAULT_TOLERANCES) -> float:
    """max_t |<alpha>(t) - i<f|dPsi/dt>/E| after averaging out the oscillation at frequency E."""
    if traj.energy <= 0:
        raise PhysicsValidationError("The adiabatic check needs E > 0")
    speeds = []
    for t, psi in zip(traj.times, traj.dark_states):
        f, fdot = evaluate(path, t)
        speeds.append(max(abs(np.vdot(fdot, psi)), abs(np.vdot(f, fdot))))
    speed = max(speeds)
    if speed > 0 and traj.energy / speed < tol.adiabatic_ratio:
        message = (
            f"E={traj.energy:g} is only {traj.energy / speed:.3g} times the path speed; "
            "the adiabatic solution is not expected to hold"
        )
        logger.warning(message)
        warnings.warn(message, RegimeWarning, stacklevel=2)

    interior, averaged = filtered_alpha(traj, tol=tol)
    target = adiabatic_alpha(traj, path)
    return float(np.max(np.abs(averaged[interior] - target[interior])))
