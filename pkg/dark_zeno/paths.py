"""The monitored state |f(t)> and its derivative, in four representations.

GeneratorPath   f(t) = e^{-iKt} f0
ModePath        f(t) = sum_j a_j e^{-i Omega_j t} |k_j>
SampledPath     unit samples on a uniform grid, slerp between them,
                4th-order finite differences for the derivative
DesignedPath    closures produced by the inverse-design module
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Optional

import numpy as np

from dark_zeno.config import DEFAULT_TOLERANCES, Tolerances
from dark_zeno.errors import DomainError, NormalizationError, UnsupportedVariantError
from dark_zeno.linalg import (
    EigenDecomposition,
    StateVector,
    as_hermitian,
    as_state,
    hermitian_eigendecomposition,
)

logger = logging.getLogger(__name__)

# 4th-order first-derivative stencils, in units of 1/(12 h)
CENTRAL_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
FORWARD_STENCIL = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
OFFSET_STENCIL = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def tangent(f, fdot) -> StateVector:
    """Remove the norm-changing part Re<f|fdot> f from a derivative."""
    return fdot - np.vdot(f, fdot).real * f


def _renormalize(f, tol):
    n = np.linalg.norm(f)
    if abs(n - 1.0) > tol.renormalize_drift:
        return f / n
    return f


def central_difference(fn, t, h) -> StateVector:
    """4th-order central derivative of a vector-valued function at t."""
    samples = [fn(t + k * h) for k in (-2, -1, 1, 2)]
    weights = (1.0, -8.0, 8.0, -1.0)
    return sum(w * s for w, s in zip(weights, samples)) / (12.0 * h)


def stencil_derivatives(samples, h) -> np.ndarray:
    """Derivatives at every node of a uniform grid (rows are samples).

    Central 5-point stencil in the interior, one-sided 4th-order stencils on
    the two outermost nodes at each end.
    """
    n = samples.shape[0]
    if n < 5:
        raise DomainError(f"Need at least 5 samples for 4th-order derivatives, got {n}")
    d = np.empty_like(samples)
    for i in range(2, n - 2):
        d[i] = CENTRAL_STENCIL @ samples[i - 2:i + 3]
    d[0] = FORWARD_STENCIL @ samples[0:5]
    d[1] = OFFSET_STENCIL @ samples[0:5]
    tail = samples[n - 5:][::-1]
    d[n - 1] = -(FORWARD_STENCIL @ tail)
    d[n - 2] = -(OFFSET_STENCIL @ tail)
    return d / (12.0 * h)


class MonitoredPath(ABC):
    @abstractmethod
    def evaluate(self, t: float) -> tuple[StateVector, StateVector]:
        """Return (f(t), fdot(t))."""

    @property
    @abstractmethod
    def dim(self) -> int:
        ...

    def state(self, t):
        return self.evaluate(t)[0]


@dataclass(frozen=True, eq=False)
class GeneratorPath(MonitoredPath):
    K: np.ndarray
    f0: np.ndarray
    tol: Tolerances = DEFAULT_TOLERANCES
    _eig: EigenDecomposition = field(init=False, repr=False, compare=False)
    _f0_modes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        K = as_hermitian(self.K, tol=self.tol)
        f0 = as_state(self.f0, unit=True, tol=self.tol)
        if K.shape[0] != f0.shape[0]:
            raise NormalizationError(f"K is {K.shape[0]}-dimensional but f0 has {f0.shape[0]} components")
        eig = hermitian_eigendecomposition(K, tol=self.tol)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "_eig", eig)
        object.__setattr__(self, "_f0_modes", eig.eigenvectors.conj().T @ f0)

    @property
    def dim(self):
        return self.f0.shape[0]

    @property
    def frequencies(self):
        return self._eig.eigenvalues

    def evaluate(self, t):
        phases = np.exp(-1j * self._eig.eigenvalues * t) * self._f0_modes
        f = _renormalize(self._eig.eigenvectors @ phases, self.tol)
        fdot = self._eig.eigenvectors @ (-1j * self._eig.eigenvalues * phases)
        return f, fdot

    def to_mode_path(self):
        """Equivalent ModePath over the eigenbasis of K, a_j = <k_j|f0>."""
        return ModePath(
            amplitudes=self._f0_modes,
            frequencies=self._eig.eigenvalues,
            modes=self._eig.eigenvectors,
            tol=self.tol,
        )


@dataclass(frozen=True, eq=False)
class ModePath(MonitoredPath):
    amplitudes: np.ndarray
    frequencies: np.ndarray
    # columns are the orthonormal modes |k_j>; defaults to the standard basis
    modes: Optional[np.ndarray] = None
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        omega = np.asarray(self.frequencies, dtype=np.float64)
        if a.ndim != 1 or omega.shape != a.shape:
            raise NormalizationError(
                f"Amplitudes and frequencies must be equal-length lists, got {a.shape} and {omega.shape}"
            )
        modes = np.eye(a.shape[0], dtype=np.complex128) if self.modes is None else np.asarray(self.modes, dtype=np.complex128)
        if modes.ndim != 2 or modes.shape[1] != a.shape[0] or modes.shape[0] < 2:
            raise NormalizationError(f"Modes must be an N x {a.shape[0]} matrix of columns, got {modes.shape}")
        gram = modes.conj().T @ modes
        if np.max(np.abs(gram - np.eye(a.shape[0]))) > self.tol.unit_norm:
            raise NormalizationError("Modes are not orthonormal")
        total = float(np.sum(np.abs(a) ** 2))
        if abs(total - 1.0) > self.tol.unit_norm:
            raise NormalizationError(f"Mode amplitudes must satisfy sum |a_j|^2 = 1, got {total:.15g}")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "frequencies", omega)
        object.__setattr__(self, "modes", modes)

    @property
    def dim(self):
        return self.modes.shape[0]

    def evaluate(self, t):
        phases = self.amplitudes * np.exp(-1j * self.frequencies * t)
        f = _renormalize(self.modes @ phases, self.tol)
        fdot = self.modes @ (-1j * self.frequencies * phases)
        return f, fdot

    def to_generator_path(self):
        """GeneratorPath with K = sum_j Omega_j |k_j><k_j| (zero outside the modes)."""
        K = (self.modes * self.frequencies) @ self.modes.conj().T
        f0 = self.modes @ self.amplitudes
        return GeneratorPath(K=0.5 * (K + K.conj().T), f0=f0, tol=self.tol)


@dataclass(frozen=True, eq=False)
class SampledPath(MonitoredPath):
    times: np.ndarray
    samples: np.ndarray
    tol: Tolerances = DEFAULT_TOLERANCES
    _derivatives: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        samples = np.asarray(self.samples, dtype=np.complex128)
        if times.ndim != 1 or samples.ndim != 2 or samples.shape[0] != times.shape[0]:
            raise NormalizationError(
                f"Need one sample row per time, got {samples.shape} samples for {times.shape} times"
            )
        if samples.shape[0] < 5:
            raise DomainError(f"Need at least 5 samples, got {samples.shape[0]}")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise DomainError("Sample times must be strictly ascending")
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
            raise DomainError("Sample times must form a uniform grid")
        norms = np.linalg.norm(samples, axis=1)
        if np.max(np.abs(norms - 1.0)) > self.tol.unit_norm:
            raise NormalizationError("Every sample must be a unit state")
        h = float(steps[0])
        derivatives = np.array([tangent(s, d) for s, d in zip(samples, stencil_derivatives(samples, h))])
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "_derivatives", derivatives)

    @classmethod
    def from_path(cls, path, t0, t1, n):
        """Sample another path on n uniformly spaced times in [t0, t1]."""
        times = np.linspace(t0, t1, n)
        return cls(times=times, samples=np.array([path.state(t) for t in times]), tol=path.tol)

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def step(self):
        return float(self.times[1] - self.times[0])

    def evaluate(self, t):
        t0, t1 = float(self.times[0]), float(self.times[-1])
        span = 1e-12 * max(1.0, abs(t0), abs(t1))
        if t < t0 - span or t > t1 + span:
            raise DomainError(f"t = {t} lies outside the sampled range [{t0}, {t1}]")
        t = min(max(t, t0), t1)
        position = (t - t0) / self.step
        i = min(int(np.floor(position)), self.times.shape[0] - 2)
        u = position - i
        if u <= 1e-12:
            return self.samples[i], self._derivatives[i]
        if u >= 1.0 - 1e-12:
            return self.samples[i + 1], self._derivatives[i + 1]
        # slerp and the linear blend of fdot are 2nd order here; the stencil order holds on nodes only
        f = _slerp(self.samples[i], self.samples[i + 1], u)
        fdot = (1.0 - u) * self._derivatives[i] + u * self._derivatives[i + 1]
        return f, tangent(f, fdot)


def _slerp(s0, s1, u):
    """Great-circle interpolation on the unit sphere, phase-aligned, hitting both end points."""
    overlap = np.vdot(s0, s1)
    phase = np.angle(overlap) if abs(overlap) > 0 else 0.0
    aligned = s1 * np.exp(-1j * phase)
    omega = math.acos(min(1.0, abs(overlap)))
    if omega < 1e-8:
        f = (1.0 - u) * s0 + u * aligned
    else:
        f = (math.sin((1.0 - u) * omega) * s0 + math.sin(u * omega) * aligned) / math.sin(omega)
    f = f * np.exp(1j * u * phase)
    return f / np.linalg.norm(f)


@dataclass(frozen=True, eq=False)
class DesignedPath(MonitoredPath):
    """Path given by closures; the derivative falls back to 4th-order differences."""

    state_fn: Callable[[float], StateVector]
    derivative_fn: Optional[Callable[[float], StateVector]] = None
    dimension: int = 0
    tol: Tolerances = DEFAULT_TOLERANCES

    @property
    def dim(self):
        return self.dimension

    def evaluate(self, t):
        f = _renormalize(np.asarray(self.state_fn(t), dtype=np.complex128), self.tol)
        if self.derivative_fn is not None:
            fdot = np.asarray(self.derivative_fn(t), dtype=np.complex128)
        else:
            fdot = central_difference(self.state_fn, t, self.tol.fd_step)
        return f, tangent(f, fdot)


def evaluate(path: MonitoredPath, t: float):
    return path.evaluate(t)


@dataclass(frozen=True)
class PathPeriod:
    """Smallest period of a cyclic path, or the aperiodic/stationary marker.

    ``global_phase`` is the phase picked up over one period:
    f(t + T) = e^{i global_phase} f(t).
    """

    period: Optional[float] = None
    global_phase: float = 0.0
    stationary: bool = False

    @property
    def is_periodic(self):
        return self.period is not None

    def __str__(self):
        if self.stationary:
            return "stationary"
        return "aperiodic" if self.period is None else f"{self.period:.17g}"


APERIODIC = PathPeriod()


def _rational(r, tol):
    """Best rational p/q (q <= cap) with |q r - p| <= tol, else None."""
    frac = Fraction(r).limit_denominator(tol.period_max_denominator)
    if abs(frac.denominator * r - frac.numerator) <= tol.period:
        return frac
    return None


def period_of(path: MonitoredPath, *, tol=None) -> PathPeriod:
    """Smallest T > 0 with every (Omega_i - Omega_j) T in 2 pi Z, quotienting the global phase."""
    tol = tol or path.tol
    if isinstance(path, GeneratorPath):
        omegas = path.frequencies
    elif isinstance(path, ModePath):
        omegas = path.frequencies
    else:
        raise UnsupportedVariantError(f"period_of needs a generator or mode path, got {type(path).__name__}")

    omegas = np.asarray(omegas, dtype=np.float64)
    reference = float(omegas[0])
    differences = omegas[1:] - reference
    scale = max(1.0, float(np.max(np.abs(omegas))))
    nonzero = differences[np.abs(differences) > tol.period * scale]
    if nonzero.size == 0:
        return PathPeriod(stationary=True)

    base = float(nonzero[np.argmin(np.abs(nonzero))])
    fractions = []
    for d in nonzero:
        frac = _rational(float(d) / base, tol)
        if frac is None:
            logger.debug(f"Frequency ratio {d / base!r} is not commensurate")
            return APERIODIC
        fractions.append(frac)

    lcm_denominator = reduce(math.lcm, (f.denominator for f in fractions), 1)
    numerators = [abs(f.numerator * lcm_denominator // f.denominator) for f in fractions]
    divisor = reduce(math.gcd, numerators)
    fundamental = abs(base) * divisor / lcm_denominator
    period = 2.0 * math.pi / fundamental

    cycles = differences * period / (2.0 * math.pi)
    if np.max(np.abs(cycles - np.round(cycles))) > tol.period * max(1.0, float(np.max(np.abs(cycles)))):
        return APERIODIC
    global_phase = math.remainder(-reference * period, 2.0 * math.pi)
    return PathPeriod(period=period, global_phase=global_phase)
