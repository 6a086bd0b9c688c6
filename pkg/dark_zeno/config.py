"""Tolerances and run-time settings shared by every module."""
import logging
import os
from dataclasses import dataclass, replace

from dark_zeno.errors import ConfigurationError

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "ZENO_DARK_THREADS"


@dataclass(frozen=True)
class Tolerances:
    # core linear algebra
    hermiticity: float = 1e-12
    unit_norm: float = 1e-10
    subnormal_slack: float = 1e-12
    projector: float = 1e-12
    reconstruction: float = 1e-10
    phase_significance: float = 1e-10
    renormalize_drift: float = 1e-12

    # monitored paths
    path_norm_drift: float = 1e-8
    period: float = 1e-9
    period_max_denominator: int = 10**6
    mode_population: float = 1e-10
    fd_step: float = 1e-3

    # dark dynamics
    orthogonality_setup: float = 1e-8
    commutator: float = 1e-10
    consistency: float = 1e-12

    # inverse design
    compatibility: float = 1e-8
    transport: float = 1e-12
    probability_sum: float = 1e-12
    degenerate_target: float = 1e-20
    closed_path: float = 1e-6
    overlap_floor: float = 1e-12

    # energy embedding
    embedding_dt_factor: float = 0.1
    filter_periods: float = 4.0
    adiabatic_ratio: float = 10.0


DEFAULT_TOLERANCES = Tolerances()

PROFILES = {
    "default": DEFAULT_TOLERANCES,
    "strict": replace(
        DEFAULT_TOLERANCES,
        orthogonality_setup=1e-10,
        compatibility=1e-10,
        path_norm_drift=1e-10,
        period=1e-11,
        closed_path=1e-8,
    ),
}


def get_profile(name):
    """Return the tolerance record registered under ``name``."""
    try:
        return PROFILES[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown tolerance profile '{name}' (expected one of {sorted(PROFILES)})"
        )


def worker_count():
    """Size of the sweep worker pool, capped by ZENO_DARK_THREADS when set."""
    default = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV_VAR)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={raw!r}")
        return default
    if value < 1:
        logger.warning(f"Ignoring non-positive {THREADS_ENV_VAR}={raw!r}")
        return default
    return value
