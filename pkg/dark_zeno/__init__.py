"""Dark evolution of quantum systems under negative-result measurements."""
from dark_zeno.config import DEFAULT_TOLERANCES, Tolerances, get_profile
from dark_zeno.errors import ConfigurationError, DarkZenoError, PhysicsValidationError
from dark_zeno.runner import RunReport, run_scenario, run_sweep

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOLERANCES",
    "ConfigurationError",
    "DarkZenoError",
    "PhysicsValidationError",
    "RunReport",
    "Tolerances",
    "get_profile",
    "run_scenario",
    "run_sweep",
]
