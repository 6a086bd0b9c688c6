"""Exception hierarchy. Configuration problems exit with 2, physics violations with 3."""

EXIT_OK = 0
EXIT_CONFIGURATION = 2
EXIT_PHYSICS = 3


class DarkZenoError(Exception):
    exit_code = 1


class ConfigurationError(DarkZenoError):
    """Scenario file or command line could not be turned into a valid run."""

    exit_code = EXIT_CONFIGURATION


class PhysicsValidationError(DarkZenoError):
    """Inputs are well formed but violate a physical precondition."""

    exit_code = EXIT_PHYSICS


class HermiticityError(PhysicsValidationError):
    pass


class NormalizationError(PhysicsValidationError):
    pass


class SetupError(PhysicsValidationError):
    """Initial state is not orthogonal to the monitored state."""


class CommutatorError(PhysicsValidationError):
    """[K, H] != 0: no closed form, integrate with continuous_dark_run instead."""


class CompatibilityError(PhysicsValidationError):
    """Prescribed trajectory violates i<Psi|dPsi/dt> = <Psi|H|Psi>."""


class ParallelTransportError(CompatibilityError):
    pass


class DegenerateTargetError(PhysicsValidationError):
    pass


class PathError(PhysicsValidationError):
    pass


class DomainError(PhysicsValidationError):
    pass


class UnsupportedVariantError(PhysicsValidationError):
    pass


class ResolutionError(PhysicsValidationError):
    pass


class UndefinedPhaseError(PhysicsValidationError):
    pass


class ConsistencyError(PhysicsValidationError):
    pass


class RegimeWarning(UserWarning):
    """Result returned outside the regime where it is meaningful."""


def exit_code_for(exc):
    return getattr(exc, "exit_code", 1)
