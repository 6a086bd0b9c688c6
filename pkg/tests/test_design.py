import math

import numpy as np
import pytest

from dark_zeno.design import (
    FunctionTrajectory,
    ModeTrajectory,
    SampledStates,
    design_monitored_state,
    is_closed,
    local_phases,
    mode_design,
    pancharatnam_phase,
    parallel_transport_residual,
    sampled_states,
    validate_dark_compatibility,
)
from dark_zeno.dynamics import continuous_dark_run
from dark_zeno.errors import (
    CompatibilityError,
    DegenerateTargetError,
    NormalizationError,
    ParallelTransportError,
    UndefinedPhaseError,
)
from dark_zeno.linalg import fidelity, random_hermitian, random_state

P = [0.5, 0.25, 0.25]
NU = [0.0, 2.0, -2.0]


def _qubit_loop(theta, steps):
    phi = np.linspace(0.0, 2.0 * math.pi, steps + 1)
    states = np.stack(
        [np.full(phi.shape, math.cos(theta / 2)), math.sin(theta / 2) * np.exp(1j * phi)], axis=1
    ).astype(np.complex128)
    return SampledStates(times=phi, states=states)


def test_mode_design_amplitudes():
    traj, path = mode_design(P, NU)
    assert traj.transport_defect == 0.0
    assert np.allclose(path.amplitudes, [0.0, 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)], atol=1e-15)
    assert np.array_equal(path.frequencies, NU)


def test_mode_design_rejects_transport_violation():
    with pytest.raises(ParallelTransportError, match="sum_j p_j nu_j"):
        mode_design(P, [1.0, 2.0, -2.0])


def test_mode_design_rejects_single_frequency():
    with pytest.raises(DegenerateTargetError):
        mode_design(P, [1.0, 1.0, 1.0])


@pytest.mark.parametrize(
    "p, nu",
    [([0.5, 0.5, 0.1], NU), ([1.5, -0.25, -0.25], NU), ([0.5, 0.5], NU), ([1.0], [0.0])],
)
def test_mode_trajectory_validation(p, nu):
    with pytest.raises(NormalizationError):
        ModeTrajectory(p=p, nu=nu)


def test_general_design_agrees_with_mode_design():
    traj, path = mode_design(P, NU)
    grid = np.linspace(0.0, 3.0, 31)
    result = design_monitored_state(traj, np.zeros((3, 3)), grid)
    assert result.compatibility_residual <= 1e-15
    for t in grid:
        f = result.path.state(t)
        assert fidelity(f, path.state(t)) == pytest.approx(1.0, abs=1e-12)
        assert result.normalization(t) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
    assert np.allclose(result.normalization_samples, result.cross_term_free_samples, atol=1e-12)


def test_designed_state_is_orthogonal_to_target():
    traj = ModeTrajectory(p=P, nu=NU)
    # <Psi|H|Psi> = 0 keeps the trajectory compatible
    H = np.diag([0.1, -0.1, -0.1])
    result = design_monitored_state(traj, H, np.linspace(0.0, 2.0, 21))
    for t in result.grid:
        assert abs(np.vdot(traj.state_at(t), result.path.state(t))) <= 1e-12
    summary = result.summary()
    assert len(summary["normalization"]["t"]) == 21


def test_free_evolution_has_nothing_to_measure(rng):
    H = random_hermitian(3, rng)
    traj = FunctionTrajectory.free_evolution(H, random_state(3, rng))
    assert validate_dark_compatibility(traj, H, [0.0, 0.5, 1.0]) <= 1e-12
    with pytest.raises(DegenerateTargetError):
        design_monitored_state(traj, H, [0.0, 0.5, 1.0])


def test_incompatible_trajectory_rejected():
    traj = ModeTrajectory(p=P, nu=[1.0, 2.0, -2.0])
    with pytest.raises(CompatibilityError, match="cannot follow"):
        design_monitored_state(traj, np.zeros((3, 3)), np.linspace(0.0, 1.0, 5))


def test_function_trajectory_falls_back_to_finite_differences():
    target = ModeTrajectory(p=P, nu=NU)
    traj = FunctionTrajectory(state_fn=target.state_at, dimension=3)
    assert np.allclose(traj.derivative_at(0.7), target.derivative_at(0.7), atol=1e-5)


def test_designed_path_round_trip():
    traj, path = mode_design(P, NU)
    run = continuous_dark_run(traj.state_at(0.0), path, np.zeros((3, 3)), 5.0, 1e-3)
    fidelities = [fidelity(state, traj.state_at(t)) for t, state in zip(run.times, run.states)]
    assert min(fidelities) >= 1.0 - 1e-6
    assert parallel_transport_residual(run) <= 10 * 1e-3


def test_target_is_parallel_transported():
    traj, _ = mode_design(P, NU)
    grid = np.linspace(0.0, 2.0, 2001)
    assert parallel_transport_residual(sampled_states(traj, grid)) <= 1e-2


def test_qubit_loop_phase():
    loop = _qubit_loop(math.pi / 3, 2000)
    assert is_closed(loop)
    assert pancharatnam_phase(loop) == pytest.approx(math.pi / 2, abs=1e-4)


@pytest.mark.parametrize("theta", [0.4, 1.1, 2.0])
def test_qubit_loop_phase_is_solid_angle(theta):
    expected = math.remainder(math.pi * (1.0 - math.cos(theta)), 2.0 * math.pi)
    assert pancharatnam_phase(_qubit_loop(theta, 4000)) == pytest.approx(expected, abs=1e-4)


def test_phase_is_gauge_invariant_for_loops():
    loop = _qubit_loop(math.pi / 3, 2000)
    regauged = SampledStates(times=loop.times, states=loop.states * np.exp(0.3j * np.sin(loop.times))[:, None])
    assert pancharatnam_phase(regauged) == pytest.approx(pancharatnam_phase(loop), abs=1e-10)


def test_open_path_is_not_closed():
    half = _qubit_loop(math.pi / 3, 1000)
    opened = SampledStates(times=half.times[:500], states=half.states[:500])
    assert not is_closed(opened)


def test_orthogonal_neighbours_have_undefined_phase():
    states = SampledStates(times=np.array([0.0, 1.0]), states=np.eye(2, dtype=np.complex128))
    with pytest.raises(UndefinedPhaseError):
        local_phases(states)
    with pytest.raises(UndefinedPhaseError):
        pancharatnam_phase(states)


def test_single_point_diagnostics():
    single = SampledStates(times=np.array([0.0]), states=np.array([[1.0, 0.0]], dtype=np.complex128))
    assert parallel_transport_residual(single) == 0.0
    assert pancharatnam_phase(single) == 0.0
