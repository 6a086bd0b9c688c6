import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import linregress

from dark_zeno.dynamics import (
    comoving_run,
    continuous_dark_run,
    discrete_dark_run,
    discrete_dark_step,
    effective_hamiltonian,
    max_normalized_gap,
    measurement_limit_generator,
    orthogonality_decay_rate,
    steps_for,
    survival_deficit,
    to_lab_frame,
)
from dark_zeno.errors import HermiticityError, PathError, SetupError
from dark_zeno.linalg import fidelity, random_hermitian, random_orthogonal_state, random_state
from dark_zeno.paths import GeneratorPath, tangent
from dark_zeno.spectrum import closed_form_solution

dimensions = st.integers(min_value=2, max_value=8)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _random_point(n, rng):
    f = random_state(n, rng)
    fdot = tangent(f, rng.normal(size=n) + 1j * rng.normal(size=n))
    return f, fdot


@given(n=dimensions, seed=seeds)
@settings(max_examples=1000, deadline=None)
def test_effective_hamiltonian_is_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    f, fdot = _random_point(n, rng)
    h_d = effective_hamiltonian(random_hermitian(n, rng), f, fdot)
    assert np.max(np.abs(h_d - h_d.conj().T)) <= 1e-12


@given(n=dimensions, seed=seeds)
@settings(max_examples=1000, deadline=None)
def test_measurement_limit_generator_agrees_on_dark_states(n, seed):
    rng = np.random.default_rng(seed)
    f, fdot = _random_point(n, rng)
    H = random_hermitian(n, rng)
    psi = random_orthogonal_state(f, rng)
    h_d = effective_hamiltonian(H, f, fdot)
    generator = measurement_limit_generator(H, f, fdot)
    assert np.linalg.norm(h_d @ psi - generator @ psi) <= 1e-10


@given(n=dimensions, seed=seeds)
@settings(max_examples=1000, deadline=None)
def test_effective_hamiltonian_maps_dark_states_forward(n, seed):
    # d/dt <f|Psi> = 0 when Psi is orthogonal to f and evolves under H_D
    rng = np.random.default_rng(seed)
    f, fdot = _random_point(n, rng)
    psi = random_orthogonal_state(f, rng)
    h_d = effective_hamiltonian(random_hermitian(n, rng), f, fdot)
    rate = np.vdot(fdot, psi) + np.vdot(f, -1j * h_d @ psi)
    assert abs(rate) <= 1e-10


def test_orthogonality_decay_rate_is_imaginary(rng):
    f, fdot = _random_point(5, rng)
    assert abs(orthogonality_decay_rate(f, fdot).real) <= 1e-14


def test_effective_hamiltonian_rejects_norm_changing_derivative(rng):
    f = random_state(3, rng)
    with pytest.raises(PathError):
        effective_hamiltonian(np.zeros((3, 3)), f, f)


def test_effective_hamiltonian_rejects_non_hermitian(rng):
    f, fdot = _random_point(3, rng)
    with pytest.raises(HermiticityError):
        effective_hamiltonian(np.triu(np.ones((3, 3))), f, fdot)


def test_discrete_step_projects_out_next_state(rng):
    f_next = random_state(4, rng)
    psi = random_state(4, rng)
    out = discrete_dark_step(psi, f_next, random_hermitian(4, rng), 0.1)
    assert abs(np.vdot(f_next, out)) <= 1e-14
    assert np.linalg.norm(out) <= 1.0 + 1e-12


def test_discrete_run_with_constant_path_loses_nothing(constant_path, zero_h):
    psi0 = np.array([0.0, 0.6, 0.8j])
    traj = discrete_dark_run(psi0, constant_path, zero_h, 0.05, 40)
    assert len(traj) == 41
    assert np.allclose(traj.states, psi0, atol=1e-15)
    assert survival_deficit(traj) == pytest.approx(0.0, abs=1e-14)


def test_discrete_run_norm_never_grows(three_level_path, balanced_state, rng):
    H = random_hermitian(3, rng, scale=0.5)
    traj = discrete_dark_run(balanced_state, three_level_path, H, 0.02, 100)
    assert np.all(np.diff(traj.norms) <= 1e-12)
    assert np.max(traj.orthogonality_residual[1:]) <= 1e-14


def test_discrete_run_rejects_overlap_with_monitored_state(three_level_path, zero_h):
    f0 = three_level_path.state(0.0)
    other = random_orthogonal_state(f0, np.random.default_rng(3))
    psi0 = 0.3 * f0 + math.sqrt(1 - 0.09) * other
    with pytest.raises(SetupError, match="orthogonal"):
        discrete_dark_run(psi0, three_level_path, zero_h, 0.01, 10)


def test_discrete_run_rejects_monitored_state_at_long_steps(three_level_path, zero_h):
    with pytest.raises(SetupError, match="orthogonal"):
        discrete_dark_run(three_level_path.state(0.0), three_level_path, zero_h, 1.0, 3)


def test_discrete_run_accepts_state_orthogonal_to_first_measured_state(three_level_path, zero_h):
    f_start, f_first = three_level_path.state(0.0), three_level_path.state(1.0)
    psi0 = f_start - f_first * np.vdot(f_first, f_start)
    psi0 /= np.linalg.norm(psi0)
    assert abs(np.vdot(f_start, psi0)) > 0.5
    traj = discrete_dark_run(psi0, three_level_path, zero_h, 1.0, 3)
    assert traj.norms[1] == pytest.approx(1.0, abs=1e-12)


def test_discrete_run_validates_arguments(three_level_path, balanced_state, zero_h):
    with pytest.raises(ValueError):
        discrete_dark_run(balanced_state, three_level_path, zero_h, 0.0, 10)
    with pytest.raises(ValueError):
        discrete_dark_run(balanced_state, three_level_path, zero_h, 0.1, 0)


def test_discrete_deficit_vanishes_linearly_in_tau(three_level_path, balanced_state, zero_h):
    taus = np.array([1e-2, 5e-3, 2.5e-3])
    deficits = [
        survival_deficit(discrete_dark_run(balanced_state, three_level_path, zero_h, tau, steps_for(1.0, tau)))
        for tau in taus
    ]
    assert all(d > 0 for d in deficits)
    fit = linregress(np.log(taus), np.log(deficits))
    assert fit.slope == pytest.approx(1.0, abs=0.1)


def test_prefix_and_normalized_states(three_level_path, balanced_state, zero_h):
    traj = discrete_dark_run(balanced_state, three_level_path, zero_h, 0.01, 50)
    head = traj.prefix(10)
    assert len(head) == 11
    assert np.array_equal(head.states, traj.states[:11])
    assert np.allclose(np.linalg.norm(traj.normalized_states(), axis=1), 1.0, atol=1e-14)


def test_trajectory_frame_columns(three_level_path, balanced_state, zero_h):
    frame = discrete_dark_run(balanced_state, three_level_path, zero_h, 0.01, 5).to_frame()
    assert list(frame.columns) == [
        "t", "re_psi_0", "re_psi_1", "re_psi_2", "im_psi_0", "im_psi_1", "im_psi_2",
        "norm", "survival_prob", "orth_residual",
    ]
    assert len(frame) == 6


def test_continuous_run_is_unitary_over_long_times(three_level_path, balanced_state, zero_h):
    traj = continuous_dark_run(balanced_state, three_level_path, zero_h, 10.0, 1e-3)
    assert np.max(np.abs(1.0 - traj.norms)) <= 1e-8
    assert np.max(traj.orthogonality_residual) <= 1e-5


def test_continuous_run_keeps_orthogonality_at_fine_steps(three_level_path, balanced_state, zero_h):
    traj = continuous_dark_run(balanced_state, three_level_path, zero_h, 1.0, 1e-4)
    assert np.max(traj.orthogonality_residual) <= 1e-8


def test_continuous_run_rejects_overlap(three_level_path, zero_h):
    with pytest.raises(SetupError):
        continuous_dark_run(three_level_path.state(0.0), three_level_path, zero_h, 1.0, 1e-2)


def test_constant_path_evolves_with_projected_hamiltonian(constant_path, rng):
    H = random_hermitian(3, rng)
    psi0 = np.array([0.0, 1.0, 0.0])
    traj = continuous_dark_run(psi0, constant_path, H, 1.0, 1e-2)
    P = np.diag([0.0, 1.0, 1.0])
    expected = np.linalg.eigh(P @ H @ P)
    u = (expected[1] * np.exp(-1j * expected[0])) @ expected[1].conj().T
    assert np.allclose(traj.final_state, u @ psi0, atol=1e-12)


@pytest.mark.slow
def test_closed_form_matches_integrator(three_level_path, balanced_state):
    H = np.diag([0.2, 0.2, -0.4])
    traj = continuous_dark_run(balanced_state, three_level_path, H, 5.0, 1e-4)
    exact = closed_form_solution(balanced_state, H, three_level_path.K, three_level_path.f0, 5.0)
    assert fidelity(traj.final_state, exact) >= 1.0 - 1e-8


def test_cyclic_run_does_not_return(three_level_path, balanced_state, zero_h):
    traj = continuous_dark_run(balanced_state, three_level_path, zero_h, 2.0 * math.pi, 1e-3)
    returned = abs(np.vdot(balanced_state, traj.final_state)) ** 2
    assert returned == pytest.approx(math.cos(2.0 * math.pi / math.sqrt(3.0)) ** 2, abs=1e-3)


def test_comoving_frame_matches_lab_frame_for_commuting_generators(three_level_path, balanced_state, zero_h):
    lab = continuous_dark_run(balanced_state, three_level_path, zero_h, 1.0, 1e-3)
    comoving = comoving_run(balanced_state, zero_h, three_level_path.K, three_level_path.f0, 1.0, 1e-3)
    assert comoving.mode == "comoving"
    assert np.max(np.linalg.norm(to_lab_frame(comoving, three_level_path.K) - lab.states, axis=1)) <= 1e-4


def test_comoving_frame_matches_lab_frame_for_non_commuting_generators(three_level_path, balanced_state):
    H = random_hermitian(3, np.random.default_rng(11), scale=0.5)
    lab = continuous_dark_run(balanced_state, three_level_path, H, 1.0, 1e-3)
    comoving = comoving_run(balanced_state, H, three_level_path.K, three_level_path.f0, 1.0, 1e-3)
    assert np.max(np.linalg.norm(to_lab_frame(comoving, three_level_path.K) - lab.states, axis=1)) <= 1e-4


@pytest.mark.slow
def test_discrete_runs_converge_to_continuous(three_level_path, balanced_state, zero_h):
    continuous = continuous_dark_run(balanced_state, three_level_path, zero_h, 1.0, 2.5e-4)
    gaps = []
    for tau in (0.02, 0.01, 0.005):
        discrete = discrete_dark_run(balanced_state, three_level_path, zero_h, tau, steps_for(1.0, tau))
        gaps.append(max_normalized_gap(discrete, continuous))
    assert gaps[0] > gaps[1] > gaps[2]
    for coarse, fine in zip(gaps, gaps[1:]):
        assert 1.6 <= coarse / fine <= 2.4


def test_gap_needs_commensurate_steps(three_level_path, balanced_state, zero_h):
    continuous = continuous_dark_run(balanced_state, three_level_path, zero_h, 1.0, 3e-3)
    discrete = discrete_dark_run(balanced_state, three_level_path, zero_h, 0.01, 10)
    with pytest.raises(ValueError):
        max_normalized_gap(discrete, continuous)


def test_steps_for():
    assert steps_for(1.0, 0.01) == 100
    assert steps_for(1.0, 0.0025) == 400
    assert steps_for(0.001, 0.01) == 1


def test_generic_path_runs(rng):
    path = GeneratorPath(K=random_hermitian(5, rng), f0=random_state(5, rng))
    psi0 = random_orthogonal_state(path.f0, rng)
    traj = continuous_dark_run(psi0, path, random_hermitian(5, rng), 2.0, 1e-3)
    assert np.max(np.abs(1.0 - traj.norms)) <= 1e-10
