"""Scenario execution: single runs, parameter sweeps, spectrum and design reports."""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.stats import linregress

from dark_zeno.artifacts import SWEEP_FILE, ArtifactWriter
from dark_zeno.config import DEFAULT_TOLERANCES, worker_count
from dark_zeno.design import (
    ModeTrajectory,
    design_monitored_state,
    mode_design,
    parallel_transport_residual,
    pancharatnam_phase,
)
from dark_zeno.dynamics import (
    DarkTrajectory,
    continuous_dark_run,
    discrete_dark_run,
    steps_for,
    survival_deficit,
    time_grid,
)
from dark_zeno.embedding import adiabatic_alpha_check, dark_deviation, embedded_run
from dark_zeno.errors import (
    CommutatorError,
    ConfigurationError,
    ConsistencyError,
    DarkZenoError,
    ResolutionError,
    UndefinedPhaseError,
)
from dark_zeno.linalg import fidelity
from dark_zeno.paths import GeneratorPath, ModePath, period_of
from dark_zeno.scenario import Scenario, load_scenario
from dark_zeno.spectrum import (
    closed_form_solution,
    cyclic_return_fidelity,
    expansion_state,
    three_level_frequencies,
    zeno_spectrum,
)

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    command: str
    mode: str
    summary: dict
    files: list = field(default_factory=list)
    duration: float = 0.0


def _resolve(config):
    return config if isinstance(config, Scenario) else load_scenario(config)


def _writer(scenario, out):
    directory = Path(out) if out is not None else Path(scenario.output.directory)
    return ArtifactWriter(directory, scenario.output.formats)


def _generator(scenario, tol):
    path = scenario.path.build(tol)
    if isinstance(path, ModePath):
        return path.to_generator_path()
    if isinstance(path, GeneratorPath):
        return path
    raise ConfigurationError("This report needs a generator or modes path")


def _phase_metrics(traj, tol):
    try:
        phase = pancharatnam_phase(traj, tol=tol)
    except UndefinedPhaseError as e:
        logger.warning(f"Geometric phase undefined: {str(e)}")
        phase = None
    return {"pancharatnam_phase": phase, "parallel_transport_residual": parallel_transport_residual(traj)}


def _dark_summary(traj: DarkTrajectory):
    return {
        "steps": len(traj) - 1,
        "final_state": traj.final_state,
        "final_norm": float(traj.norms[-1]),
        "norm_deficit": survival_deficit(traj),
        "max_norm_drift": float(np.max(np.abs(traj.norms - 1.0))),
        "max_orthogonality_residual": float(np.max(traj.orthogonality_residual)),
    }


def _run_discrete(s, tol):
    run = s.run
    M = run.M if run.M is not None else steps_for(run.T, run.tau)
    traj = discrete_dark_run(s.initial_state, s.path.build(tol), s.hamiltonian, run.tau, M, tol=tol)
    summary = _dark_summary(traj)
    summary.update(tau=run.tau, M=M)
    return traj.to_frame(), summary


def _run_continuous(s, tol):
    traj = continuous_dark_run(s.initial_state, s.path.build(tol), s.hamiltonian, s.run.T, s.run.dt, tol=tol)
    summary = _dark_summary(traj)
    summary.update(T=s.run.T, dt=traj.step, **_phase_metrics(traj, tol))
    return traj.to_frame(), summary


def _spectrum_summary(s, tol):
    path = _generator(s, tol)
    spectrum = zeno_spectrum(s.hamiltonian, path.K, path.f0, s.initial_state, tol=tol)
    period = period_of(path, tol=tol)
    summary = {
        **spectrum.summary(),
        "weights": spectrum.weights(),
        "period": period.period if period.is_periodic else str(period),
        "cyclic_return_fidelity": cyclic_return_fidelity(spectrum, period) if period.is_periodic else None,
    }
    if s.dimension == 3 and s.hamiltonian_is_zero:
        modes = path.to_mode_path()
        result = three_level_frequencies(modes.amplitudes, modes.frequencies, tol=tol)
        summary["three_level"] = {
            "xi": result.xi,
            "eta": result.eta,
            "omega_plus": result.omega_plus,
            "omega_minus": result.omega_minus,
        }
    return path, spectrum, summary


def _run_closed_form(s, tol):
    path, spectrum, summary = _spectrum_summary(s, tol)
    steps, dt = time_grid(s.run.T, s.run.dt)
    times = dt * np.arange(steps + 1)
    states = np.array([expansion_state(spectrum, path.K, t, tol=tol) for t in times])
    exact = closed_form_solution(s.initial_state, s.hamiltonian, path.K, path.f0, times[-1], tol=tol)
    norms = np.linalg.norm(states, axis=1)
    traj = DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=np.array([abs(np.vdot(path.state(t), psi)) for t, psi in zip(times, states)]),
        mode="closed_form",
        step=dt,
    )
    summary.update(_dark_summary(traj))
    summary.update(T=s.run.T, dt=dt, expansion_residual=float(np.linalg.norm(states[-1] - exact)))
    return traj.to_frame(), summary


def _run_embedded(s, tol):
    path = s.path.build(tol)
    run = s.run
    embedded = embedded_run(s.initial_state, path, run.E, run.T, run.dt, tol=tol)
    dark = continuous_dark_run(s.initial_state, path, s.hamiltonian, run.T, run.dt, tol=tol)
    summary = {
        "E": run.E,
        "T": run.T,
        "dt": embedded.step,
        "steps": len(embedded) - 1,
        "dark_deviation": dark_deviation(embedded, dark),
        "decomposition_residual": embedded.decomposition_residual(),
        "max_norm_drift": float(np.max(np.abs(np.linalg.norm(embedded.full_states, axis=1) - 1.0))),
        "max_alpha": float(np.max(np.abs(embedded.alpha))),
        "adiabatic_residual": None,
    }
    if run.E > 0:
        try:
            summary["adiabatic_residual"] = adiabatic_alpha_check(embedded, path, tol=tol)
        except ResolutionError as e:
            logger.warning(f"Skipping adiabatic check: {str(e)}")
    return embedded.to_frame(), summary


def _run_inverse(s, tol):
    p, nu = s.path.params["p"], s.path.params["nu"]
    target = ModeTrajectory(p=p, nu=nu, tol=tol)
    steps, dt = time_grid(s.run.T, s.run.dt)
    grid = dt * np.arange(steps + 1)
    if s.hamiltonian_is_zero:
        _, path = mode_design(p, nu, tol=tol)
        summary = {
            "amplitudes": path.amplitudes,
            "frequencies": path.frequencies,
            "normalization": float(1.0 / math.sqrt(np.sum(target.p * target.nu**2))),
        }
    else:
        result = design_monitored_state(target, s.hamiltonian, grid[:: max(1, steps // 100)], tol=tol)
        path = result.path
        summary = result.summary()

    psi0 = s.initial_state if s.initial_state is not None else target.state_at(0.0)
    forward = continuous_dark_run(psi0, path, s.hamiltonian, s.run.T, dt, tol=tol)
    fidelities = np.array([fidelity(target.state_at(t), psi) for t, psi in zip(forward.times, forward.states)])
    summary.update(_dark_summary(forward))
    summary.update(
        T=s.run.T,
        dt=forward.step,
        min_round_trip_fidelity=float(np.min(fidelities)),
        **_phase_metrics(forward, tol),
    )
    return forward.to_frame(), summary


MODE_RUNNERS = {
    "discrete": _run_discrete,
    "continuous": _run_continuous,
    "closed_form": _run_closed_form,
    "embedded": _run_embedded,
    "inverse": _run_inverse,
}


def execute(scenario: Scenario, tol=DEFAULT_TOLERANCES):
    """Run the scenario's mode; returns (trajectory frame, summary). Writes nothing."""
    return MODE_RUNNERS[scenario.run.mode](scenario, tol)


def _finish(command, scenario, summary, writer, started):
    duration = time.perf_counter() - started
    logger.info(f"{command} finished in {duration:.3f}s ({scenario.run.mode})")
    return RunReport(
        command=command,
        mode=scenario.run.mode,
        summary=summary,
        files=list(writer.written),
        duration=duration,
    )


def run_scenario(config, *, out=None, tol=DEFAULT_TOLERANCES) -> RunReport:
    """Execute the requested mode and write trajectory.csv and summary.json."""
    started = time.perf_counter()
    scenario = _resolve(config)
    logger.info(f"Running {scenario.source or 'scenario'} in mode {scenario.run.mode}")
    try:
        frame, summary = execute(scenario, tol)
    except DarkZenoError as e:
        logger.error(f"Run failed: {str(e)}")
        raise
    summary = {"mode": scenario.run.mode, **summary}
    writer = _writer(scenario, out)
    writer.write_frame(frame)
    writer.write_summary(summary)
    return _finish("run", scenario, summary, writer, started)


def spectrum(config, *, out=None, tol=DEFAULT_TOLERANCES) -> RunReport:
    """Zeno spectrum, period and cyclic return of a commuting generator scenario."""
    started = time.perf_counter()
    scenario = _resolve(config)
    if scenario.initial_state is None:
        raise ConfigurationError("The spectrum report needs an initial_state")
    try:
        _, _, summary = _spectrum_summary(scenario, tol)
    except DarkZenoError as e:
        logger.error(f"Spectrum failed: {str(e)}")
        raise
    writer = _writer(scenario, out)
    writer.write_summary(summary)
    return _finish("spectrum", scenario, summary, writer, started)


def design(config, *, out=None, tol=DEFAULT_TOLERANCES) -> RunReport:
    """Inverse design round trip of a 'design' path scenario."""
    scenario = _resolve(config)
    if scenario.run.mode != "inverse":
        raise ConfigurationError("The design command needs run mode 'inverse' with a 'design' path")
    report = run_scenario(scenario, out=out, tol=tol)
    report.command = "design"
    return report


def _sweep_point(scenario, parameter, value, reference, tol):
    run = scenario.run
    if parameter == "tau":
        T = run.T if run.T is not None else run.M * run.tau
        traj = discrete_dark_run(
            scenario.initial_state, scenario.path.build(tol), scenario.hamiltonian, value, steps_for(T, value), tol=tol
        )
        metric = survival_deficit(traj)
    elif parameter == "E":
        embedded = embedded_run(scenario.initial_state, scenario.path.build(tol), value, run.T, run.dt, tol=tol)
        metric = dark_deviation(embedded, reference)
    else:
        traj = continuous_dark_run(
            scenario.initial_state, scenario.path.build(tol), scenario.hamiltonian, run.T, value, tol=tol
        )
        metric = float(np.linalg.norm(traj.final_state - reference))
    logger.debug(f"Sweep point {parameter}={value:g}: metric {metric:.6e}")
    return metric


def _sweep_reference(scenario, tol):
    """Shared comparison target computed once, before the worker pool starts."""
    parameter = scenario.sweep.parameter
    run = scenario.run
    if parameter == "E":
        return continuous_dark_run(
            scenario.initial_state, scenario.path.build(tol), scenario.hamiltonian, run.T, run.dt, tol=tol
        )
    if parameter == "dt":
        if scenario.path.kind in ("generator", "modes"):
            path = _generator(scenario, tol)
            try:
                return closed_form_solution(scenario.initial_state, scenario.hamiltonian, path.K, path.f0, run.T, tol=tol)
            except CommutatorError:
                logger.info("K and H do not commute; comparing against a finer integration")
        finest = min(scenario.sweep.values) / 4.0
        return continuous_dark_run(
            scenario.initial_state, scenario.path.build(tol), scenario.hamiltonian, run.T, finest, tol=tol
        ).final_state
    return None


METRIC_NAMES = {"tau": "norm_deficit", "E": "dark_deviation", "dt": "final_state_error"}


def run_sweep(config, *, out=None, tol=DEFAULT_TOLERANCES) -> RunReport:
    """Run every sweep value on a worker pool, then fit log(metric) against log(value)."""
    started = time.perf_counter()
    scenario = _resolve(config)
    sweep = scenario.sweep
    if sweep is None:
        raise ConfigurationError("Scenario has no 'sweep' section")
    if len(set(sweep.values)) < 3:
        raise ConfigurationError("A sweep needs at least 3 distinct values")

    workers = min(worker_count(), len(sweep.values))
    logger.info(f"Sweeping {sweep.parameter} over {len(sweep.values)} values with {workers} workers")
    try:
        reference = _sweep_reference(scenario, tol)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            metrics = list(
                executor.map(lambda v: _sweep_point(scenario, sweep.parameter, v, reference, tol), sweep.values)
            )
    except DarkZenoError as e:
        logger.error(f"Sweep failed: {str(e)}")
        raise

    values = np.array(sweep.values)
    metrics = np.array(metrics)
    if np.any(metrics <= 0):
        raise ConsistencyError(f"{METRIC_NAMES[sweep.parameter]} vanished at some sweep point; log-log fit undefined")
    fit = linregress(np.log(values), np.log(metrics))
    logger.info(f"Sweep slope {fit.slope:.4f} +/- {fit.stderr:.4f}")

    metric_name = METRIC_NAMES[sweep.parameter]
    summary = {
        "mode": scenario.run.mode,
        "parameter": sweep.parameter,
        "metric": metric_name,
        "values": values,
        "metrics": metrics,
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "stderr": float(fit.stderr),
    }
    writer = _writer(scenario, out)
    writer.write_frame(pd.DataFrame({sweep.parameter: values, metric_name: metrics}), SWEEP_FILE)
    writer.write_summary(summary)
    return _finish("sweep", scenario, summary, writer, started)
