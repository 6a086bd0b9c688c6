"""Scenario files: JSON in, validated Scenario out.

Schema problems raise ConfigurationError; physical preconditions (Hermiticity,
orthogonality, compatibility) are checked later by the library calls.
"""
import json
import logging
import numbers
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from dark_zeno.config import DEFAULT_TOLERANCES
from dark_zeno.errors import ConfigurationError
from dark_zeno.paths import GeneratorPath, ModePath, MonitoredPath, SampledPath

logger = logging.getLogger(__name__)

RUN_MODES = ("discrete", "continuous", "closed_form", "embedded", "inverse")
PATH_TYPES = ("generator", "modes", "sampled", "design")
OUTPUT_FORMATS = ("csv", "json")

# run fields each mode needs; discrete accepts M or T
REQUIRED_RUN_FIELDS = {
    "discrete": ("tau",),
    "continuous": ("T", "dt"),
    "closed_form": ("T", "dt"),
    "embedded": ("T", "dt", "E"),
    "inverse": ("T", "dt"),
}

SWEEP_MODES = {
    "tau": ("discrete",),
    "E": ("embedded",),
    "dt": ("continuous", "closed_form"),
}


@dataclass(frozen=True)
class RunSettings:
    mode: str
    T: Optional[float] = None
    tau: Optional[float] = None
    M: Optional[int] = None
    dt: Optional[float] = None
    E: Optional[float] = None


@dataclass(frozen=True)
class SweepSettings:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    formats: tuple = OUTPUT_FORMATS


@dataclass(frozen=True, eq=False)
class PathSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def build(self, tol=DEFAULT_TOLERANCES) -> MonitoredPath:
        if self.kind == "generator":
            return GeneratorPath(K=self.params["K"], f0=self.params["f0"], tol=tol)
        if self.kind == "modes":
            return ModePath(
                amplitudes=self.params["amplitudes"],
                frequencies=self.params["frequencies"],
                modes=self.params.get("modes"),
                tol=tol,
            )
        if self.kind == "sampled":
            return SampledPath(times=self.params["times"], samples=self.params["samples"], tol=tol)
        raise ConfigurationError(f"Path type '{self.kind}' has no forward path; it is produced by an inverse run")


@dataclass(frozen=True, eq=False)
class Scenario:
    dimension: int
    initial_state: Optional[np.ndarray]
    hamiltonian: np.ndarray
    path: PathSpec
    run: RunSettings
    sweep: Optional[SweepSettings] = None
    output: OutputSettings = OutputSettings()
    source: Optional[str] = None

    @property
    def hamiltonian_is_zero(self):
        return not np.any(self.hamiltonian)

    def with_run(self, **changes):
        """Copy with some run settings replaced (used for sweep points)."""
        return replace(self, run=replace(self.run, **changes))


def _real(value, where):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"{where}: expected a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigurationError(f"{where}: expected a finite number, got {value!r}")
    return value


def _positive(value, where):
    value = _real(value, where)
    if value <= 0:
        raise ConfigurationError(f"{where}: must be positive, got {value!r}")
    return value


def _complex(value, where):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigurationError(f"{where}: complex numbers are written as [re, im], got {value!r}")
        return complex(_real(value[0], where), _real(value[1], where))
    return complex(_real(value, where), 0.0)


def _real_list(value, where, length=None):
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"{where}: expected a non-empty list of numbers")
    result = np.array([_real(v, f"{where}[{i}]") for i, v in enumerate(value)])
    if length is not None and result.shape[0] != length:
        raise ConfigurationError(f"{where}: expected {length} entries, got {result.shape[0]}")
    return result


def _vector(value, where, length=None):
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"{where}: expected a non-empty list of complex entries")
    result = np.array([_complex(v, f"{where}[{i}]") for i, v in enumerate(value)], dtype=np.complex128)
    if length is not None and result.shape[0] != length:
        raise ConfigurationError(f"{where}: expected {length} entries, got {result.shape[0]}")
    return result


def _matrix(value, where, rows, columns=None):
    columns = rows if columns is None else columns
    if not isinstance(value, list) or len(value) != rows:
        raise ConfigurationError(f"{where}: expected {rows} rows")
    return np.array([_vector(row, f"{where}[{i}]", columns) for i, row in enumerate(value)])


def _section(data, key, required=True):
    section = data.get(key)
    if section is None:
        if required:
            raise ConfigurationError(f"Missing '{key}' section")
        return None
    if not isinstance(section, dict):
        raise ConfigurationError(f"'{key}' must be an object")
    return section


def _parse_path(data, n):
    kind = data.get("type")
    if kind not in PATH_TYPES:
        raise ConfigurationError(f"path.type must be one of {PATH_TYPES}, got {kind!r}")
    if kind == "generator":
        params = {"K": _matrix(data.get("K"), "path.K", n), "f0": _vector(data.get("f0"), "path.f0", n)}
    elif kind == "modes":
        amplitudes = _vector(data.get("amplitudes"), "path.amplitudes")
        m = amplitudes.shape[0]
        params = {
            "amplitudes": amplitudes,
            "frequencies": _real_list(data.get("frequencies"), "path.frequencies", m),
        }
        if data.get("modes") is not None:
            params["modes"] = _matrix(data["modes"], "path.modes", n, m)
        elif m != n:
            raise ConfigurationError(f"path.amplitudes: expected {n} entries without explicit modes, got {m}")
    elif kind == "sampled":
        times = _real_list(data.get("times"), "path.times")
        samples = data.get("samples")
        if not isinstance(samples, list) or len(samples) != times.shape[0]:
            raise ConfigurationError("path.samples: expected one state per sample time")
        params = {
            "times": times,
            "samples": np.array([_vector(s, f"path.samples[{i}]", n) for i, s in enumerate(samples)]),
        }
    else:
        params = {"p": _real_list(data.get("p"), "path.p", n), "nu": _real_list(data.get("nu"), "path.nu", n)}
    return PathSpec(kind=kind, params=params)


def _parse_run(data):
    mode = data.get("mode")
    if mode not in RUN_MODES:
        raise ConfigurationError(f"run.mode must be one of {RUN_MODES}, got {mode!r}")
    values = {}
    for key in ("T", "tau", "dt"):
        if data.get(key) is not None:
            values[key] = _positive(data[key], f"run.{key}")
    if data.get("E") is not None:
        values["E"] = _real(data["E"], "run.E")
        if values["E"] < 0:
            raise ConfigurationError(f"run.E must be non-negative, got {values['E']}")
    if data.get("M") is not None:
        M = data["M"]
        if isinstance(M, bool) or not isinstance(M, int) or M < 1:
            raise ConfigurationError(f"run.M must be a positive integer, got {M!r}")
        values["M"] = M
    missing = [key for key in REQUIRED_RUN_FIELDS[mode] if key not in values]
    if mode == "discrete" and "M" not in values and "T" not in values:
        missing.append("M or T")
    if missing:
        raise ConfigurationError(f"run mode '{mode}' needs {', '.join(missing)}")
    return RunSettings(mode=mode, **values)


def _parse_sweep(data, mode):
    parameter = data.get("parameter")
    if parameter not in SWEEP_MODES:
        raise ConfigurationError(f"sweep.parameter must be one of {tuple(SWEEP_MODES)}, got {parameter!r}")
    if mode not in SWEEP_MODES[parameter]:
        raise ConfigurationError(f"A sweep over {parameter} needs run mode {' or '.join(SWEEP_MODES[parameter])}")
    values = _real_list(data.get("values"), "sweep.values")
    if np.any(values <= 0):
        raise ConfigurationError("sweep.values must be positive for a log-log fit")
    if np.unique(values).shape[0] < 3:
        raise ConfigurationError(f"A sweep needs at least 3 distinct values, got {np.unique(values).shape[0]}")
    return SweepSettings(parameter=parameter, values=tuple(float(v) for v in values))


def _parse_output(data):
    if data is None:
        return OutputSettings()
    directory = data.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        raise ConfigurationError("output.directory must be a non-empty string")
    formats = data.get("formats", list(OUTPUT_FORMATS))
    if not isinstance(formats, list) or not formats or any(f not in OUTPUT_FORMATS for f in formats):
        raise ConfigurationError(f"output.formats must be a non-empty subset of {OUTPUT_FORMATS}")
    return OutputSettings(directory=directory, formats=tuple(dict.fromkeys(formats)))


def parse_scenario(data, source=None) -> Scenario:
    """Validate a decoded scenario document."""
    if not isinstance(data, dict):
        raise ConfigurationError("A scenario must be a JSON object")
    n = data.get("dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ConfigurationError(f"dimension must be an integer >= 2, got {n!r}")

    run = _parse_run(_section(data, "run"))
    path = _parse_path(_section(data, "path"), n)
    if (path.kind == "design") != (run.mode == "inverse"):
        raise ConfigurationError("Path type 'design' goes together with run mode 'inverse'")
    if run.mode == "closed_form" and path.kind not in ("generator", "modes"):
        raise ConfigurationError("Closed-form runs need a generator or modes path")

    hamiltonian = data.get("hamiltonian", "zero")
    if hamiltonian == "zero":
        H = np.zeros((n, n), dtype=np.complex128)
    elif isinstance(hamiltonian, list):
        H = _matrix(hamiltonian, "hamiltonian", n)
    else:
        raise ConfigurationError("hamiltonian must be \"zero\" or an N x N matrix")
    if run.mode == "embedded" and np.any(H):
        raise ConfigurationError("Embedded runs model the system Hamiltonian E|f><f| alone; set hamiltonian to \"zero\"")

    psi0 = None
    if data.get("initial_state") is not None:
        psi0 = _vector(data["initial_state"], "initial_state", n)
        size = np.linalg.norm(psi0)
        if size == 0:
            raise ConfigurationError("initial_state is the zero vector")
        psi0 = psi0 / size
    elif run.mode != "inverse":
        raise ConfigurationError(f"run mode '{run.mode}' needs an initial_state")

    sweep_data = _section(data, "sweep", required=False)
    sweep = _parse_sweep(sweep_data, run.mode) if sweep_data is not None else None
    return Scenario(
        dimension=n,
        initial_state=psi0,
        hamiltonian=H,
        path=path,
        run=run,
        sweep=sweep,
        output=_parse_output(_section(data, "output", required=False)),
        source=source,
    )


def load_scenario(config_path) -> Scenario:
    """Read and validate a scenario file."""
    config_path = Path(config_path)
    try:
        content = config_path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Error reading scenario: {str(e)}")
        raise ConfigurationError(f"Cannot read scenario file {config_path}: {str(e)}")
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        logger.error(f"Error decoding scenario: {str(e)}")
        raise ConfigurationError(f"{config_path} is not valid JSON: {str(e)}")
    scenario = parse_scenario(data, source=str(config_path))
    logger.info(f"Loaded scenario {config_path.name}: N={scenario.dimension}, mode={scenario.run.mode}")
    return scenario
