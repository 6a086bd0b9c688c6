import json
from pathlib import Path

import numpy as np
import pytest

from dark_zeno.paths import GeneratorPath, ModePath

ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = ROOT / "scenarios"

EQUAL_AMPLITUDES = np.ones(3) / np.sqrt(3.0)
LADDER = np.array([0.0, 1.0, 2.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def three_level_path():
    """f(t) = e^{-iKt}(1,1,1)/sqrt(3) with K = diag(0, 1, 2)."""
    return GeneratorPath(K=np.diag(LADDER), f0=EQUAL_AMPLITUDES)


@pytest.fixture
def three_level_modes():
    return ModePath(amplitudes=EQUAL_AMPLITUDES, frequencies=LADDER)


@pytest.fixture
def balanced_state():
    """Orthogonal to (1,1,1)/sqrt(3) with equal weight on both co-moving modes."""
    return np.array([1.0, 0.0, -1.0], dtype=np.complex128) / np.sqrt(2.0)


@pytest.fixture
def constant_path():
    return ModePath(amplitudes=np.array([1.0, 0.0, 0.0]), frequencies=LADDER)


@pytest.fixture
def zero_h():
    return np.zeros((3, 3), dtype=np.complex128)


@pytest.fixture
def scenario_path():
    def resolve(name):
        return SCENARIO_DIR / name
    return resolve


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario dict to a temporary JSON file and return its path."""
    def write(data, name="scenario.json"):
        target = tmp_path / name
        target.write_text(json.dumps(data), encoding="utf-8")
        return target
    return write


@pytest.fixture
def three_level_document():
    return json.loads((SCENARIO_DIR / "three_level_continuous.json").read_text(encoding="utf-8"))
