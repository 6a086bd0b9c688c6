"""CSV and JSON output of runs and sweeps."""
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.17g"

TRAJECTORY_FILE = "trajectory.csv"
SWEEP_FILE = "sweep.csv"
SUMMARY_FILE = "summary.json"


def frame_to_csv(frame: pd.DataFrame) -> str:
    """Versioned CSV text: a '#schema=N' line, then the frame at 17 significant digits."""
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return f"#schema={CSV_SCHEMA_VERSION}\n{body}"


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def summary_to_json(summary: dict) -> str:
    return json.dumps(_plain(summary), indent=2, sort_keys=True) + "\n"


class ArtifactWriter:
    """Writes the files of one run into a directory; remembers what it wrote."""

    def __init__(self, directory, formats=("csv", "json")):
        self.directory = Path(directory)
        self.formats = tuple(formats)
        self.written = []
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Error creating output directory: {str(e)}")
            raise

    def _write(self, name, text):
        target = self.directory / name
        try:
            with open(target, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
        except OSError as e:
            logger.error(f"Error writing {target}: {str(e)}")
            raise
        self.written.append(target)
        logger.info(f"Wrote {target}")
        return target

    def write_frame(self, frame: pd.DataFrame, name=TRAJECTORY_FILE):
        if "csv" not in self.formats:
            return None
        return self._write(name, frame_to_csv(frame))

    def write_summary(self, summary: dict, name=SUMMARY_FILE):
        if "json" not in self.formats:
            return None
        return self._write(name, summary_to_json(summary))


def read_frame(path) -> pd.DataFrame:
    """Load a CSV written by ArtifactWriter, skipping the schema line."""
    return pd.read_csv(path, comment="#")
