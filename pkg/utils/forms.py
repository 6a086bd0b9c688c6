import logging

import numpy as np

from dark_zeno.errors import ConfigurationError

logger = logging.getLogger(__name__)


def parse_numbers(text, label, length=None):
    """Comma or space separated reals from a text input."""
    tokens = [t for t in text.replace(",", " ").split() if t]
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError as e:
        logger.error(f"Error parsing {label}: {str(e)}")
        raise ConfigurationError(f"{label}: expected numbers, got '{text}'")
    if values.size == 0:
        raise ConfigurationError(f"{label}: no values given")
    if length is not None and values.size != length:
        raise ConfigurationError(f"{label}: expected {length} values, got {values.size}")
    return values
