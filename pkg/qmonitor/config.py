from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, Optional

from qmonitor.exceptions import SweepConfigError


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise SweepConfigError(f"{name} must be a number, got {raw!r}") from exc


# Unidades con hbar = 1. Por defecto V0 = dE = 1, b = 0.75 y tau = 8.
#
# Cada valor se puede sobreescribir por entorno (QMONITOR_*). Los flags de la CLI
# y el fichero de configuracion tienen prioridad sobre estos valores.
DEFAULT_V0 = _env_float("QMONITOR_V0", 1.0)
DEFAULT_DELTA_E = _env_float("QMONITOR_DELTA_E", 1.0)
DEFAULT_E1 = _env_float("QMONITOR_E1", 0.0)
DEFAULT_TAU = _env_float("QMONITOR_TAU", 8.0)
DEFAULT_B = _env_float("QMONITOR_B", 0.75)

LOG_LEVEL = os.getenv("QMONITOR_LOG_LEVEL", "WARNING").upper()

# Fichero key=value por defecto (opcional).
_env_config = os.getenv("QMONITOR_CONFIG")
if _env_config is not None and not _env_config.strip():
    _env_config = None
CONFIG_PATH: Optional[str] = _env_config

# Numeric guards
EP_RELATIVE_BAND = 1e-9
RESONANCE_TOLERANCE = 1e-12
PASSAGE_THRESHOLD = 1e-12
ENTROPY_EIGEN_FLOOR = 1e-14
SQRT_CLAMP = 1e-12
STATE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10

# Integrator defaults
DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12


def load_config_file(path: str | Path) -> Dict[str, str]:
    """Parse a plain-text ``key = value`` config file.

    Keys are normalised to the underscore form of the long CLI flags
    (``lambda-t`` and ``lambda_t`` are the same key). Values are returned as
    strings; type conversion happens when the values are merged into
    :class:`qmonitor.models.RunConfig`.
    """

    config_path = Path(path)
    values: Dict[str, str] = {}
    text = config_path.read_text(encoding="utf-8")

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SweepConfigError(
                f"{config_path}:{lineno}: expected 'key = value', got {raw_line!r}"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise SweepConfigError(f"{config_path}:{lineno}: empty key or value")
        values[key.replace("-", "_").lower()] = value

    return values
