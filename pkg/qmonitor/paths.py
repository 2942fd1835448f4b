"""Path helpers for qmonitor output files."""

from __future__ import annotations

import os
from pathlib import Path


def get_output_dir() -> Path:
    """Return the directory where CSV datasets are written by default.

    Falls back to the current working directory when the
    ``QMONITOR_OUTPUT_DIR`` environment variable is not defined.
    """

    env_value = os.getenv("QMONITOR_OUTPUT_DIR")
    if env_value:
        return Path(env_value)
    return Path.cwd()


def resolve_output_path(out: str | None) -> Path | None:
    """Resolve ``--out``: ``None`` or ``-`` means stdout.

    Bare file names go under :func:`get_output_dir`; anything with a
    directory component is used as given.
    """

    if out is None or out == "-":
        return None
    path = Path(out)
    if path.is_absolute() or path.parent != Path("."):
        return path
    return get_output_dir() / path
