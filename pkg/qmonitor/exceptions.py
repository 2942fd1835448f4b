"""Common exceptions for qmonitor modules."""

from __future__ import annotations

from typing import Optional

__all__ = [
    "QMonitorError",
    "DomainViolation",
    "InvalidDensityMatrix",
    "IntegrationFailure",
    "NoPassageRoot",
    "SweepConfigError",
]


class QMonitorError(Exception):
    """Base class for qmonitor errors."""


class DomainViolation(QMonitorError, ValueError):
    """Raised when a physical parameter lies outside its domain."""


class InvalidDensityMatrix(QMonitorError, ValueError):
    """Raised when a two-qubit density matrix is not a valid state."""


class IntegrationFailure(QMonitorError, RuntimeError):
    """Raised when the ODE oracle cannot reach the requested time."""

    def __init__(self, message: str, *, time: Optional[float] = None) -> None:
        super().__init__(message if time is None else f"{message} (t={time!r})")
        self.time = time


class NoPassageRoot(QMonitorError, RuntimeError):
    """Raised when P11 never vanishes inside the searched time window."""


class SweepConfigError(QMonitorError, ValueError):
    """Raised for invalid sweep axes, run configurations or config files."""
