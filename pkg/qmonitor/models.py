"""Pydantic models shared across the qmonitor stack."""

from __future__ import annotations

import math
from typing import Any, List, Literal, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qmonitor.config import (
    DEFAULT_ABS_TOL,
    DEFAULT_B,
    DEFAULT_DELTA_E,
    DEFAULT_E1,
    DEFAULT_REL_TOL,
    DEFAULT_TAU,
    DEFAULT_V0,
)
from qmonitor.exceptions import DomainViolation, SweepConfigError

DEFAULT_E_R = 0.25

Cut = Literal["s", "r", "d"]
CutSelection = Literal["s", "r", "d", "all"]


class SystemConfig(BaseModel):
    """Physical parameters of the measured two-level system (hbar = 1).

    ``omega`` defaults to the resonant value ``e2 - e1`` and ``e_meas`` to
    ``e1``. Positivity of ``v0``, ``tau`` and ``e_r`` is checked by
    :meth:`validate_domain`, which every operation calls before use.
    """

    model_config = ConfigDict(frozen=True)

    e1: float = DEFAULT_E1
    e2: float = DEFAULT_E1 + DEFAULT_DELTA_E
    v0: float = DEFAULT_V0
    omega: float
    tau: float = DEFAULT_TAU
    e_r: float = DEFAULT_E_R
    e_meas: float

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            e1 = data.get("e1", DEFAULT_E1)
            e2 = data.get("e2", e1 + DEFAULT_DELTA_E)
            data.setdefault("e1", e1)
            data.setdefault("e2", e2)
            if data.get("omega") is None:
                data["omega"] = e2 - e1
            if data.get("e_meas") is None:
                data["e_meas"] = e1
        return data

    @property
    def delta_e(self) -> float:
        return self.e2 - self.e1

    def validate_domain(self) -> "SystemConfig":
        if not (math.isfinite(self.e1) and math.isfinite(self.e2)):
            raise DomainViolation("level energies e1, e2 must be finite")
        if not self.v0 > 0:
            raise DomainViolation(f"coupling v0 must be positive, got {self.v0!r}")
        if not self.tau > 0 or not math.isfinite(self.tau):
            raise DomainViolation(f"measurement duration tau must be positive, got {self.tau!r}")
        if not self.e_r > 0:
            raise DomainViolation(f"measurement precision e_r must be positive, got {self.e_r!r}")
        return self

    @classmethod
    def from_lambda_t(
        cls,
        lambda_t: float,
        *,
        v0: float = DEFAULT_V0,
        delta_e: float = DEFAULT_DELTA_E,
        tau: float = DEFAULT_TAU,
        e1: float = DEFAULT_E1,
        omega: Optional[float] = None,
    ) -> "SystemConfig":
        """Build a config whose precision parameter equals ``lambda_t``.

        Solves lambda_t = dE^2 / (2 tau E_r^2) for E_r; ``lambda_t = 0`` maps
        to an infinitely unsharp measurement (``e_r = inf``).
        """

        if lambda_t < 0 or not math.isfinite(lambda_t):
            raise DomainViolation(f"lambda_t must be finite and non-negative, got {lambda_t!r}")
        if tau <= 0:
            raise DomainViolation(f"measurement duration tau must be positive, got {tau!r}")
        e_r = math.inf if lambda_t == 0 else abs(delta_e) / math.sqrt(2.0 * tau * lambda_t)
        return cls(e1=e1, e2=e1 + delta_e, v0=v0, omega=omega, tau=tau, e_r=e_r)


class IntegratorSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=DEFAULT_REL_TOL, gt=0)
    abs_tol: float = Field(default=DEFAULT_ABS_TOL, gt=0)
    max_step: float = Field(default=0.25, gt=0)
    method: Literal["DOP853", "RK45"] = "DOP853"


class SweepAxis(BaseModel):
    """Linear axis specification (``count`` points from ``start`` to ``stop`` inclusive)."""

    model_config = ConfigDict(frozen=True)

    name: str
    start: float
    stop: float
    count: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_order(self) -> "SweepAxis":
        if not self.start < self.stop:
            raise ValueError(f"axis {self.name!r}: start must be < stop")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


class RunConfig(BaseModel):
    """Everything a CLI/API run needs: physics, initial pair, axes and output."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    v0: float = Field(default=DEFAULT_V0, gt=0)
    delta_e: float = Field(default=DEFAULT_DELTA_E, gt=0)
    e1: float = DEFAULT_E1
    omega: Optional[float] = None
    tau: float = Field(default=DEFAULT_TAU, gt=0)
    e_r: Optional[float] = Field(default=None, gt=0)
    lambda_t: Optional[float] = Field(default=None, ge=0)
    e_meas: Optional[float] = None

    b: float = Field(default=DEFAULT_B, ge=0, le=1)
    a_phase: float = 0.0
    b_phase: float = 0.0
    cut: CutSelection = "all"

    t_min: Optional[float] = None
    t_max: Optional[float] = None
    t_steps: Optional[int] = None
    lt_min: Optional[float] = None
    lt_max: Optional[float] = None
    lt_steps: Optional[int] = None
    b_min: float = 0.0
    b_max: float = 1.0
    b_steps: int = 51
    tau_min: Optional[float] = None
    tau_max: Optional[float] = None
    tau_steps: Optional[int] = None

    out: Optional[str] = None
    verify: bool = False
    fig3: bool = False
    seed: int = 20240607

    @model_validator(mode="after")
    def _check_exclusive(self) -> "RunConfig":
        if self.e_r is not None and self.lambda_t is not None:
            raise ValueError("--e-r and --lambda-t are mutually exclusive")
        return self

    @property
    def cuts(self) -> List[Cut]:
        return ["s", "r", "d"] if self.cut == "all" else [self.cut]

    def system_config(self, lambda_t: Optional[float] = None) -> SystemConfig:
        """SystemConfig for this run, optionally overriding the precision parameter."""

        lt = lambda_t if lambda_t is not None else self.lambda_t
        if lt is not None:
            cfg = SystemConfig.from_lambda_t(
                lt,
                v0=self.v0,
                delta_e=self.delta_e,
                tau=self.tau,
                e1=self.e1,
                omega=self.omega,
            )
            if self.e_meas is not None:
                cfg = cfg.model_copy(update={"e_meas": self.e_meas})
            return cfg

        return SystemConfig(
            e1=self.e1,
            e2=self.e1 + self.delta_e,
            v0=self.v0,
            omega=self.omega,
            tau=self.tau,
            e_r=self.e_r if self.e_r is not None else DEFAULT_E_R,
            e_meas=self.e_meas,
        )

    def axis(self, prefix: str, default: Tuple[float, float, int]) -> SweepAxis:
        """Build the ``t``/``lt``/``tau`` axis, filling unset bounds from ``default``."""

        start = getattr(self, f"{prefix}_min")
        stop = getattr(self, f"{prefix}_max")
        count = getattr(self, f"{prefix}_steps")
        return SweepAxis(
            name=prefix,
            start=default[0] if start is None else start,
            stop=default[1] if stop is None else stop,
            count=default[2] if count is None else count,
        )

    def b_axis(self) -> SweepAxis:
        return SweepAxis(name="b", start=self.b_min, stop=self.b_max, count=self.b_steps)


# Campos cuyo error de validacion es un problema de dominio fisico (no de configuracion).
_PHYSICAL_FIELDS = {"v0", "delta_e", "tau", "e_r", "lambda_t", "b"}


def build_run_config(values: Mapping[str, Any]) -> RunConfig:
    """Validate merged settings into a RunConfig.

    Unknown keys raise :class:`SweepConfigError`; pydantic errors become
    :class:`DomainViolation` for physical parameters and
    :class:`SweepConfigError` for everything else.
    """

    unknown = sorted(set(values) - set(RunConfig.model_fields))
    if unknown:
        raise SweepConfigError(f"unknown setting(s): {', '.join(unknown)}")

    try:
        return RunConfig(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = str(first["loc"][0]) if first.get("loc") else ""
        message = f"{field or 'config'}: {first['msg']}"
        if field in _PHYSICAL_FIELDS:
            raise DomainViolation(message) from exc
        raise SweepConfigError(message) from exc
