"""Direct integration of the non-Hermitian Schrodinger equation.

Independent numerical counterpart of :mod:`qmonitor.dynamics`: instead of the
closed forms, the lab-frame amplitudes (A1, A2) of |0>, |1> are integrated
with an adaptive embedded Runge-Kutta stepper from scipy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from qmonitor.config import PASSAGE_THRESHOLD
from qmonitor.dynamics import compute_rates, effective_hamiltonian
from qmonitor.exceptions import DomainViolation, IntegrationFailure, NoPassageRoot
from qmonitor.models import IntegratorSettings, SystemConfig

logger = logging.getLogger(__name__)

__all__ = ["AmplitudeTrajectory", "ode_integrate_amplitudes", "passage_time_root_find"]

# Ventana de busqueda del tiempo de paso, en unidades de tau.
PASSAGE_WINDOW_TAUS = 10.0


@dataclass(frozen=True)
class AmplitudeTrajectory:
    """Sampled amplitudes of an integration run.

    ``amplitudes[k]`` holds (A1, A2) at ``times[k]``; ``dense`` is the
    continuous interpolant when it was requested.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    nfev: int
    message: str
    dense: Optional[Callable[[float], np.ndarray]] = None

    @property
    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    @property
    def p11(self) -> np.ndarray:
        """Population of |1> (the initial level for c0 = (0, 1))."""

        return np.abs(self.amplitudes[:, 1]) ** 2

    @property
    def p10(self) -> np.ndarray:
        return np.abs(self.amplitudes[:, 0]) ** 2

    def at(self, t: float) -> Tuple[complex, complex]:
        if self.dense is None:
            raise ValueError("trajectory was integrated without dense output")
        a1, a2 = self.dense(t)
        return complex(a1), complex(a2)


def ode_integrate_amplitudes(
    cfg: SystemConfig,
    c0: Sequence[complex],
    t_end: float,
    settings: Optional[IntegratorSettings] = None,
    *,
    t_eval: Optional[Sequence[float]] = None,
    dense: bool = False,
) -> AmplitudeTrajectory:
    """Integrate i dA/dt = M(t) A from 0 to ``t_end`` starting at ``c0``.

    M(t) is :func:`qmonitor.dynamics.effective_hamiltonian`. Works for any
    drive frequency; the norm |A1|^2 + |A2|^2 does not grow when the decay
    rates are non-negative.
    """

    settings = settings or IntegratorSettings()
    rates = compute_rates(cfg)
    if not (t_end >= 0 and math.isfinite(t_end)):
        raise DomainViolation(f"t_end must be finite and non-negative, got {t_end!r}")

    y0 = np.asarray(c0, dtype=complex)
    if y0.shape != (2,):
        raise DomainViolation(f"c0 must hold two amplitudes, got shape {y0.shape}")

    if t_end == 0:
        return AmplitudeTrajectory(
            times=np.zeros(1), amplitudes=y0[np.newaxis, :].copy(), nfev=0, message="t_end = 0"
        )

    times = None if t_eval is None else np.asarray(t_eval, dtype=float)
    if times is not None and (times.min() < 0 or times.max() > t_end):
        raise DomainViolation("t_eval must lie inside [0, t_end]")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return -1j * (effective_hamiltonian(cfg, rates, t) @ y)

    try:
        sol = solve_ivp(
            rhs,
            (0.0, float(t_end)),
            y0,
            method=settings.method,
            t_eval=times,
            dense_output=dense,
            rtol=settings.rel_tol,
            atol=settings.abs_tol,
            max_step=settings.max_step,
        )
    except (ValueError, ArithmeticError) as exc:
        raise IntegrationFailure(f"integration failed: {exc}") from exc

    if not sol.success:
        failed_at = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationFailure(f"integration failed: {sol.message}", time=failed_at)

    logger.debug(
        "integrated to t=%g with %s: nfev=%d, %d samples", t_end, settings.method, sol.nfev, sol.t.size
    )
    return AmplitudeTrajectory(
        times=sol.t,
        amplitudes=sol.y.T.copy(),
        nfev=int(sol.nfev),
        message=str(sol.message),
        dense=sol.sol if dense else None,
    )


def passage_time_root_find(
    cfg: SystemConfig, settings: Optional[IntegratorSettings] = None
) -> float:
    """First zero of P11 on the integrated trajectory, searched over [0, 10 tau].

    At resonance the co-rotating amplitude exp(i (E_mean + omega/2) t) A2(t)
    is real, so the zero of P11 (a double root) is a sign change of that
    real function. The change is bracketed on a uniform scan of the dense
    solution and refined with Brent's method to 1e-10 in t.
    """

    rates = compute_rates(cfg)
    if not rates.is_resonant:
        raise DomainViolation("passage-time root finding requires resonance (omega = e2 - e1)")

    window = PASSAGE_WINDOW_TAUS * cfg.tau
    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), window, settings, dense=True)
    phase_rate = 0.5 * (cfg.e1 + cfg.e2) + 0.5 * cfg.omega

    def real_amplitude(t: float) -> float:
        a2 = trajectory.dense(t)[1]
        return float((np.exp(1j * phase_rate * t) * a2).real)

    # Paso de busqueda: bastante menor que la escala de oscilacion y de decaimiento.
    fastest = max(cfg.v0, abs(rates.omega_cap) / 4.0, 1e-12)
    step = min(window / 4000.0, 0.1 / fastest)
    grid = np.arange(0.0, window + step, step)
    grid[-1] = min(grid[-1], window)

    values = (np.exp(1j * phase_rate * grid) * trajectory.dense(grid)[1]).real
    start_sign = np.sign(values[0])

    for i in range(1, grid.size):
        if values[i] == 0.0:
            return float(grid[i])
        if np.sign(values[i]) != start_sign:
            root = float(brentq(real_amplitude, grid[i - 1], grid[i], xtol=1e-10))
            logger.debug("passage root %.12g bracketed in [%g, %g]", root, grid[i - 1], grid[i])
            p11 = abs(trajectory.dense(root)[1]) ** 2
            if p11 > PASSAGE_THRESHOLD:
                raise IntegrationFailure(
                    f"P11 = {p11:.3e} at the refined root exceeds {PASSAGE_THRESHOLD:g}", time=root
                )
            return root

    raise NoPassageRoot(f"P11 stays above {PASSAGE_THRESHOLD:g} on [0, {window:g}]")
