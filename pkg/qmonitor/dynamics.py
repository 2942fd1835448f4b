"""Closed-form dynamics of a continuously measured two-level system.

El sistema de dos niveles (|0>, |1>) acoplado a un potencial externo
V(t) = V0 e^{i w t} evoluciona bajo un Hamiltoniano efectivo no hermitiano: la
medida continua de la energia con error E_r introduce tasas de decaimiento

    lambda_i = (E_i - E)^2 / (2 tau E_r^2)        lambda_t = dE^2 / (2 tau E_r^2)

Este modulo agrupa:

- tasas de medida y parametros complejos del propagador (q, kappa, theta)
- clasificacion de regimen: coherente, incoherente o punto excepcional (EP)
- probabilidades de transicion P11, P10 en forma cerrada (resonancia)
- propagador general 2x2 (tambien fuera de resonancia)
- precision critica E_c y tiempo de paso tau_p

Conventions: hbar = 1, the system starts in |1>, ``P11`` is the survival
probability of |1> and ``P10`` the probability of having moved to |0>. Both
components share the decay envelope exp(-(lambda1 + lambda2) t / 4); with the
default measured energy E = E1 this is exp(-lambda_t t / 4).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from qmonitor.config import EP_RELATIVE_BAND, RESONANCE_TOLERANCE
from qmonitor.exceptions import DomainViolation, NoPassageRoot
from qmonitor.models import SystemConfig

logger = logging.getLogger(__name__)

TimeLike = Union[float, np.ndarray]
AmplitudePair = Tuple[complex, complex]

__all__ = [
    "MeasurementRates",
    "Regime",
    "compute_rates",
    "resonant_rate",
    "classify_regime",
    "critical_precision",
    "resonant_amplitudes",
    "transition_probabilities",
    "population_difference",
    "detector_probability",
    "propagator_matrix",
    "general_propagator",
    "physical_amplitudes",
    "effective_hamiltonian",
    "rotating_generator",
    "eigenvalues",
    "passage_time",
]


# ============================================================================
# Tipos
# ============================================================================


class Regime(str, Enum):
    COHERENT = "Coherent"
    INCOHERENT = "Incoherent"
    EXCEPTIONAL_POINT = "ExceptionalPoint"


@dataclass(frozen=True)
class MeasurementRates:
    """Decay quantities and complex propagator parameters for one SystemConfig."""

    lambda1: float
    lambda2: float
    lambda_t: float
    omega_cap: float
    q: complex
    kappa: complex
    cos_theta: complex
    kappa0: float
    v0: float

    @property
    def envelope_rate(self) -> float:
        """Amplitude decay rate shared by both levels, (lambda1 + lambda2) / 4."""

        return (self.lambda1 + self.lambda2) / 4.0

    @property
    def is_resonant(self) -> bool:
        return abs(self.q.real) <= RESONANCE_TOLERANCE * max(1.0, abs(self.omega_cap))


# ============================================================================
# Tasas y regimen
# ============================================================================


def resonant_rate(omega_cap: float, v0: float) -> float:
    """kappa0 = sqrt(|V0^2 - (Omega/4)^2|), real and non-negative in every regime."""

    return math.sqrt(abs(v0 * v0 - (omega_cap / 4.0) ** 2))


def compute_rates(cfg: SystemConfig) -> MeasurementRates:
    """Derive lambda1, lambda2, lambda_t, Omega, q, kappa, cos(theta) and kappa0."""

    cfg.validate_domain()

    if math.isinf(cfg.e_r):
        lambda1 = lambda2 = lambda_t = 0.0
    else:
        denom = 2.0 * cfg.tau * cfg.e_r * cfg.e_r
        lambda1 = (cfg.e1 - cfg.e_meas) ** 2 / denom
        lambda2 = (cfg.e2 - cfg.e_meas) ** 2 / denom
        lambda_t = cfg.delta_e ** 2 / denom

    omega_cap = lambda2 - lambda1
    q = 0.5 * complex(cfg.omega - cfg.delta_e, omega_cap / 2.0)
    kappa = cmath.sqrt(q * q + cfg.v0 * cfg.v0)
    # En el EP exacto kappa = 0 y theta no esta definido.
    cos_theta = q / kappa if kappa != 0 else complex("nan")

    rates = MeasurementRates(
        lambda1=lambda1,
        lambda2=lambda2,
        lambda_t=lambda_t,
        omega_cap=omega_cap,
        q=q,
        kappa=kappa,
        cos_theta=cos_theta,
        kappa0=resonant_rate(omega_cap, cfg.v0),
        v0=cfg.v0,
    )
    logger.debug("rates for %s: %s", cfg, rates)
    return rates


def classify_regime(rates: MeasurementRates, v0: float) -> Regime:
    """Coherent if V0 > |Omega|/4, incoherent if below, EP inside the relative band.

    With the default measured energy E = E1, |Omega| equals lambda_t.
    """

    decay = abs(rates.omega_cap)
    band = EP_RELATIVE_BAND * max(1.0, 4.0 * v0)
    if abs(4.0 * v0 - decay) <= band:
        return Regime.EXCEPTIONAL_POINT
    if v0 > decay / 4.0:
        return Regime.COHERENT
    return Regime.INCOHERENT


def critical_precision(cfg: SystemConfig) -> float:
    """E_c = dE / (2 sqrt(2 tau V0)): the precision at which lambda_t = 4 V0."""

    if not cfg.tau > 0:
        raise DomainViolation(f"measurement duration tau must be positive, got {cfg.tau!r}")
    if not cfg.v0 > 0:
        raise DomainViolation(f"coupling v0 must be positive, got {cfg.v0!r}")
    return abs(cfg.delta_e) / (2.0 * math.sqrt(2.0 * cfg.tau * cfg.v0))


# ============================================================================
# Probabilidades en resonancia
# ============================================================================


def _require_resonance(rates: MeasurementRates) -> None:
    if not rates.is_resonant:
        raise DomainViolation(
            "closed-form probabilities require resonance (omega = e2 - e1); "
            "use general_propagator or the ODE oracle off resonance"
        )


def _check_times(t: TimeLike) -> np.ndarray:
    times = np.asarray(t, dtype=float)
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise DomainViolation("time must be finite and non-negative")
    return times


def _decayed_factors(
    rates: MeasurementRates, v0: float, times: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Return (e^{-Lt} c(t), e^{-Lt} s(t)) for the regime-matched closed form.

    c(t) = cos(k t) - (Omega / 4k) sin(k t) and s(t) = sin(k t) / k in the
    coherent regime, their hyperbolic continuations in the incoherent one and
    the k -> 0 limits 1 - Omega t / 4, t at the exceptional point.
    """

    regime = classify_regime(rates, v0)
    r = rates.omega_cap / 4.0
    decay = rates.envelope_rate
    k = resonant_rate(rates.omega_cap, v0)

    if regime is Regime.COHERENT:
        envelope = np.exp(-decay * times)
        sin_over_k = np.sin(k * times) / k
        c = np.cos(k * times) - r * sin_over_k
        return envelope * c, envelope * sin_over_k

    if regime is Regime.INCOHERENT:
        # cosh/sinh fusionados con la envolvente: k < decay, sin overflow.
        grow = np.exp((k - decay) * times)
        shrink = np.exp(-(k + decay) * times)
        c = 0.5 * ((1.0 - r / k) * grow + (1.0 + r / k) * shrink)
        s = (grow - shrink) / (2.0 * k)
        return c, s

    envelope = np.exp(-decay * times)
    return envelope * (1.0 - r * times), envelope * times


def _as_output(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


def resonant_amplitudes(rates: MeasurementRates, v0: float, t: TimeLike):
    """Complex amplitudes (xi, eta) of |1> and |0> at resonance, starting from |1>.

    xi is real (regime-matched C factor times the envelope); eta carries the
    -i phase of the off-diagonal propagator entry.
    """

    _require_resonance(rates)
    times = _check_times(t)
    c, s = _decayed_factors(rates, v0, times)
    xi = c.astype(complex)
    eta = -1j * v0 * s
    if times.ndim == 0:
        return complex(xi), complex(eta)
    return xi, eta


def transition_probabilities(rates: MeasurementRates, v0: float, t: TimeLike):
    """(P11, P10) at time ``t`` for the initial state |1>, at resonance."""

    _require_resonance(rates)
    times = _check_times(t)
    c, s = _decayed_factors(rates, v0, times)
    p11 = c * c
    p10 = (v0 * s) ** 2
    scalar = times.ndim == 0
    return _as_output(p11, scalar), _as_output(p10, scalar)


def population_difference(rates: MeasurementRates, v0: float, t: TimeLike):
    """P11 - P10; at the EP this is (1 - lambda_t t / 2) e^{-lambda_t t / 2}."""

    p11, p10 = transition_probabilities(rates, v0, t)
    return p11 - p10


def detector_probability(rates: MeasurementRates, v0: float, t: TimeLike):
    """Probability 1 - P11 - P10 carried away by the monitoring device."""

    p11, p10 = transition_probabilities(rates, v0, t)
    return np.maximum(1.0 - p11 - p10, 0.0) if isinstance(p11, np.ndarray) else max(
        1.0 - p11 - p10, 0.0
    )


# ============================================================================
# Propagador general (cualquier omega)
# ============================================================================


def _sin_over(kappa: complex, t: float) -> complex:
    if abs(kappa * t) < 1e-8:
        return complex(t) * (1.0 - (kappa * t) ** 2 / 6.0)
    return cmath.sin(kappa * t) / kappa


def propagator_matrix(rates: MeasurementRates, t: float) -> np.ndarray:
    """The 2x2 coefficient matrix exp(-i K t), K = [[q, V0], [V0, -q]].

    Entries: cos(kt) -/+ i cos(theta) sin(kt) on the diagonal and
    -i sin(theta) sin(kt) off it; its determinant is identically 1.
    """

    if t < 0:
        raise DomainViolation("time must be non-negative")
    kt = rates.kappa * t
    cos_kt = cmath.cos(kt)
    # cos(theta) sin(kt) = q sin(kt)/kappa, bien definido tambien en kappa = 0
    sin_over = _sin_over(rates.kappa, t)
    alpha1 = rates.q * sin_over
    alpha2 = rates.v0 * sin_over
    return np.array(
        [[cos_kt - 1j * alpha1, -1j * alpha2], [-1j * alpha2, cos_kt + 1j * alpha1]],
        dtype=complex,
    )


def general_propagator(rates: MeasurementRates, c0: AmplitudePair, t: float) -> AmplitudePair:
    """Propagate slowly varying coefficients (C1, C2) from 0 to ``t``."""

    c = propagator_matrix(rates, t) @ np.asarray(c0, dtype=complex)
    return complex(c[0]), complex(c[1])


def physical_amplitudes(
    cfg: SystemConfig, rates: MeasurementRates, c0: AmplitudePair, t: float
) -> AmplitudePair:
    """Lab-frame amplitudes (A1, A2) of |0>, |1> at time ``t``.

    Applies the shared envelope exp(-(lambda1 + lambda2) t / 4) and the
    co-rotating phases exp(-i (E_mean -/+ omega / 2) t) to the coefficients of
    :func:`general_propagator`. This is the exact solution of the equation
    integrated by the ODE oracle, so it also holds off resonance.
    """

    c1, c2 = general_propagator(rates, c0, t)
    e_mean = 0.5 * (cfg.e1 + cfg.e2)
    envelope = math.exp(-rates.envelope_rate * t)
    a1 = envelope * cmath.exp(-1j * (e_mean - cfg.omega / 2.0) * t) * c1
    a2 = envelope * cmath.exp(-1j * (e_mean + cfg.omega / 2.0) * t) * c2
    return a1, a2


def effective_hamiltonian(cfg: SystemConfig, rates: MeasurementRates, t: float) -> np.ndarray:
    """Lab-frame generator M(t) of i dA/dt = M(t) A, diagonal-decay model."""

    drive = cfg.v0 * cmath.exp(1j * cfg.omega * t)
    return np.array(
        [
            [cfg.e1 - 0.5j * rates.lambda1, drive],
            [drive.conjugate(), cfg.e2 - 0.5j * rates.lambda2],
        ],
        dtype=complex,
    )


def rotating_generator(rates: MeasurementRates) -> np.ndarray:
    """Time-independent generator in the frame co-rotating with the drive."""

    decay = rates.envelope_rate
    return np.array(
        [[rates.q - 1j * decay, rates.v0], [rates.v0, -rates.q - 1j * decay]],
        dtype=complex,
    )


def eigenvalues(rates: MeasurementRates) -> Tuple[complex, complex]:
    """Eigenvalues -i(lambda1 + lambda2)/4 +/- kappa; they coalesce at the EP."""

    centre = -1j * rates.envelope_rate
    return centre + rates.kappa, centre - rates.kappa


# ============================================================================
# Tiempo de paso
# ============================================================================


def passage_time(rates: MeasurementRates, v0: float) -> float:
    """Smallest t > 0 with P11(t) = 0 (closed form, resonance).

    coherent:   atan2(4 k0, Omega) / k0        (arctan(4 k0 / lambda_t) / k0 for E = E1)
    incoherent: artanh(4 k0 / Omega) / k0
    EP:         4 / Omega

    ``lambda_t = 0`` gives pi / (2 V0). When the measured energy makes the
    initial level the non-decaying one (Omega < 0) there is no zero outside
    the coherent regime and :class:`NoPassageRoot` is raised.
    """

    _require_resonance(rates)
    omega_cap = rates.omega_cap
    regime = classify_regime(rates, v0)
    k = resonant_rate(omega_cap, v0)

    if regime is Regime.COHERENT:
        tau_p = math.atan2(4.0 * k, omega_cap) / k
    elif omega_cap <= 0:
        raise NoPassageRoot(
            f"P11 has no zero in the {regime.value} regime when Omega={omega_cap!r} <= 0"
        )
    elif regime is Regime.INCOHERENT:
        # artanh(4k/W) = log((W + 4k) / (4 V0)), exacto porque W^2 - 16k^2 = 16 V0^2
        tau_p = math.log((omega_cap + 4.0 * k) / (4.0 * v0)) / k
    else:
        tau_p = 4.0 / omega_cap

    logger.debug("passage time %.12g (%s, Omega=%.6g)", tau_p, regime.value, omega_cap)
    return tau_p
