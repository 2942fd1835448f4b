"""Verification suite: closed forms against the numerical oracles."""

from __future__ import annotations

import logging
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from qmonitor.correlations import (
    InitialPair,
    concurrence_closed_form,
    entropies_and_mutual_information,
    quantum_correlation_closed_form,
    reduced_density,
    wootters_concurrence_general,
)
from qmonitor.dynamics import compute_rates, passage_time, transition_probabilities
from qmonitor.exceptions import QMonitorError
from qmonitor.models import IntegratorSettings, RunConfig
from qmonitor.oracles import discord_brute_force, ode_integrate_amplitudes, passage_time_root_find

logger = logging.getLogger(__name__)

__all__ = [
    "VerificationStatus",
    "PROBABILITY_LAMBDAS",
    "PASSAGE_LAMBDAS",
    "run_verification",
    "check_probability_rows",
]


class VerificationStatus(str, Enum):
    VERIFIED = "VERIFIED"
    TOLERANCE_EXCEEDED = "TOLERANCE_EXCEEDED"
    ORACLE_FAILURE = "ORACLE_FAILURE"


PROBABILITY_LAMBDAS = (0.0, 0.5, 2.0, 4.0, 6.0, 8.0)
PASSAGE_LAMBDAS = (0.5, 4.0, 8.0)

PROBABILITY_TOLERANCE = 1e-8
PASSAGE_TOLERANCE = 1e-8
CONCURRENCE_TOLERANCE = 1e-10
DISCORD_TOLERANCE = 1e-3

# Muestreo aleatorio de pares sobre todo el dominio: b y |amp|^2 en [0, 1].
DRAW_B_RANGE = (0.0, 1.0)
DRAW_P_RANGE = (0.0, 1.0)


def _check(name: str, deviation: float, tolerance: float, **extra: Any) -> Dict[str, Any]:
    return {
        "name": name,
        "max_deviation": float(deviation),
        "tolerance": tolerance,
        "passed": bool(deviation <= tolerance),
        **extra,
    }


# --------------------------------------------------------------------------- #
# 1) Probabilidades: forma cerrada vs integracion
# --------------------------------------------------------------------------- #
def _probability_deviation(
    run: RunConfig, lambda_t: float, times: np.ndarray, settings: IntegratorSettings
) -> float:
    cfg = run.system_config(lambda_t=lambda_t)
    rates = compute_rates(cfg)
    p11, p10 = transition_probabilities(rates, cfg.v0, times)
    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), float(times.max()), settings, t_eval=times)
    return float(max(np.max(np.abs(p11 - trajectory.p11)), np.max(np.abs(p10 - trajectory.p10))))


def check_probability_rows(
    run: RunConfig,
    rows: Iterable[Mapping[str, Any]],
    settings: Optional[IntegratorSettings] = None,
) -> Dict[str, Any]:
    """Re-check ``p11``/``p10`` of sweep rows against the ODE oracle, one integration per lambda_t."""

    settings = settings or IntegratorSettings()
    by_lambda: Dict[float, List[Mapping[str, Any]]] = {}
    for row in rows:
        by_lambda.setdefault(float(row["lambda_t"]), []).append(row)

    worst = 0.0
    for lambda_t, group in by_lambda.items():
        group = sorted(group, key=lambda r: float(r["t"]))
        times = np.array([float(r["t"]) for r in group])
        cfg = run.system_config(lambda_t=lambda_t)
        if times.max() == 0:
            continue
        trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), float(times.max()), settings, t_eval=times)
        p11 = np.array([float(r["p11"]) for r in group])
        p10 = np.array([float(r["p10"]) for r in group])
        worst = max(
            worst,
            float(np.max(np.abs(p11 - trajectory.p11))),
            float(np.max(np.abs(p10 - trajectory.p10))),
        )
    return _check("probability_rows_vs_ode", worst, PROBABILITY_TOLERANCE, rows_by_lambda=len(by_lambda))


# --------------------------------------------------------------------------- #
# 2) Correlaciones: pares aleatorios y rejilla (b, |amp|^2)
# --------------------------------------------------------------------------- #
def _random_pairs(rng: np.random.Generator, count: int):
    for _ in range(count):
        b = rng.uniform(*DRAW_B_RANGE)
        p = rng.uniform(*DRAW_P_RANGE)
        alpha, beta, gamma = rng.uniform(0.0, 2.0 * np.pi, size=3)
        pair = InitialPair.from_b(b, a_phase=alpha, b_phase=beta)
        yield pair, np.sqrt(p) * np.exp(1j * gamma)


def _concurrence_deviation(rng: np.random.Generator, count: int) -> float:
    worst = 0.0
    for pair, amp in _random_pairs(rng, count):
        closed = concurrence_closed_form(pair, amp)
        oracle = wootters_concurrence_general(reduced_density(pair, amp))
        worst = max(worst, abs(closed - oracle))
    return worst


def _discord_deviations(b_values: Sequence[float], p_values: Sequence[float]):
    worst_q = 0.0
    worst_i = 0.0
    for b in b_values:
        pair = InitialPair.from_b(float(b))
        for p in p_values:
            amp = complex(np.sqrt(p))
            rho = reduced_density(pair, amp)
            q_closed = quantum_correlation_closed_form(pair, amp)
            oracle = discord_brute_force(rho)
            _, _, _, mutual = entropies_and_mutual_information(rho)
            worst_q = max(worst_q, abs(q_closed - oracle.quantum_corr), abs(q_closed - oracle.classical_corr))
            worst_i = max(worst_i, abs(mutual - 2.0 * q_closed))
    return worst_q, worst_i


# --------------------------------------------------------------------------- #
# 3) Suite completa
# --------------------------------------------------------------------------- #
def run_verification(
    run: Optional[RunConfig] = None,
    settings: Optional[IntegratorSettings] = None,
    *,
    quick: bool = False,
) -> Dict[str, Any]:
    """
    Ejecuta todas las comparaciones forma cerrada / oraculo.

    Nunca lanza por una discrepancia: devuelve un informe con ``valid``,
    ``status``, ``status_detail``, ``checks`` y ``errors``. ``quick`` reduce
    las rejillas (util en la API y en tests rapidos).
    """

    run = run or RunConfig()
    settings = settings or IntegratorSettings()
    checks: List[Dict[str, Any]] = []
    errors: List[str] = []
    oracle_failed = False

    t_max = run.t_max if run.t_max is not None else 8.0
    times = np.linspace(0.0, t_max, 41 if quick else 200)
    draws = 100 if quick else 1000
    grid_size = 3 if quick else 10

    def _guarded(name: str, fn) -> None:
        nonlocal oracle_failed
        try:
            checks.append(fn())
        except QMonitorError as exc:
            oracle_failed = True
            errors.append(f"{name}: {exc}")
            logger.warning("verification check %s failed: %s", name, exc)

    for lambda_t in PROBABILITY_LAMBDAS:
        _guarded(
            f"probabilities_vs_ode[lambda_t={lambda_t:g}]",
            lambda lt=lambda_t: _check(
                f"probabilities_vs_ode[lambda_t={lt:g}]",
                _probability_deviation(run, lt, times, settings),
                PROBABILITY_TOLERANCE,
            ),
        )

    def _passage_check(lt: float) -> Dict[str, Any]:
        cfg = run.system_config(lambda_t=lt)
        closed = passage_time(compute_rates(cfg), cfg.v0)
        found = passage_time_root_find(cfg, settings)
        return _check(
            f"passage_time_vs_root_find[lambda_t={lt:g}]",
            abs(closed - found),
            PASSAGE_TOLERANCE,
            closed_form=closed,
            root_find=found,
        )

    for lambda_t in PASSAGE_LAMBDAS:
        _guarded(f"passage_time_vs_root_find[lambda_t={lambda_t:g}]", lambda lt=lambda_t: _passage_check(lt))

    rng = np.random.default_rng(run.seed)
    _guarded(
        "concurrence_vs_wootters",
        lambda: _check("concurrence_vs_wootters", _concurrence_deviation(rng, draws), CONCURRENCE_TOLERANCE, draws=draws),
    )

    def _discord_checks() -> Dict[str, Any]:
        b_values = np.linspace(0.0, 1.0, grid_size)
        p_values = np.linspace(0.0, 1.0, grid_size)
        worst_q, worst_i = _discord_deviations(b_values, p_values)
        checks.append(_check("mutual_information_vs_2q", worst_i, DISCORD_TOLERANCE, grid=grid_size))
        return _check("quantum_correlation_vs_discord", worst_q, DISCORD_TOLERANCE, grid=grid_size)

    _guarded("quantum_correlation_vs_discord", _discord_checks)

    failing = [c["name"] for c in checks if not c["passed"]]
    errors.extend(f"{name}: tolerance exceeded" for name in failing)

    if oracle_failed:
        status = VerificationStatus.ORACLE_FAILURE
    elif failing:
        status = VerificationStatus.TOLERANCE_EXCEEDED
    else:
        status = VerificationStatus.VERIFIED

    logger.info("verification finished: %s (%d checks, %d failing)", status.value, len(checks), len(failing))
    return {
        "valid": status == VerificationStatus.VERIFIED,
        "status": status.value,
        "status_detail": ",".join(failing) if failing else None,
        "checks": checks,
        "errors": errors,
    }
