from __future__ import annotations

import math

import numpy as np
import pytest

from qmonitor.correlations import (
    InitialPair,
    entropies_and_mutual_information,
    quantum_correlation_closed_form,
    reduced_density,
)
from qmonitor.dynamics import compute_rates, passage_time, transition_probabilities
from qmonitor.exceptions import DomainViolation, IntegrationFailure, NoPassageRoot
from qmonitor.models import SystemConfig
from qmonitor.oracles import (
    DiscordResult,
    discord_brute_force,
    ode_integrate_amplitudes,
    passage_time_root_find,
)
from qmonitor.oracles import ode as ode_module


# --------------------------------------------------------------------------- #
# ode_integrate_amplitudes
# --------------------------------------------------------------------------- #
def test_ode_rabi_limit():
    cfg = SystemConfig.from_lambda_t(0.0)
    times = np.linspace(0.0, 6.0, 25)

    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), 6.0, t_eval=times)

    np.testing.assert_allclose(trajectory.p11, np.cos(times) ** 2, atol=1e-8)
    np.testing.assert_allclose(trajectory.p10, np.sin(times) ** 2, atol=1e-8)
    np.testing.assert_allclose(trajectory.norms, 1.0, atol=1e-8)


def test_ode_exceptional_point_values():
    cfg = SystemConfig.from_lambda_t(4.0)

    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), 1.0, t_eval=[1.0])

    assert trajectory.p11[-1] == pytest.approx(0.0, abs=1e-8)
    assert trajectory.p10[-1] == pytest.approx(math.exp(-2.0), abs=1e-8)


@pytest.mark.parametrize("lambda_t", [0.0, 0.5, 2.0, 4.0, 6.0, 8.0])
def test_ode_matches_closed_forms(lambda_t):
    cfg = SystemConfig.from_lambda_t(lambda_t)
    rates = compute_rates(cfg)
    times = np.linspace(0.0, 8.0, 200)

    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), 8.0, t_eval=times)
    p11, p10 = transition_probabilities(rates, cfg.v0, times)

    np.testing.assert_allclose(trajectory.p11, p11, atol=1e-8)
    np.testing.assert_allclose(trajectory.p10, p10, atol=1e-8)


def test_ode_norm_never_grows(rng):
    times = np.linspace(0.0, 8.0, 161)
    for _ in range(20):
        cfg = SystemConfig(
            v0=rng.uniform(0.2, 2.0),
            omega=rng.uniform(0.5, 1.5),
            tau=rng.uniform(1.0, 10.0),
            e_r=rng.uniform(0.3, 2.0),
            e_meas=rng.uniform(-0.5, 1.5),
        )
        theta, phase = rng.uniform(0.0, np.pi / 2), rng.uniform(0.0, 2 * np.pi)
        c0 = (math.cos(theta), math.sin(theta) * np.exp(1j * phase))

        norms = ode_integrate_amplitudes(cfg, c0, 8.0, t_eval=times).norms

        assert norms[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(norms) <= 1e-10)


def test_ode_zero_duration_returns_initial_point():
    cfg = SystemConfig.from_lambda_t(2.0)

    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), 0.0)

    assert trajectory.nfev == 0
    assert trajectory.times.tolist() == [0.0]
    assert trajectory.amplitudes[0].tolist() == [0.0, 1.0]


def test_ode_dense_output_interpolates():
    cfg = SystemConfig.from_lambda_t(2.0)
    rates = compute_rates(cfg)

    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), 2.0, dense=True)
    a1, a2 = trajectory.at(1.0)
    p11, p10 = transition_probabilities(rates, cfg.v0, 1.0)

    assert abs(a2) ** 2 == pytest.approx(p11, abs=1e-8)
    assert abs(a1) ** 2 == pytest.approx(p10, abs=1e-8)


def test_ode_without_dense_output_rejects_at():
    cfg = SystemConfig.from_lambda_t(2.0)
    trajectory = ode_integrate_amplitudes(cfg, (0.0, 1.0), 1.0)

    with pytest.raises(ValueError):
        trajectory.at(0.5)


@pytest.mark.parametrize(
    "c0, t_end, t_eval",
    [((0.0, 1.0), -1.0, None), ((0.0, 1.0, 0.0), 1.0, None), ((0.0, 1.0), 1.0, [2.0])],
    ids=["negative-t", "bad-shape", "t-eval-outside"],
)
def test_ode_rejects_bad_arguments(c0, t_end, t_eval):
    cfg = SystemConfig.from_lambda_t(2.0)

    with pytest.raises(DomainViolation):
        ode_integrate_amplitudes(cfg, c0, t_end, t_eval=t_eval)


def test_ode_failure_becomes_integration_failure(monkeypatch):
    class FailedSolution:
        success = False
        message = "Required step size is less than spacing between numbers."
        t = np.array([0.0, 0.37])

    monkeypatch.setattr(ode_module, "solve_ivp", lambda *args, **kwargs: FailedSolution())
    cfg = SystemConfig.from_lambda_t(2.0)

    with pytest.raises(IntegrationFailure) as exc_info:
        ode_integrate_amplitudes(cfg, (0.0, 1.0), 1.0)

    assert exc_info.value.time == pytest.approx(0.37)


# --------------------------------------------------------------------------- #
# passage_time_root_find
# --------------------------------------------------------------------------- #
def test_root_find_at_exceptional_point():
    cfg = SystemConfig.from_lambda_t(4.0)

    assert passage_time_root_find(cfg) == pytest.approx(1.0, abs=1e-8)


def test_root_find_weak_measurement_limit():
    cfg = SystemConfig.from_lambda_t(1e-6)

    assert passage_time_root_find(cfg) == pytest.approx(math.pi / 2, abs=1e-5)


@pytest.mark.parametrize("lambda_t", [0.5, 8.0])
def test_root_find_matches_closed_form(lambda_t):
    cfg = SystemConfig.from_lambda_t(lambda_t)

    expected = passage_time(compute_rates(cfg), cfg.v0)

    assert passage_time_root_find(cfg) == pytest.approx(expected, abs=1e-8)


def test_root_find_rejects_root_with_residual_population(monkeypatch):
    # brentq devolviendo el extremo izquierdo del intervalo: P11 sigue lejos de 0.
    monkeypatch.setattr(ode_module, "brentq", lambda f, lo, hi, **kwargs: lo)
    cfg = SystemConfig.from_lambda_t(2.0)

    with pytest.raises(IntegrationFailure, match="exceeds"):
        passage_time_root_find(cfg)


def test_root_find_without_sign_change():
    # E = e2: Omega < 0 y fuera del regimen coherente, P11 no se anula.
    cfg = SystemConfig.from_lambda_t(8.0, tau=2.0).model_copy(update={"e_meas": 1.0})

    with pytest.raises(NoPassageRoot):
        passage_time_root_find(cfg)


def test_root_find_requires_resonance():
    cfg = SystemConfig.from_lambda_t(2.0, omega=1.5)

    with pytest.raises(DomainViolation):
        passage_time_root_find(cfg)


# --------------------------------------------------------------------------- #
# discord_brute_force
# --------------------------------------------------------------------------- #
def test_discord_bell_state():
    rho = reduced_density(InitialPair.from_b(1.0 / math.sqrt(2.0)), 1.0)

    result = discord_brute_force(rho, grid=16)

    assert isinstance(result, DiscordResult)
    assert result.mutual_information == pytest.approx(2.0, abs=1e-9)
    assert result.classical_corr == pytest.approx(1.0, abs=1e-6)
    assert result.quantum_corr == pytest.approx(1.0, abs=1e-6)


def test_discord_product_state_is_zero():
    rho = reduced_density(InitialPair.from_b(0.75), 0.0)

    classical, quantum = discord_brute_force(rho, grid=16)

    assert classical == pytest.approx(0.0, abs=1e-9)
    assert quantum == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("b, p", [(0.75, 0.5), (0.4, 0.3), (0.9, 0.8), (0.2, 0.95)])
def test_discord_matches_quantum_correlation_closed_form(b, p):
    pair = InitialPair.from_b(b)
    amp = math.sqrt(p)
    rho = reduced_density(pair, amp)

    result = discord_brute_force(rho)
    closed = quantum_correlation_closed_form(pair, amp)
    *_, mutual = entropies_and_mutual_information(rho)

    assert result.quantum_corr == pytest.approx(closed, abs=1e-3)
    assert result.classical_corr == pytest.approx(closed, abs=1e-3)
    assert mutual == pytest.approx(2.0 * closed, abs=1e-3)


def test_discord_is_stable_under_grid_refinement():
    rho = reduced_density(InitialPair.from_b(0.75), math.sqrt(0.5))

    coarse = discord_brute_force(rho, grid=64)
    fine = discord_brute_force(rho, grid=128)

    assert fine.quantum_corr == pytest.approx(coarse.quantum_corr, abs=1e-6)
    assert fine.classical_corr == pytest.approx(coarse.classical_corr, abs=1e-6)
