from __future__ import annotations

from pathlib import Path
import sys

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import numpy as np
import pytest

from qmonitor.correlations import InitialPair
from qmonitor.dynamics import MeasurementRates, compute_rates
from qmonitor.models import SystemConfig


@pytest.fixture
def rates_for():
    """Factory: resonant MeasurementRates for a given lambda_t (V0 = dE = 1 by default)."""

    def _build(lambda_t: float, **kwargs) -> MeasurementRates:
        return compute_rates(SystemConfig.from_lambda_t(lambda_t, **kwargs))

    return _build


@pytest.fixture
def ep_rates(rates_for) -> MeasurementRates:
    return rates_for(4.0)


@pytest.fixture
def default_pair() -> InitialPair:
    return InitialPair.from_b(0.75)


@pytest.fixture
def bell_pair() -> InitialPair:
    return InitialPair.from_b(1.0 / np.sqrt(2.0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Keep user-level QMONITOR_* settings out of the tests."""

    monkeypatch.delenv("QMONITOR_CONFIG", raising=False)
    monkeypatch.setattr("qmonitor.config.CONFIG_PATH", None)
    monkeypatch.setattr("qmonitor.cli.CONFIG_PATH", None)
    monkeypatch.setenv("QMONITOR_OUTPUT_DIR", str(tmp_path))
    yield
