from __future__ import annotations

from pathlib import Path

import pytest

from qmonitor import config
from qmonitor.exceptions import SweepConfigError
from qmonitor.paths import get_output_dir, resolve_output_path


def test_load_config_file_normalises_keys(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# parametros de correlacion\n\nTau = 8\nlambda-t = 4   # punto excepcional\ncut=d\n",
        encoding="utf-8",
    )

    assert config.load_config_file(path) == {"tau": "8", "lambda_t": "4", "cut": "d"}


@pytest.mark.parametrize("line", ["tau 8", "= 8", "tau ="])
def test_load_config_file_rejects_malformed_lines(tmp_path, line):
    path = tmp_path / "run.conf"
    path.write_text(f"b = 0.75\n{line}\n", encoding="utf-8")

    with pytest.raises(SweepConfigError, match=":2:"):
        config.load_config_file(path)


def test_env_float_reads_overrides(monkeypatch):
    monkeypatch.setenv("QMONITOR_TEST_VALUE", "2.5")

    assert config._env_float("QMONITOR_TEST_VALUE", 1.0) == 2.5


@pytest.mark.parametrize("raw", [None, "", "   "])
def test_env_float_falls_back_to_default(monkeypatch, raw):
    if raw is None:
        monkeypatch.delenv("QMONITOR_TEST_VALUE", raising=False)
    else:
        monkeypatch.setenv("QMONITOR_TEST_VALUE", raw)

    assert config._env_float("QMONITOR_TEST_VALUE", 1.0) == 1.0


def test_env_float_rejects_garbage(monkeypatch):
    monkeypatch.setenv("QMONITOR_TEST_VALUE", "ocho")

    with pytest.raises(SweepConfigError):
        config._env_float("QMONITOR_TEST_VALUE", 1.0)


def test_output_dir_from_environment(tmp_path):
    assert get_output_dir() == tmp_path


def test_output_dir_defaults_to_cwd(monkeypatch):
    monkeypatch.delenv("QMONITOR_OUTPUT_DIR", raising=False)

    assert get_output_dir() == Path.cwd()


def test_resolve_output_path(tmp_path):
    assert resolve_output_path(None) is None
    assert resolve_output_path("-") is None
    assert resolve_output_path("fig1.csv") == tmp_path / "fig1.csv"
    assert resolve_output_path("data/fig1.csv") == Path("data/fig1.csv")
    assert resolve_output_path(str(tmp_path / "abs.csv")) == tmp_path / "abs.csv"
