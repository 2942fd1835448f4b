from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from qmonitor import verifier


@pytest.fixture()
def client() -> TestClient:
    from api.main import app

    return TestClient(app)


def test_health_endpoint(client):
    resp = client.get("/health")

    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_api_index_lists_endpoints(client):
    data = client.get("/api").json()

    assert data["name"] == "qmonitor API"
    assert data["endpoints"]["passage_time"] == "/api/passage-time"
    assert set(data["endpoints"]) >= {"probabilities", "correlations", "ep_locate", "verify"}


def test_passage_time_endpoint(client):
    resp = client.post("/api/passage-time", json={"lt_min": 2.0, "lt_max": 6.0, "lt_steps": 3})

    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] is True
    assert body["status"] == "OK"
    assert body["data"]["columns"] == ["lambda_t", "tau_p", "regime"]
    rows = body["data"]["rows"]
    assert [row["lambda_t"] for row in rows] == [2.0, 4.0, 6.0]
    assert rows[1]["tau_p"] == pytest.approx(1.0, abs=1e-12)


def test_missing_root_is_null_in_json(client):
    resp = client.post("/api/passage-time", json={"e_meas": 1.0, "lt_min": 6.0, "lt_max": 8.0, "lt_steps": 2})

    assert resp.status_code == 200
    assert all(row["tau_p"] is None for row in resp.json()["data"]["rows"])


def test_lambda_t_in_body_pins_correlation_rows(client):
    resp = client.post("/api/correlations", json={"lambda_t": 4.0, "cut": "d", "t_steps": 5})

    rows = resp.json()["data"]["rows"]
    assert len(rows) == 5
    assert {row["lambda_t"] for row in rows} == {4.0}


def test_empty_body_uses_defaults(client):
    resp = client.post("/api/ep-locate")

    assert resp.status_code == 200
    row = resp.json()["data"]["rows"][0]
    assert row["tau"] == 8.0
    assert row["e_c"] == pytest.approx(0.125, abs=1e-12)


def test_probabilities_with_verification(client):
    resp = client.post(
        "/api/probabilities",
        json={"t_max": 2.0, "t_steps": 5, "lt_min": 1.0, "lt_max": 4.0, "lt_steps": 2, "verify": True},
    )

    body = resp.json()
    assert resp.status_code == 200
    assert body["status"] == "VERIFIED"
    assert body["data"]["verification"]["passed"] is True
    assert len(body["data"]["rows"]) == 10


def test_correlations_endpoint_ignores_out(client, tmp_path):
    resp = client.post(
        "/api/correlations",
        json={"cut": "d", "t_max": 1.0, "t_steps": 3, "lt_steps": 2, "out": "should-not-exist.csv"},
    )

    body = resp.json()
    assert resp.status_code == 200
    assert body["data"]["columns"] == ["t", "lambda_t", "b", "Q_d", "C_d"]
    assert "out" not in body["data"]["config"]
    assert not (tmp_path / "should-not-exist.csv").exists()


@pytest.mark.parametrize(
    "payload, code",
    [
        ({"tau": -1.0}, "DOMAIN_VIOLATION"),
        ({"b": 2.0}, "DOMAIN_VIOLATION"),
        ({"lt_steps": 1}, "INVALID_CONFIG"),
        ({"colour": "blue"}, "INVALID_CONFIG"),
        ({"e_r": 0.25, "lambda_t": 4.0}, "INVALID_CONFIG"),
    ],
)
def test_invalid_payloads_use_error_envelope(client, payload, code):
    resp = client.post("/api/passage-time", json=payload)

    assert resp.status_code == 400
    body = resp.json()
    assert body["ok"] is False
    assert body["status"] == "ERROR"
    assert body["error_code"] == code
    assert body["data"] is None


def test_verify_endpoint_reports_status(client, monkeypatch):
    monkeypatch.setattr(verifier, "_concurrence_deviation", lambda rng, count: 1.0)

    body = client.post("/api/verify").json()

    assert body["ok"] is True
    assert body["status"] == "TOLERANCE_EXCEEDED"
    assert body["data"]["valid"] is False
