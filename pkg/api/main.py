from __future__ import annotations

import logging
from typing import Any, Callable, Dict, Optional

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from qmonitor import __version__
from qmonitor.exceptions import DomainViolation, QMonitorError, SweepConfigError
from qmonitor.models import RunConfig, build_run_config
from qmonitor.sweeps import (
    SweepGrid,
    correlation_sweep,
    ep_locate,
    passage_time_sweep,
    probability_sweep,
)
from qmonitor.verifier import VerificationStatus, check_probability_rows, run_verification

APP_NAME = "qmonitor API"
API_VERSION = __version__
API_DESCRIPTION = "Continuously measured two-level system: sweeps, correlations and oracle checks"

logger = logging.getLogger(__name__)


def _error_response(code: str, message: str, *, status_code: int = 400) -> JSONResponse:
    return JSONResponse(
        status_code=status_code,
        content={
            "ok": False,
            "success": False,
            "status": "ERROR",
            "error_code": code,
            "error_message": message,
            "error": {"code": code, "message": message},
            "data": None,
            "detail": message,
        },
    )


def _ok_response(data: Dict[str, Any], *, status: str = "OK") -> Dict[str, Any]:
    return {
        "ok": True,
        "success": True,
        "status": status,
        "error_code": None,
        "error_message": None,
        "error": None,
        "data": data,
    }


def _grid_payload(command: str, run: RunConfig, grid: SweepGrid) -> Dict[str, Any]:
    return {
        "command": command,
        "config": run.model_dump(exclude_none=True, exclude={"out"}),
        "columns": grid.columns,
        "rows": grid.to_records(),
    }


def _run_config(payload: Optional[Dict[str, Any]]) -> RunConfig:
    # La API nunca escribe ficheros.
    values = {k: v for k, v in (payload or {}).items() if k != "out"}
    return build_run_config(values)


def _guarded(command: str, handler: Callable[[RunConfig], Dict[str, Any]], payload: Optional[Dict[str, Any]]):
    try:
        run = _run_config(payload)
        return handler(run)
    except DomainViolation as exc:
        return _error_response("DOMAIN_VIOLATION", str(exc))
    except SweepConfigError as exc:
        return _error_response("INVALID_CONFIG", str(exc))
    except QMonitorError as exc:
        return _error_response("QMONITOR_ERROR", str(exc))
    except Exception:  # pragma: no cover - fallback para errores raros
        logger.exception("Unexpected error in %s", command)
        return _error_response("INTERNAL_ERROR", f"Unexpected error in {command}", status_code=500)


app = FastAPI(title=APP_NAME, version=API_VERSION, description=API_DESCRIPTION)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.get("/api")
def api_info() -> Dict[str, Any]:
    return {
        "name": APP_NAME,
        "version": API_VERSION,
        "description": API_DESCRIPTION,
        "endpoints": {
            "passage_time": "/api/passage-time",
            "probabilities": "/api/probabilities",
            "correlations": "/api/correlations",
            "ep_locate": "/api/ep-locate",
            "verify": "/api/verify",
            "health": "/health",
        },
    }


@app.get("/health")
def health() -> Dict[str, str]:
    return {"status": "ok"}


@app.post("/api/passage-time")
def api_passage_time(payload: Optional[Dict[str, Any]] = Body(default=None)):
    return _guarded(
        "passage-time",
        lambda run: _ok_response(_grid_payload("passage-time", run, passage_time_sweep(run))),
        payload,
    )


@app.post("/api/probabilities")
def api_probabilities(payload: Optional[Dict[str, Any]] = Body(default=None)):
    def handler(run: RunConfig) -> Dict[str, Any]:
        grid = probability_sweep(run)
        data = _grid_payload("probabilities", run, grid)
        if not run.verify:
            return _ok_response(data)
        check = check_probability_rows(run, grid.rows)
        data["verification"] = check
        status = VerificationStatus.VERIFIED if check["passed"] else VerificationStatus.TOLERANCE_EXCEEDED
        return _ok_response(data, status=status.value)

    return _guarded("probabilities", handler, payload)


@app.post("/api/correlations")
def api_correlations(payload: Optional[Dict[str, Any]] = Body(default=None)):
    return _guarded(
        "correlations",
        lambda run: _ok_response(_grid_payload("correlations", run, correlation_sweep(run))),
        payload,
    )


@app.post("/api/ep-locate")
def api_ep_locate(payload: Optional[Dict[str, Any]] = Body(default=None)):
    return _guarded(
        "ep-locate",
        lambda run: _ok_response(_grid_payload("ep-locate", run, ep_locate(run))),
        payload,
    )


@app.post("/api/verify")
def api_verify(payload: Optional[Dict[str, Any]] = Body(default=None), quick: bool = True):
    def handler(run: RunConfig) -> Dict[str, Any]:
        report = run_verification(run, quick=quick)
        return _ok_response(report, status=report["status"])

    return _guarded("verify", handler, payload)
