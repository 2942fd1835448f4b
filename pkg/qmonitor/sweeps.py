"""Parameter sweeps behind the CLI subcommands and the HTTP API.

Each builder turns a :class:`qmonitor.models.RunConfig` into a
:class:`SweepGrid`: the axes that were swept plus one row per grid point, in
nested-axis order (outer axis first). Rows are plain dicts so the same
result feeds the CSV writer and the JSON responses.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from qmonitor.correlations import InitialPair, correlations_for_cut, tripartite_amplitudes
from qmonitor.dynamics import (
    MeasurementRates,
    classify_regime,
    compute_rates,
    critical_precision,
    passage_time,
    transition_probabilities,
)
from qmonitor.exceptions import NoPassageRoot, SweepConfigError
from qmonitor.models import RunConfig, SweepAxis, SystemConfig
from qmonitor.paths import resolve_output_path

logger = logging.getLogger(__name__)

__all__ = [
    "SweepGrid",
    "PASSAGE_LT_AXIS",
    "PROBABILITY_T_AXIS",
    "PROBABILITY_LT_AXIS",
    "CORRELATION_T_AXIS",
    "CORRELATION_LT_AXIS",
    "TAU_AXIS",
    "FIG3_LAMBDA",
    "passage_time_sweep",
    "probability_sweep",
    "correlation_sweep",
    "ep_locate",
    "write_csv",
]

# Ejes por defecto (start, stop, count)
PASSAGE_LT_AXIS: Tuple[float, float, int] = (0.1, 12.0, 120)
PROBABILITY_T_AXIS: Tuple[float, float, int] = (0.0, 8.0, 81)
PROBABILITY_LT_AXIS: Tuple[float, float, int] = (0.5, 8.0, 16)
CORRELATION_T_AXIS: Tuple[float, float, int] = (0.0, 8.0, 81)
CORRELATION_LT_AXIS: Tuple[float, float, int] = (0.1, 4.0, 40)
TAU_AXIS: Tuple[float, float, int] = (1.0, 16.0, 16)

FIG3_LAMBDA = 4.0


@dataclass
class SweepGrid:
    """Swept axes plus the result table, one dict per row."""

    axes: Tuple[SweepAxis, ...]
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)

    def to_csv_text(self) -> str:
        return self.to_frame().to_csv(index=False, lineterminator="\n", na_rep="nan")

    def to_records(self) -> List[Dict[str, Any]]:
        """JSON-friendly rows (NaN becomes None)."""

        return [
            {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}
            for row in self.rows
        ]


# ============================================================================
# Ejes
# ============================================================================


def _axis(run: RunConfig, prefix: str, default: Tuple[float, float, int]) -> SweepAxis:
    try:
        axis = run.axis(prefix, default)
    except ValidationError as exc:
        raise SweepConfigError(f"invalid {prefix} axis: {exc.errors()[0]['msg']}") from exc
    if axis.start < 0:
        raise SweepConfigError(f"axis {prefix!r} must start at a non-negative value, got {axis.start!r}")
    return axis


def _b_axis(run: RunConfig) -> SweepAxis:
    try:
        axis = run.b_axis()
    except ValidationError as exc:
        raise SweepConfigError(f"invalid b axis: {exc.errors()[0]['msg']}") from exc
    if axis.start < 0 or axis.stop > 1:
        raise SweepConfigError("b axis must lie inside [0, 1]")
    return axis


def _tau_scan_requested(run: RunConfig) -> bool:
    return any(v is not None for v in (run.tau_min, run.tau_max, run.tau_steps))


def _lt_axis_requested(run: RunConfig) -> bool:
    return any(v is not None for v in (run.lt_min, run.lt_max, run.lt_steps))


def _pinned_precision(run: RunConfig) -> bool:
    return run.lambda_t is not None or run.e_r is not None


def _lambda_points(
    run: RunConfig, default: Tuple[float, float, int]
) -> Tuple[Tuple[SweepAxis, ...], List[Tuple[float, SystemConfig, MeasurementRates]]]:
    """(axes, [(lambda_t, cfg, rates)]) for the lambda_t dimension of a sweep.

    An explicit ``lambda_t`` or ``e_r`` pins the dimension to a single point;
    with ``e_r`` the reported lambda_t comes from :func:`compute_rates`.
    """

    if _pinned_precision(run):
        if _lt_axis_requested(run):
            raise SweepConfigError("--lt-min/--lt-max/--lt-steps cannot be combined with --lambda-t or --e-r")
        cfg = run.system_config()
        rates = compute_rates(cfg)
        lambda_t = run.lambda_t if run.lambda_t is not None else rates.lambda_t
        logger.info("lambda_t pinned to %.12g", lambda_t)
        return (), [(float(lambda_t), cfg, rates)]

    axis = _axis(run, "lt", default)
    points = []
    for lambda_t in axis.values():
        cfg = run.system_config(lambda_t=float(lambda_t))
        points.append((float(lambda_t), cfg, compute_rates(cfg)))
    return (axis,), points


# ============================================================================
# passage-time
# ============================================================================


def passage_time_sweep(run: RunConfig) -> SweepGrid:
    """tau_p versus lambda_t; the EP row lambda_t = 4 V0 is added when inside the range.

    With ``lambda_t`` or ``e_r`` set the table has a single row.
    """

    if _pinned_precision(run):
        axes, points = _lambda_points(run, PASSAGE_LT_AXIS)
    else:
        axis = _axis(run, "lt", PASSAGE_LT_AXIS)
        values = list(axis.values())
        ep_lambda = 4.0 * run.v0
        if axis.start <= ep_lambda <= axis.stop and not np.any(
            np.isclose(values, ep_lambda, rtol=0, atol=1e-12)
        ):
            values.append(ep_lambda)
            values.sort()
        axes = (axis,)
        points = []
        for lambda_t in values:
            cfg = run.system_config(lambda_t=float(lambda_t))
            points.append((float(lambda_t), cfg, compute_rates(cfg)))

    grid = SweepGrid(axes=axes, columns=["lambda_t", "tau_p", "regime"])
    for lambda_t, cfg, rates in points:
        try:
            tau_p = passage_time(rates, cfg.v0)
        except NoPassageRoot:
            tau_p = math.nan
        grid.rows.append(
            {
                "lambda_t": float(lambda_t),
                "tau_p": tau_p,
                "regime": classify_regime(rates, cfg.v0).value,
            }
        )
    logger.info("passage-time sweep: %d rows", len(grid.rows))
    return grid


# ============================================================================
# probabilities
# ============================================================================


def probability_sweep(run: RunConfig) -> SweepGrid:
    """P11, P10 and the detector share on the t x lambda_t grid (t outer)."""

    t_axis = _axis(run, "t", PROBABILITY_T_AXIS)
    lt_axes, points = _lambda_points(run, PROBABILITY_LT_AXIS)
    times = t_axis.values()

    per_lambda = []
    for lambda_t, cfg, rates in points:
        p11, p10 = transition_probabilities(rates, cfg.v0, times)
        per_lambda.append((lambda_t, p11, p10, classify_regime(rates, cfg.v0).value))

    grid = SweepGrid(
        axes=(t_axis, *lt_axes),
        columns=["t", "lambda_t", "p11", "p10", "p_detector", "regime"],
    )
    for i, t in enumerate(times):
        for lambda_t, p11, p10, regime in per_lambda:
            grid.rows.append(
                {
                    "t": float(t),
                    "lambda_t": lambda_t,
                    "p11": float(p11[i]),
                    "p10": float(p10[i]),
                    "p_detector": max(1.0 - float(p11[i]) - float(p10[i]), 0.0),
                    "regime": regime,
                }
            )
    logger.info("probability sweep: %d rows", len(grid.rows))
    return grid


# ============================================================================
# correlations
# ============================================================================


def _correlation_row(
    cfg: SystemConfig, rates, pair: InitialPair, t: float, cuts: Sequence[str]
) -> Dict[str, float]:
    amps = tripartite_amplitudes(rates, cfg.v0, t)
    row: Dict[str, float] = {}
    for cut in cuts:
        q, c = correlations_for_cut(pair, amps, cut)  # type: ignore[arg-type]
        row[f"Q_{cut}"] = q
        row[f"C_{cut}"] = c
    return row


def correlation_sweep(run: RunConfig) -> SweepGrid:
    """Q and concurrence per cut on the t x lambda_t grid, or b x t at lambda_t = 4 with ``fig3``."""

    t_axis = _axis(run, "t", CORRELATION_T_AXIS)
    cut_columns: List[str] = []

    if run.fig3:
        if _pinned_precision(run) and not math.isclose(
            compute_rates(run.system_config()).lambda_t, FIG3_LAMBDA, rel_tol=1e-12
        ):
            raise SweepConfigError(f"--fig3 fixes lambda_t = {FIG3_LAMBDA:g}; drop --lambda-t/--e-r")
        cuts = run.cuts if run.cut != "all" else ["d"]
        for cut in cuts:
            cut_columns += [f"Q_{cut}", f"C_{cut}"]
        b_axis = _b_axis(run)
        cfg = run.system_config(lambda_t=FIG3_LAMBDA)
        rates = compute_rates(cfg)
        grid = SweepGrid(axes=(b_axis, t_axis), columns=["t", "b", "lambda_t", *cut_columns])
        for b in b_axis.values():
            pair = InitialPair.from_b(float(b), a_phase=run.a_phase, b_phase=run.b_phase)
            for t in t_axis.values():
                row = {"t": float(t), "b": float(b), "lambda_t": FIG3_LAMBDA}
                row.update(_correlation_row(cfg, rates, pair, float(t), cuts))
                grid.rows.append(row)
        logger.info("fig3 correlation sweep: %d rows", len(grid.rows))
        return grid

    cuts = run.cuts
    for cut in cuts:
        cut_columns += [f"Q_{cut}", f"C_{cut}"]
    lt_axes, configs = _lambda_points(run, CORRELATION_LT_AXIS)
    pair = InitialPair.from_b(run.b, a_phase=run.a_phase, b_phase=run.b_phase)

    grid = SweepGrid(axes=(t_axis, *lt_axes), columns=["t", "lambda_t", "b", *cut_columns])
    for t in t_axis.values():
        for lambda_t, cfg, rates in configs:
            row = {"t": float(t), "lambda_t": lambda_t, "b": run.b}
            row.update(_correlation_row(cfg, rates, pair, float(t), cuts))
            grid.rows.append(row)
    logger.info("correlation sweep: %d rows", len(grid.rows))
    return grid


# ============================================================================
# ep-locate
# ============================================================================


def _ep_row(run: RunConfig, tau: float) -> Dict[str, Any]:
    base = SystemConfig(
        e1=run.e1,
        e2=run.e1 + run.delta_e,
        v0=run.v0,
        omega=run.omega,
        tau=tau,
        e_meas=run.e_meas,
    )
    e_c = critical_precision(base)
    rates = compute_rates(base.model_copy(update={"e_r": e_c}))
    return {
        "tau": float(tau),
        "e_c": e_c,
        "lambda_t": rates.lambda_t,
        "four_v0": 4.0 * run.v0,
        "regime": classify_regime(rates, run.v0).value,
    }


def ep_locate(run: RunConfig) -> SweepGrid:
    """Critical precision E_c for the run's tau, or a tau scan when a tau axis is given."""

    columns = ["tau", "e_c", "lambda_t", "four_v0", "regime"]
    if not _tau_scan_requested(run):
        return SweepGrid(axes=(), columns=columns, rows=[_ep_row(run, run.tau)])

    axis = _axis(run, "tau", TAU_AXIS)
    if axis.start <= 0:
        raise SweepConfigError("tau axis must be strictly positive")
    grid = SweepGrid(axes=(axis,), columns=columns)
    grid.rows.extend(_ep_row(run, float(tau)) for tau in axis.values())
    return grid


# ============================================================================
# CSV
# ============================================================================


def write_csv(grid: SweepGrid, out: Optional[str]) -> Optional[Path]:
    """Write ``grid`` as UTF-8 CSV with Unix newlines; ``None``/``-`` writes to stdout."""

    text = grid.to_csv_text()
    path = resolve_output_path(out)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    logger.info("wrote %d rows to %s", len(grid.rows), path)
    return path
