"""Command-line front end: ``python -m qmonitor <command> [options]``.

Commands: passage-time, probabilities, correlations, ep-locate, verify.
CSV goes to stdout unless ``--out`` is given; logs go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from qmonitor import __version__
from qmonitor.config import CONFIG_PATH, LOG_LEVEL, load_config_file
from qmonitor.exceptions import DomainViolation, QMonitorError, SweepConfigError
from qmonitor.models import RunConfig, build_run_config
from qmonitor.paths import resolve_output_path
from qmonitor.sweeps import (
    correlation_sweep,
    ep_locate,
    passage_time_sweep,
    probability_sweep,
    write_csv,
)
from qmonitor.verifier import check_probability_rows, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3

# Opciones que controlan la ejecucion y no forman parte de RunConfig.
_RUNTIME_KEYS = ("command", "config", "log_level", "quick")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)

    physics = common.add_argument_group("system")
    physics.add_argument("--v0", type=float, help="coupling amplitude V0 (default 1)")
    physics.add_argument("--delta-e", dest="delta_e", type=float, help="level splitting E2 - E1 (default 1)")
    physics.add_argument("--e1", type=float, help="energy of level |0> (default 0)")
    physics.add_argument("--omega", type=float, help="drive frequency (default: resonant, delta-e)")
    physics.add_argument("--tau", type=float, help="measurement duration (default 8)")
    physics.add_argument("--e-meas", dest="e_meas", type=float, help="measured energy E (default e1)")
    precision = physics.add_mutually_exclusive_group()
    precision.add_argument("--e-r", dest="e_r", type=float, help="measurement precision E_r")
    precision.add_argument("--lambda-t", dest="lambda_t", type=float, help="precision parameter lambda_t")

    pair = common.add_argument_group("initial pair")
    pair.add_argument("--b", type=float, help="amplitude of |11> in a|00> + b|11> (default 0.75)")
    pair.add_argument("--a-phase", dest="a_phase", type=float, help="phase of a (radians)")
    pair.add_argument("--b-phase", dest="b_phase", type=float, help="phase of b (radians)")
    pair.add_argument("--cut", choices=["s", "r", "d", "all"], help="pairwise cut(s) to report")

    axes = common.add_argument_group("axes")
    for prefix, label in (("t", "time"), ("lt", "lambda_t"), ("b", "b"), ("tau", "tau")):
        axes.add_argument(f"--{prefix}-min", dest=f"{prefix}_min", type=float, help=f"{label} axis start")
        axes.add_argument(f"--{prefix}-max", dest=f"{prefix}_max", type=float, help=f"{label} axis stop")
        axes.add_argument(f"--{prefix}-steps", dest=f"{prefix}_steps", type=int, help=f"{label} axis points")

    run = common.add_argument_group("run")
    run.add_argument("--out", help="output path ('-' or omitted: stdout)")
    run.add_argument("--config", help="key = value config file (flags take precedence)")
    run.add_argument("--seed", type=int, help="seed for randomised verification draws")
    run.add_argument(
        "--log-level",
        dest="log_level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        type=str.upper,
        help="logging level on stderr",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmonitor", description="Continuously measured two-level system simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    common = _common_options()

    subparsers.add_parser("passage-time", parents=[common], help="passage time versus lambda_t")
    probabilities = subparsers.add_parser(
        "probabilities", parents=[common], help="P11, P10 on a t x lambda_t grid"
    )
    probabilities.add_argument(
        "--verify", action="store_true", default=argparse.SUPPRESS, help="re-check rows against the ODE oracle"
    )
    correlations = subparsers.add_parser(
        "correlations", parents=[common], help="quantum correlation and concurrence per cut"
    )
    correlations.add_argument(
        "--fig3", action="store_true", default=argparse.SUPPRESS, help="fix lambda_t = 4 and sweep b x t"
    )
    subparsers.add_parser("ep-locate", parents=[common], help="critical precision E_c (optionally over tau)")
    verify = subparsers.add_parser("verify", parents=[common], help="run every oracle comparison")
    verify.add_argument("--quick", action="store_true", default=argparse.SUPPRESS, help="reduced grids")
    return parser


def resolve_run_config(explicit: Dict[str, Any], config_path: Optional[str]) -> RunConfig:
    """Merge settings: flags > config file > environment defaults > built-ins."""

    file_values: Dict[str, Any] = {}
    if config_path:
        try:
            file_values = dict(load_config_file(config_path))
        except OSError as exc:
            raise SweepConfigError(f"cannot read config file {config_path}: {exc.strerror}") from exc

    # e_r y lambda_t son excluyentes: el flag explicito desplaza al del fichero.
    if "e_r" in explicit:
        file_values.pop("lambda_t", None)
    if "lambda_t" in explicit:
        file_values.pop("e_r", None)
    # Un eje lambda_t explicito anula la precision fijada en el fichero.
    if any(key in explicit for key in ("lt_min", "lt_max", "lt_steps")):
        file_values.pop("lambda_t", None)
        file_values.pop("e_r", None)

    return build_run_config({**file_values, **explicit})


# --------------------------------------------------------------------------- #
# Comandos
# --------------------------------------------------------------------------- #
def _cmd_passage_time(run: RunConfig, _: Dict[str, Any]) -> int:
    write_csv(passage_time_sweep(run), run.out)
    return EXIT_OK


def _cmd_probabilities(run: RunConfig, _: Dict[str, Any]) -> int:
    grid = probability_sweep(run)
    write_csv(grid, run.out)
    if not run.verify:
        return EXIT_OK

    try:
        check = check_probability_rows(run, grid.rows)
    except QMonitorError as exc:
        logger.error("ODE oracle failed: %s", exc)
        return EXIT_VERIFY
    if not check["passed"]:
        logger.error(
            "verification failed: max deviation %.3e exceeds %.1e", check["max_deviation"], check["tolerance"]
        )
        return EXIT_VERIFY
    logger.info("verification passed: max deviation %.3e", check["max_deviation"])
    return EXIT_OK


def _cmd_correlations(run: RunConfig, _: Dict[str, Any]) -> int:
    write_csv(correlation_sweep(run), run.out)
    return EXIT_OK


def _cmd_ep_locate(run: RunConfig, _: Dict[str, Any]) -> int:
    grid = ep_locate(run)
    for row in grid.rows:
        logger.info(
            "tau=%g: E_c=%.12g gives lambda_t=%.12g (4 V0 = %g)", row["tau"], row["e_c"], row["lambda_t"], row["four_v0"]
        )
    write_csv(grid, run.out)
    return EXIT_OK


def _cmd_verify(run: RunConfig, options: Dict[str, Any]) -> int:
    report = run_verification(run, quick=bool(options.get("quick", False)))
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    path = resolve_output_path(run.out)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK if report["valid"] else EXIT_VERIFY


COMMANDS: Dict[str, Callable[[RunConfig, Dict[str, Any]], int]] = {
    "passage-time": _cmd_passage_time,
    "probabilities": _cmd_probabilities,
    "correlations": _cmd_correlations,
    "ep-locate": _cmd_ep_locate,
    "verify": _cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    explicit = vars(args)
    options = {key: explicit.pop(key) for key in _RUNTIME_KEYS if key in explicit}
    logging.basicConfig(
        level=options.get("log_level", LOG_LEVEL),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        run = resolve_run_config(explicit, options.get("config", CONFIG_PATH))
        return COMMANDS[options["command"]](run, options)
    except (DomainViolation, SweepConfigError) as exc:
        print(f"qmonitor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        target = exc.filename or "output"
        print(f"qmonitor: cannot write {target}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except QMonitorError as exc:
        print(f"qmonitor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
