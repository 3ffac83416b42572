"""
Command-line front end for the closed-curve criterion.

Subcommands: classify, closure, reconstruct, darboux, sweep.
Exit codes: closure and darboux return 0 when the curve closes and 1 when it does not;
every other successful command returns 0; any error returns 2.
"""
import argparse
import logging
import logging.handlers
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

# Run from project root (parent of src)
PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src import config
from src.darboux3 import DarbouxParams, closed_form_row1, closed_form_row1_integrals, darboux_closure_condition
from src.errors import ClosureError, ValidationError
from src.frenet_system import DarbouxTimelikeSystem
from src.jobs import JobConfig, build_job, default_output, load_config_file, parse_int, parse_number
from src.minkowski_core import MetricSignature, causal_character, pseudo_norm
from src.oracle import closure_residuals, reconstruct_curve
from src.peano_baker import closure_criterion, cond_ii_residuals, m_series
from src.report import (
    closure_report_dict,
    darboux_report_dict,
    fmt,
    print_closure,
    print_darboux,
    print_residuals,
    trace_table,
    write_json,
    write_table,
)
from src.sweep import run_sweep

EXIT_CLOSED = 0
EXIT_NOT_CLOSED = 1
EXIT_ERROR = 2

_logging_ready = False


def _setup_logging() -> None:
    global _logging_ready
    if _logging_ready:
        return
    config.LOGS_DIR.mkdir(parents=True, exist_ok=True)
    log_file = config.LOGS_DIR / "closure.log"
    handler = logging.handlers.RotatingFileHandler(
        log_file, maxBytes=2 * 1024 * 1024, backupCount=3, encoding="utf-8"
    )
    handler.setFormatter(
        logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s")
    )
    logging.root.addHandler(handler)
    logging.root.setLevel(getattr(logging, config.LOG_LEVEL, logging.INFO))
    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logging.root.addHandler(console)
    _logging_ready = True


def _add_job_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Flags shared by every job; on subparsers they only override when given."""
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=default, help="JSON job configuration")
    parser.add_argument("--format", choices=("csv", "jsonl"), default=default, help="table output format")
    parser.add_argument("--tol-zero", type=float, default=default, help="verdict tolerance (default 1e-8)")
    parser.add_argument("--grid-points", type=int, default=default, help="Simpson grid intervals, even (default 2048)")
    parser.add_argument("--steps", type=int, default=default, help="RK4 steps per period (default 4096)")
    parser.add_argument("--max-order", type=int, default=default, help="series truncation order (default 64)")
    parser.add_argument("--tol-series", type=float, default=default, help="series early-stop tolerance")
    parser.add_argument(
        "--reorthonormalize", action="store_const", const=True, default=default,
        help="re-orthonormalize the frame after every RK4 step",
    )
    parser.add_argument("--report", type=Path, default=default, help="report / table output path")
    parser.add_argument("--trace", type=Path, default=default, help="trace output path (reconstruct)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Closed-curve criterion for curves in Minkowski space-time E_v^n"
    )
    _add_job_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="causal character and pseudo-norm of a vector")
    p.add_argument("--sig", required=True, help="n,v (dimension, index)")
    p.add_argument("--vec", required=True, help="comma-separated coordinates; a leading minus sign is fine (-1,0,0)")

    p = sub.add_parser("closure", help="evaluate the closure criterion for a job config")
    _add_job_flags(p, suppress=True)

    p = sub.add_parser("reconstruct", help="integrate the curve and write its trace")
    _add_job_flags(p, suppress=True)
    p.add_argument("--frames", action="store_true", help="include the flattened frame f11..fnn")

    p = sub.add_parser("darboux", help="closed forms for constant Darboux curvatures on a timelike surface")
    _add_job_flags(p, suppress=True)
    p.add_argument("--kg", help="geodesic curvature (number or multiple of pi)")
    p.add_argument("--kn", help="normal curvature")
    p.add_argument("--tg", help="geodesic torsion")
    p.add_argument("--eps", help="<T,T> = +1 or -1")
    p.add_argument("--omega", help="period")
    p.add_argument("--no-engine", action="store_true", help="skip the series-engine cross-check")

    p = sub.add_parser("sweep", help="closure criterion over a parameter grid")
    _add_job_flags(p, suppress=True)
    p.add_argument("--workers", type=int, default=None, help="thread pool size")
    return parser


VALUE_FLAGS = ("--vec", "--sig")


def _attach_values(argv: List[str]) -> List[str]:
    """Rewrite `--vec -1,0,0` as `--vec=-1,0,0` so argparse does not read the value as a flag."""
    out: List[str] = []
    for token in argv:
        if out and out[-1] in VALUE_FLAGS and token.startswith("-") and not token.startswith("--"):
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def _split_csv(text: str, field: str) -> List[str]:
    parts = [t.strip() for t in text.split(",")]
    if not parts or any(not t for t in parts):
        raise ValidationError(f"{field}: expected comma-separated values, got {text!r}")
    return parts


def _overrides(args: argparse.Namespace):
    numeric = {
        "grid_points": getattr(args, "grid_points", None),
        "steps": getattr(args, "steps", None),
        "max_order": getattr(args, "max_order", None),
        "tol_series": getattr(args, "tol_series", None),
        "tol_zero": getattr(args, "tol_zero", None),
        "reorthonormalize": getattr(args, "reorthonormalize", None),
    }
    outputs = {
        "report_path": getattr(args, "report", None),
        "trace_path": getattr(args, "trace", None),
        "format": getattr(args, "format", None),
    }
    return numeric, outputs


def _load_job(args: argparse.Namespace) -> JobConfig:
    if getattr(args, "config", None) is None:
        raise ValidationError("config: --config <path> is required for this command")
    numeric, outputs = _overrides(args)
    return build_job(load_config_file(args.config), numeric, outputs)


def cmd_classify(args: argparse.Namespace) -> int:
    sig_parts = _split_csv(args.sig, "--sig")
    if len(sig_parts) != 2:
        raise ValidationError(f"--sig: expected n,v, got {args.sig!r}")
    sig = MetricSignature(parse_int(sig_parts[0], "--sig n"), parse_int(sig_parts[1], "--sig v"))
    vec = np.array([parse_number(x, f"--vec[{i}]") for i, x in enumerate(_split_csv(args.vec, "--vec"))])
    character = causal_character(vec, sig)
    print(f"{character.value}, pseudo-norm {fmt(pseudo_norm(vec, sig))}")
    return 0


def cmd_closure(args: argparse.Namespace) -> int:
    job = _load_job(args)
    report = closure_criterion(job.system, job.numerics)
    path = job.outputs.report_path or default_output("closure_report.json")
    write_json(path, closure_report_dict(report, job.echo()))
    print_closure(report)
    return EXIT_CLOSED if report.closed else EXIT_NOT_CLOSED


def cmd_reconstruct(args: argparse.Namespace) -> int:
    job = _load_job(args)
    trace = reconstruct_curve(job.system, job.numerics.steps, reorthonormalize=job.numerics.reorthonormalize)
    include_frames = job.outputs.include_frames or args.frames
    path = job.outputs.trace_path or default_output(f"trace.{job.outputs.format}")
    write_table(trace_table(trace, include_frames), path, job.outputs.format)
    print_residuals(closure_residuals(trace), trace.omega)
    return 0


def _darboux_job(args: argparse.Namespace) -> JobConfig:
    numeric, outputs = _overrides(args)
    data = load_config_file(args.config) if getattr(args, "config", None) is not None else {}
    problem = dict(data.get("problem", {"kind": "darboux_timelike"}))
    for key in ("kg", "kn", "tg", "eps", "omega"):
        value = getattr(args, key)
        if value is not None:
            problem[key] = value
    problem.setdefault("kind", "darboux_timelike")
    problem.setdefault("omega", 1.0)
    if problem["kind"] != "darboux_timelike":
        raise ValidationError("problem.kind: the darboux command needs a darboux_timelike problem")
    data["problem"] = problem
    return build_job(data, numeric, outputs)


def cmd_darboux(args: argparse.Namespace) -> int:
    job = _darboux_job(args)
    prm: DarbouxParams = job.system.prm
    row1 = closed_form_row1(prm)
    integrals = closed_form_row1_integrals(prm)
    closed, k = darboux_closure_condition(prm, job.numerics.tol_zero)
    engine_row1 = engine_integrals = None
    if not args.no_engine:
        series = m_series(DarbouxTimelikeSystem(prm), job.numerics.grid_points, job.numerics.max_order, job.numerics.tol_series)
        engine_row1 = series.m_omega[0].tolist()
        engine_integrals = cond_ii_residuals(series).tolist()
    data = darboux_report_dict(row1, integrals, closed, k, prm.discriminant, engine_row1, engine_integrals, job.echo())
    path = job.outputs.report_path or default_output("darboux_report.json")
    write_json(path, data)
    print_darboux(data)
    return EXIT_CLOSED if closed else EXIT_NOT_CLOSED


def cmd_sweep(args: argparse.Namespace) -> int:
    job = _load_job(args)
    if not job.sweep:
        raise ValidationError("sweep: the config needs a sweep block with axes")
    table = run_sweep(job.problem, job.sweep, job.numerics, args.workers)
    path = job.outputs.report_path or default_output(f"sweep.{job.outputs.format}")
    write_table(table, path, job.outputs.format)
    closed = table[table["verdict"] == "Closed"]
    print(f"{len(table)} grid points, {len(closed)} closed, {int((table['verdict'] == 'Error').sum())} failed")
    unconverged = int(table["converged"].eq(False).sum())
    if unconverged:
        print(f"warning: series not converged at {unconverged} point(s); see the converged column")
    for _, row in closed.iterrows():
        print("closed at " + ", ".join(f"{a.param}={fmt(row[a.param])}" for a in job.sweep))
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "closure": cmd_closure,
    "reconstruct": cmd_reconstruct,
    "darboux": cmd_darboux,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(_attach_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0

    try:
        config.validate_config()
    except ValueError as e:
        print("Config error:", e, file=sys.stderr)
        return EXIT_ERROR

    _setup_logging()
    logger = logging.getLogger(__name__)
    try:
        return COMMANDS[args.command](args)
    except (ClosureError, ValueError, ArithmeticError, OSError) as e:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception("Unexpected failure in %s", args.command)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
