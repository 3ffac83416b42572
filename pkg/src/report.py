"""
Report and table writers: JSON closure/Darboux reports, CSV or JSON-lines traces and
sweep tables, and the plain-text summaries printed by the CLI.
Printed and CSV floats use 17 significant digits; JSON floats use the exact repr, non-finite as null.
"""
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .oracle import ClosureResiduals, CurveTrace
from .peano_baker import ClosureReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def fmt(x: Optional[float]) -> str:
    if x is None:
        return "-"
    return FLOAT_FORMAT % x


def _fmt_vec(values) -> str:
    return "(" + ", ".join(fmt(float(v)) for v in values) + ")"


def _jsonable(value):
    """Plain JSON types; NaN and inf map to null."""
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path: Path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(data), f, indent=2, allow_nan=False)
    logger.info("Wrote %s", path)
    return path


def closure_report_dict(report: ClosureReport, echo: dict) -> dict:
    series = report.series
    return {
        "verdict": report.verdict.value,
        "tol_zero": report.tol_zero,
        "criterion": {
            "cond_i_residual": report.cond_i_residual,
            "cond_ii_residuals": report.cond_ii_residuals,
            "max_cond_ii": report.max_cond_ii,
            "det_m_omega": report.det_m_omega,
            "periodic_solutions": report.periodic_solutions,
            "m_omega": series.m_omega,
        },
        "series": {
            "order_used": series.order_used,
            "tail_bound": series.tail_bound,
            "grid_points": series.grid_points,
            "sup_norm": series.sup_norm,
            "converged": series.converged,
            "warning": series.warning,
        },
        "oracle": {
            "curve_gap": report.oracle_curve_gap,
            "frame_gap": report.oracle_frame_gap,
            "tangent_integral": report.oracle_tangent_integral,
            "frame_drift": report.oracle_frame_drift,
            "determinant_drift": report.oracle_determinant_drift,
        },
        "tangent_character": report.tangent_character.value,
        "generated_utc": datetime.now(timezone.utc).isoformat(),
        "config": echo,
    }


def print_closure(report: ClosureReport) -> None:
    series = report.series
    unconverged = "" if series.converged else " [series not converged, verdict unreliable]"
    print(f"verdict: {report.verdict.value} (tol_zero {fmt(report.tol_zero)}){unconverged}")
    print(f"condition (i)  max|M(omega)|: {fmt(report.cond_i_residual)}")
    print(f"condition (ii) residuals: {_fmt_vec(report.cond_ii_residuals)}")
    print(f"det M(omega): {fmt(report.det_m_omega)}  periodic solutions: {report.periodic_solutions}")
    print(f"series: order {series.order_used}, tail bound {fmt(series.tail_bound)}, grid {series.grid_points}")
    if series.warning:
        print(f"warning: {series.warning}")
    print(
        f"oracle: curve gap {fmt(report.oracle_curve_gap)}, frame gap {fmt(report.oracle_frame_gap)}, "
        f"drift {fmt(report.oracle_frame_drift)}"
    )


def trace_table(trace: CurveTrace, include_frames: bool = False) -> pd.DataFrame:
    """Columns s, x1..xn and, optionally, f11..fnn (row-major frame entries)."""
    n = trace.n
    columns = {"s": trace.s_grid}
    for j in range(n):
        columns[f"x{j + 1}"] = trace.positions[:, j]
    if include_frames:
        for i in range(n):
            for j in range(n):
                columns[f"f{i + 1}{j + 1}"] = trace.frames[:, i, j]
    return pd.DataFrame(columns)


def write_table(df: pd.DataFrame, path: Path, fmt_name: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt_name == "jsonl":
        with open(path, "w", encoding="utf-8") as f:
            for record in df.to_dict(orient="records"):
                f.write(json.dumps(_jsonable(record), allow_nan=False) + "\n")
    else:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote %d rows to %s", len(df), path)
    return path


def print_residuals(residuals: ClosureResiduals, omega: float) -> None:
    print(f"closure gap |x(omega) - x(0)|: {fmt(residuals.gap)}  (omega {fmt(omega)})")
    print(f"frame gap max|Phi(omega) - I|: {fmt(residuals.frame_gap)}")
    print(f"int V1 ds: {_fmt_vec(residuals.tangent_integral)}")


def darboux_report_dict(
    row1: tuple,
    integrals: tuple,
    closed: bool,
    k: Optional[int],
    discriminant: float,
    engine_row1: Optional[List[float]],
    engine_integrals: Optional[List[float]],
    echo: dict,
) -> dict:
    return {
        "closed": closed,
        "k": k,
        "discriminant": discriminant,
        "closed_form": {"m11": row1[0], "m12": row1[1], "m13": row1[2]},
        "closed_form_integrals": {"I11": integrals[0], "I12": integrals[1], "I13": integrals[2]},
        "series_engine": {"row1": engine_row1, "cond_ii_residuals": engine_integrals},
        "generated_utc": datetime.now(timezone.utc).isoformat(),
        "config": echo,
    }


def print_darboux(report: dict) -> None:
    cf = report["closed_form"]
    ci = report["closed_form_integrals"]
    print(f"D = kg^2 - eps kn^2 + eps tg^2: {fmt(report['discriminant'])}")
    print(f"m11, m12, m13 (omega): {_fmt_vec([cf['m11'], cf['m12'], cf['m13']])}")
    print(f"omega + int m11, int m12, int m13: {_fmt_vec([ci['I11'], ci['I12'], ci['I13']])}")
    engine = report["series_engine"]
    if engine["row1"] is not None:
        print(f"series engine row 1: {_fmt_vec(engine['row1'])}")
        print(f"series engine integrals: {_fmt_vec(engine['cond_ii_residuals'])}")
    if report["closed"]:
        print(f"closed: yes, k = {report['k']}")
    else:
        print("closed: no")
