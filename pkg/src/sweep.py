"""
Batch evaluation of the closure criterion over a parameter grid.
Grid points are independent and run on a thread pool; rows come back in grid order
(first axis outermost) whatever the completion order. A failing point is recorded in
its row and the sweep continues.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from . import config
from .darboux3 import darboux_closure_condition
from .frenet_system import DarbouxTimelikeSystem
from .jobs import SweepAxis, build_system, with_parameters
from .peano_baker import Numerics, closure_criterion

logger = logging.getLogger(__name__)

RESULT_COLUMNS = (
    "cond_i_residual",
    "max_cond_ii",
    "det_m_omega",
    "oracle_curve_gap",
    "oracle_frame_gap",
    "converged",
    "verdict",
    "darboux_condition",
    "error",
)


def grid_points(axes: Sequence[SweepAxis]) -> List[Dict[str, float]]:
    names = [a.param for a in axes]
    return [dict(zip(names, map(float, combo))) for combo in itertools.product(*(a.values for a in axes))]


def evaluate_point(problem: dict, params: Dict[str, float], numerics: Numerics) -> dict:
    row: dict = dict(params)
    try:
        system = build_system(with_parameters(problem, params))
        report = closure_criterion(system, numerics)
        row.update(
            cond_i_residual=report.cond_i_residual,
            max_cond_ii=report.max_cond_ii,
            det_m_omega=report.det_m_omega,
            oracle_curve_gap=report.oracle_curve_gap,
            oracle_frame_gap=report.oracle_frame_gap,
            converged=report.series.converged,
            verdict=report.verdict.value,
            darboux_condition=None,
            error=None,
        )
        if isinstance(system, DarbouxTimelikeSystem):
            closed, _ = darboux_closure_condition(system.prm, numerics.tol_zero)
            row["darboux_condition"] = "Closed" if closed else "NotClosed"
    except Exception as e:
        logger.warning("Sweep point %s failed: %s", params, e)
        row.update({c: np.nan for c in RESULT_COLUMNS[:5]})
        row.update(converged=None, verdict="Error", darboux_condition=None, error=f"{type(e).__name__}: {e}")
    return row


def run_sweep(
    problem: dict,
    axes: Sequence[SweepAxis],
    numerics: Numerics,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    workers = config.SWEEP_WORKERS if workers is None else workers
    points = grid_points(axes)
    logger.info("Sweeping %d grid points over %s (%d workers)", len(points), [a.param for a in axes], workers)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda p: evaluate_point(problem, p, numerics), points))
    closed = sum(1 for r in rows if r["verdict"] == "Closed")
    logger.info("Sweep done: %d of %d points closed", closed, len(rows))
    return pd.DataFrame(rows, columns=[a.param for a in axes] + list(RESULT_COLUMNS))
