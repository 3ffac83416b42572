"""
Closure criterion by successive approximation.

The iterated integrals
    xi^(1)A(s) = int_0^s A,   xi^(k)A(s) = int_0^s A(t) xi^(k-1)A(t) dt
are tabulated on one shared uniform grid with cumulative composite Simpson, and
M(s) = sum_k xi^(k)A(s) is the Peano-Baker series of the fundamental matrix minus I.
The curve closes with period omega iff M(omega) = 0 and the first row of int_0^omega (I + M)
vanishes, i.e. (omega + int m11, int m12, ..., int m1n) = 0.
"""
import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.special import gammainc

from . import config
from .errors import InputError, NumericError, ValidationError
from .frenet_system import SystemLike, as_system
from .minkowski_core import CausalCharacter
from .oracle import closure_residuals, determinant_drift, frame_drift, reconstruct_curve
from .quadrature import cumulative_simpson, simpson, uniform_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Numerics:
    """Grid, step, order and tolerance settings of one criterion run."""
    grid_points: int = field(default_factory=lambda: config.GRID_POINTS)
    steps: int = field(default_factory=lambda: config.STEPS)
    max_order: int = field(default_factory=lambda: config.MAX_ORDER)
    tol_series: float = field(default_factory=lambda: config.TOL_SERIES)
    tol_zero: float = field(default_factory=lambda: config.TOL_ZERO)
    reorthonormalize: bool = field(default_factory=lambda: config.REORTHONORMALIZE)

    def __post_init__(self):
        if int(self.grid_points) != self.grid_points or self.grid_points < 2 or int(self.grid_points) % 2:
            raise ValidationError(f"numerics.grid_points: expected an even integer >= 2, got {self.grid_points!r}")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValidationError(f"numerics.steps: expected an integer >= 2, got {self.steps!r}")
        if int(self.max_order) != self.max_order or self.max_order < 1:
            raise ValidationError(f"numerics.max_order: expected an integer >= 1, got {self.max_order!r}")
        for name in ("tol_series", "tol_zero"):
            if not float(getattr(self, name)) > 0:
                raise ValidationError(f"numerics.{name}: expected a value > 0, got {getattr(self, name)!r}")
        if not isinstance(self.reorthonormalize, bool):
            raise ValidationError(f"numerics.reorthonormalize: expected true or false, got {self.reorthonormalize!r}")
        object.__setattr__(self, "grid_points", int(self.grid_points))
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "max_order", int(self.max_order))
        object.__setattr__(self, "tol_series", float(self.tol_series))
        object.__setattr__(self, "tol_zero", float(self.tol_zero))

    def as_dict(self) -> dict:
        return {
            "grid_points": self.grid_points,
            "steps": self.steps,
            "max_order": self.max_order,
            "tol_series": self.tol_series,
            "tol_zero": self.tol_zero,
            "reorthonormalize": self.reorthonormalize,
        }


@dataclass(frozen=True, eq=False)
class SeriesResult:
    """Truncated M(omega) = xi^(1)A(omega) + ... + xi^(N)A(omega) and its tabulation over the grid."""
    m_omega: np.ndarray
    order_used: int
    tail_bound: float
    grid_points: int
    s_grid: np.ndarray
    m_grid: np.ndarray
    sup_norm: float
    converged: bool
    warning: Optional[str] = None


class Verdict(str, Enum):
    CLOSED = "Closed"
    NOT_CLOSED = "NotClosed"


@dataclass(frozen=True, eq=False)
class ClosureReport:
    cond_i_residual: float
    cond_ii_residuals: np.ndarray
    det_m_omega: float
    oracle_frame_gap: float
    oracle_curve_gap: float
    verdict: Verdict
    tol_zero: float
    series: SeriesResult
    oracle_tangent_integral: np.ndarray
    oracle_frame_drift: float
    oracle_determinant_drift: float
    periodic_solutions: int
    tangent_character: CausalCharacter

    @property
    def closed(self) -> bool:
        return self.verdict is Verdict.CLOSED

    @property
    def max_cond_ii(self) -> float:
        return float(np.max(np.abs(self.cond_ii_residuals)))


def _coefficient_grid(system, grid_points: int) -> Tuple[np.ndarray, np.ndarray]:
    if int(grid_points) != grid_points or grid_points < 2 or int(grid_points) % 2:
        raise InputError(f"grid_points: expected an even integer >= 2, got {grid_points!r}")
    s = uniform_grid(system.omega, int(grid_points))
    A = system.coefficient(s)
    if not np.all(np.isfinite(A)):
        bad = int(np.argwhere(~np.isfinite(A))[0][0])
        raise NumericError("coefficient matrix is not finite", s=float(s[bad]))
    return s, A


def _iter_xi(A: np.ndarray, h: float, max_order: int, tol_series: float) -> Iterator[np.ndarray]:
    """Yields xi^(1)A, xi^(2)A, ... on the grid; stops after the first term below tol_series."""
    xi = cumulative_simpson(A, h)
    for k in range(1, max_order + 1):
        if k > 1:
            xi = cumulative_simpson(A @ xi, h)
            if not np.all(np.isfinite(xi)):
                raise NumericError(f"xi^({k})A is not finite")
        yield xi
        # sup over the grid, not only at omega: a term may vanish at omega alone
        if float(np.max(np.abs(xi))) < tol_series:
            return


def xi_chain(
    system: SystemLike,
    grid_points: Optional[int] = None,
    max_order: Optional[int] = None,
    tol_series: Optional[float] = None,
) -> List[np.ndarray]:
    """[xi^(1)A, ..., xi^(N)A], each of shape (grid_points + 1, n, n)."""
    system = as_system(system)
    grid_points = config.GRID_POINTS if grid_points is None else grid_points
    max_order = config.MAX_ORDER if max_order is None else max_order
    tol_series = config.TOL_SERIES if tol_series is None else tol_series
    if max_order < 1:
        raise InputError(f"max_order: expected >= 1, got {max_order!r}")
    _, A = _coefficient_grid(system, grid_points)
    return list(_iter_xi(A, system.omega / grid_points, max_order, tol_series))


def tail_bound(sup_norm: float, omega: float, order: int) -> float:
    """sum_{j > order} (a omega)^j / j! = e^(a omega) P(order + 1, a omega)."""
    x = sup_norm * omega
    if x <= 0:
        return 0.0
    return float(np.exp(x) * gammainc(order + 1, x))


def m_series(
    system: SystemLike,
    grid_points: Optional[int] = None,
    max_order: Optional[int] = None,
    tol_series: Optional[float] = None,
) -> SeriesResult:
    system = as_system(system)
    grid_points = config.GRID_POINTS if grid_points is None else grid_points
    max_order = config.MAX_ORDER if max_order is None else max_order
    tol_series = config.TOL_SERIES if tol_series is None else tol_series
    if max_order < 1:
        raise InputError(f"max_order: expected >= 1, got {max_order!r}")
    s, A = _coefficient_grid(system, grid_points)
    h = system.omega / grid_points

    m_grid = np.zeros_like(A)
    order = 0
    last_sup = np.inf
    for xi in _iter_xi(A, h, max_order, tol_series):
        m_grid += xi
        order += 1
        last_sup = float(np.max(np.abs(xi)))

    sup_norm = float(np.max(np.sum(np.abs(A), axis=-1)))
    tail = tail_bound(sup_norm, system.omega, order)
    stopped_early = last_sup < tol_series
    converged = stopped_early or tail <= tol_series
    warning = None
    if not converged:
        warning = (
            f"series not converged: tail bound {tail:.3g} > tol_series {tol_series:.3g} "
            f"at max_order {max_order}"
        )
        logger.warning(warning)
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    logger.debug("Peano-Baker series: order %d, tail bound %.3g, sup|A| %.3g", order, tail, sup_norm)
    return SeriesResult(
        m_omega=m_grid[-1].copy(),
        order_used=order,
        tail_bound=tail,
        grid_points=int(grid_points),
        s_grid=s,
        m_grid=m_grid,
        sup_norm=sup_norm,
        converged=converged,
        warning=warning,
    )


def m_at(series: SeriesResult, s: float) -> np.ndarray:
    """M(s) at a grid node."""
    h = series.s_grid[-1] / series.grid_points
    k = int(round(s / h))
    if not 0 <= k <= series.grid_points or abs(k * h - s) > 1e-9 * max(h, abs(s)):
        raise InputError(f"s={s!r} is not a node of the {series.grid_points}-interval grid")
    return series.m_grid[k]


def cond_ii_residuals(series: SeriesResult) -> np.ndarray:
    """(omega + int m11, int m12, ..., int m1n) from the tabulated first row of M(s)."""
    omega = float(series.s_grid[-1])
    out = simpson(series.m_grid[:, 0, :], omega / series.grid_points)
    out[0] += omega
    return out


def periodic_initial_vectors(m_omega: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis (columns) of ker M(omega): initial values of the omega-periodic solutions."""
    tol = config.TOL_ZERO if tol is None else tol
    m_omega = np.asarray(m_omega, dtype=float)
    largest = float(linalg.svdvals(m_omega).max()) if m_omega.size else 0.0
    if largest <= tol:
        return np.eye(m_omega.shape[0])
    return linalg.null_space(m_omega, rcond=tol / largest)


def periodic_solution_test(system: SystemLike, numerics: Optional[Numerics] = None) -> Tuple[float, bool]:
    """(det M(omega), |det M(omega)| < tol_zero): a non-vanishing periodic solution exists iff det = 0."""
    numerics = numerics or Numerics()
    series = m_series(system, numerics.grid_points, numerics.max_order, numerics.tol_series)
    det = float(linalg.det(series.m_omega))
    return det, abs(det) < numerics.tol_zero


def closure_criterion(system: SystemLike, numerics: Optional[Numerics] = None) -> ClosureReport:
    """Evaluate both closing conditions from the series and attach the RK4 oracle's residuals."""
    system = as_system(system)
    numerics = numerics or Numerics()
    series = m_series(system, numerics.grid_points, numerics.max_order, numerics.tol_series)
    cond_i = float(np.max(np.abs(series.m_omega)))
    cond_ii = cond_ii_residuals(series)
    det = float(linalg.det(series.m_omega))

    trace = reconstruct_curve(system, numerics.steps, reorthonormalize=numerics.reorthonormalize)
    residuals = closure_residuals(trace)

    closed = cond_i < numerics.tol_zero and float(np.max(np.abs(cond_ii))) < numerics.tol_zero
    verdict = Verdict.CLOSED if closed else Verdict.NOT_CLOSED
    tangent = CausalCharacter.SPACELIKE if system.signs()[0] > 0 else CausalCharacter.TIMELIKE
    report = ClosureReport(
        cond_i_residual=cond_i,
        cond_ii_residuals=cond_ii,
        det_m_omega=det,
        oracle_frame_gap=residuals.frame_gap,
        oracle_curve_gap=residuals.gap,
        verdict=verdict,
        tol_zero=numerics.tol_zero,
        series=series,
        oracle_tangent_integral=residuals.tangent_integral,
        oracle_frame_drift=frame_drift(trace),
        oracle_determinant_drift=determinant_drift(trace),
        periodic_solutions=int(periodic_initial_vectors(series.m_omega, numerics.tol_zero).shape[1]),
        tangent_character=tangent,
    )
    logger.info(
        "Criterion %s: cond_i=%.3g max cond_ii=%.3g oracle gap=%.3g",
        verdict.value, cond_i, report.max_cond_ii, residuals.gap,
    )
    return report
