"""
Composite Simpson quadrature on uniform grids.

Samples are stacked along axis 0, so matrix-valued integrands (shape (K+1, n, n))
integrate entrywise in one call.
"""
import numpy as np
from scipy.integrate import simpson as _scipy_simpson

from .errors import InputError


def uniform_grid(omega: float, intervals: int) -> np.ndarray:
    return np.linspace(0.0, omega, intervals + 1)


def cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """
    Running integral Y[k] = int_0^{s_k} y ds on a uniform grid with an even number of intervals.

    Even nodes carry the composite Simpson sum; each odd node adds the half-panel integral
    of the quadratic through its panel, h/12 (5 y_{2j} + 8 y_{2j+1} - y_{2j+2}), to the
    preceding even node, so both node families are fourth-order accurate.
    """
    y = np.asarray(y, dtype=float)
    intervals = y.shape[0] - 1
    if intervals < 2 or intervals % 2:
        raise InputError(f"cumulative_simpson: expected an even number of intervals >= 2, got {intervals}")
    left, mid, right = y[0:-1:2], y[1::2], y[2::2]
    panels = (h / 3.0) * (left + 4.0 * mid + right)
    out = np.zeros_like(y)
    out[2::2] = np.cumsum(panels, axis=0)
    out[1::2] = out[0:-1:2] + (h / 12.0) * (5.0 * left + 8.0 * mid - right)
    return out


def simpson(y: np.ndarray, h: float) -> np.ndarray:
    """int_0^omega y ds along axis 0 (composite Simpson for an even interval count)."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 3:
        raise InputError(f"simpson: expected at least 3 samples, got {y.shape[0]}")
    return _scipy_simpson(y, dx=h, axis=0)
