"""
Periodic curvature data (k_1, ..., k_{n-1}, omega, eps) and the coefficient matrices
of the Frenet and Darboux derivative systems built from it.

Curvature functions are evaluated vectorized: `s` may be a scalar or any numpy array,
and every representation is omega-periodic by construction.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import InputError, NumericError, ValidationError
from .minkowski_core import MetricSignature, check_signs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constant:
    c: float

    def evaluate(self, s, omega: float) -> np.ndarray:
        return np.full(np.shape(s), float(self.c))

    def describe(self) -> dict:
        return {"constant": float(self.c)}


@dataclass(frozen=True)
class Fourier:
    """a0 + sum_m a_m cos(2 pi m s / omega) + b_m sin(2 pi m s / omega), m = 1..M."""
    a0: float
    a: Tuple[float, ...] = ()
    b: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))

    def evaluate(self, s, omega: float) -> np.ndarray:
        s = np.mod(np.asarray(s, dtype=float), omega)
        out = np.full(s.shape, float(self.a0))
        for m in range(1, max(len(self.a), len(self.b)) + 1):
            phase = 2.0 * np.pi * m * s / omega
            if m <= len(self.a):
                out = out + self.a[m - 1] * np.cos(phase)
            if m <= len(self.b):
                out = out + self.b[m - 1] * np.sin(phase)
        return out

    def describe(self) -> dict:
        return {"fourier": {"a0": float(self.a0), "a": list(self.a), "b": list(self.b)}}


@dataclass(frozen=True)
class Sampled:
    """Uniform samples over [0, omega), linear interpolation with wraparound (piecewise C^1 only)."""
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(x) for x in self.values)
        if len(values) < 2:
            raise ValidationError(f"samples: expected at least 2 values, got {len(values)}")
        object.__setattr__(self, "values", values)

    def evaluate(self, s, omega: float) -> np.ndarray:
        xp = np.arange(len(self.values)) * (omega / len(self.values))
        return np.asarray(np.interp(s, xp, self.values, period=omega), dtype=float)

    def describe(self) -> dict:
        return {"samples": list(self.values)}


CurvatureFunction = Union[Constant, Fourier, Sampled]


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Curvatures k_1..k_{n-1} of period omega with frame signs eps under signature sig."""
    sig: MetricSignature
    omega: float
    curvatures: Tuple[CurvatureFunction, ...]
    eps: Tuple[int, ...]

    def __post_init__(self):
        omega = float(self.omega)
        if not np.isfinite(omega) or omega <= 0:
            raise ValidationError(f"omega: expected a finite value > 0, got {self.omega!r}")
        curvatures = tuple(self.curvatures)
        if len(curvatures) != self.sig.n - 1:
            raise ValidationError(
                f"curvatures: expected {self.sig.n - 1} curvature functions for n={self.sig.n}, got {len(curvatures)}"
            )
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "curvatures", curvatures)
        object.__setattr__(self, "eps", check_signs(self.eps, self.sig.v, self.sig.n))

    @property
    def n(self) -> int:
        return self.sig.n

    def evaluate(self, s) -> np.ndarray:
        """Curvature values, shape s.shape + (n - 1,)."""
        return np.stack([k.evaluate(s, self.omega) for k in self.curvatures], axis=-1)


def evaluate(p: CurvatureProfile, s) -> np.ndarray:
    return p.evaluate(s)


def assemble_A(p: CurvatureProfile, s) -> np.ndarray:
    """
    Coefficient matrix of the Frenet system: A[i, i+1] = eps_i k_i, A[i+1, i] = -eps_{i+1} k_i,
    zero elsewhere. For array-valued s the result has shape s.shape + (n, n).
    """
    k = p.evaluate(s)
    if not np.all(np.isfinite(k)):
        bad = np.argwhere(~np.isfinite(k))[0]
        s_bad = float(np.asarray(s, dtype=float)[tuple(bad[:-1])]) if np.ndim(s) else float(s)
        raise NumericError(f"curvature k{bad[-1] + 1} is not finite", s=s_bad)
    n = p.n
    eps = np.asarray(p.eps, dtype=float)
    A = np.zeros(np.shape(s) + (n, n))
    for i in range(n - 1):
        A[..., i, i + 1] = eps[i] * k[..., i]
        A[..., i + 1, i] = -eps[i + 1] * k[..., i]
    return A


class SurfaceKind(str, Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"


def darboux_signs(eps: int, surface: SurfaceKind) -> Tuple[int, int, int]:
    """Frame signs (<T,T>, <g,g>, <n,n>) fixed by the surface's causal character."""
    surface = SurfaceKind(surface)
    if surface is SurfaceKind.SPACELIKE:
        return (1, 1, -1)
    return (int(eps), -int(eps), 1)


def assemble_darboux_A(kg: float, kn: float, tg: float, eps: int, surface: SurfaceKind) -> np.ndarray:
    """Darboux derivative matrix for a curve on a timelike or spacelike surface in E_1^3."""
    surface = SurfaceKind(surface)
    if eps not in (-1, 1):
        raise InputError(f"eps: expected -1 or +1, got {eps!r}")
    if surface is SurfaceKind.SPACELIKE:
        if eps != 1:
            raise InputError("eps: a timelike curve cannot lie on a spacelike surface")
        return np.array([
            [0.0, kg, kn],
            [-kg, 0.0, tg],
            [kn, tg, 0.0],
        ], dtype=float)
    return np.array([
        [0.0, kg, -eps * kn],
        [kg, 0.0, eps * tg],
        [kn, tg, 0.0],
    ], dtype=float)


def metric_skew_defect(A: np.ndarray, signs: Sequence[int]) -> float:
    """max |A_ij eps_j + A_ji eps_i|: zero iff the flow preserves <V_i, V_j> = eps_i delta_ij."""
    E = np.diag(np.asarray(signs, dtype=float))
    skew = A @ E
    return float(np.max(np.abs(skew + np.swapaxes(skew, -1, -2))))
