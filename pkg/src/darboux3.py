"""
Constant-curvature Darboux frames on a timelike surface in E_1^3: closed forms of the
first row of M(omega), of its integrals over one period, and the resulting closure test.

With D = kg^2 - eps kn^2 + eps tg^2 the Darboux matrix satisfies A^3 = D A, so
    exp(A s) - I = S(s) A + C(s) A^2,
    S(s) = sinh(sqrt(D) s) / sqrt(D),   C(s) = (cosh(sqrt(D) s) - 1) / D,
and int_0^w S = C(w), int_0^w C = (S(w) - w) / D =: E(w).
D < 0 switches to the trigonometric branch, |D| <= delta to the D -> 0 limits.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from . import config
from .errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DarbouxParams:
    """Geodesic curvature kg, normal curvature kn, geodesic torsion tg, eps = <T,T>, period omega."""
    kg: float
    kn: float
    tg: float
    eps: int
    omega: float

    def __post_init__(self):
        for name in ("kg", "kn", "tg", "omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name}: expected a finite value, got {value!r}")
            object.__setattr__(self, name, value)
        if self.omega <= 0:
            raise ValidationError(f"omega: expected a value > 0, got {self.omega!r}")
        if self.eps not in (-1, 1):
            raise ValidationError(f"eps: expected -1 or +1, got {self.eps!r}")
        object.__setattr__(self, "eps", int(self.eps))
        if not math.isfinite(self.discriminant):
            raise ValidationError("discriminant kg^2 - eps kn^2 + eps tg^2 overflows")

    @property
    def base(self) -> float:
        """kg^2 - eps kn^2, the prefactor of m11."""
        return self.kg ** 2 - self.eps * self.kn ** 2

    @property
    def discriminant(self) -> float:
        return self.base + self.eps * self.tg ** 2


def discriminant(prm: DarbouxParams) -> float:
    return prm.discriminant


def _e_series(D: float, omega: float) -> float:
    """sum_j D^j omega^(2j+3) / (2j+3)!, used where (S - omega)/D cancels badly."""
    x2 = D * omega * omega
    term = omega ** 3 / 6.0
    total = term
    j = 0
    while abs(term) > 1e-18 * abs(total) and j < 60:
        term *= x2 / ((2 * j + 4) * (2 * j + 5))
        total += term
        j += 1
    return total


def _kernels(D: float, omega: float, delta: float) -> Tuple[float, float, float]:
    """(C, S, E) at s = omega under the sign-split rule."""
    if abs(D) <= delta:
        return omega ** 2 / 2.0, omega, omega ** 3 / 6.0
    if D > 0:
        r = math.sqrt(D)
        C = 2.0 * math.sinh(0.5 * r * omega) ** 2 / D
        S = math.sinh(r * omega) / r
    else:
        r = math.sqrt(-D)
        C = 2.0 * math.sin(0.5 * r * omega) ** 2 / (-D)
        S = math.sin(r * omega) / r
    if abs(D) * omega * omega < 1.0:
        E = _e_series(D, omega)
    else:
        E = (S - omega) / D
    return C, S, E


def closed_form_row1(prm: DarbouxParams, delta: Optional[float] = None) -> Tuple[float, float, float]:
    """(m11, m12, m13) of M(omega) for the constant Darboux system on a timelike surface."""
    delta = config.DARBOUX_DELTA if delta is None else delta
    C, S, _ = _kernels(prm.discriminant, prm.omega, delta)
    kg, kn, tg, eps = prm.kg, prm.kn, prm.tg, prm.eps
    m11 = prm.base * C
    m12 = kg * S - eps * kn * tg * C
    m13 = -eps * kn * S + eps * kg * tg * C
    return m11, m12, m13


def closed_form_row1_integrals(prm: DarbouxParams, delta: Optional[float] = None) -> Tuple[float, float, float]:
    """(omega + int m11, int m12, int m13) over one period: the closing conditions on the tangent."""
    delta = config.DARBOUX_DELTA if delta is None else delta
    C, _, E = _kernels(prm.discriminant, prm.omega, delta)
    kg, kn, tg, eps = prm.kg, prm.kn, prm.tg, prm.eps
    i11 = prm.omega + prm.base * E
    i12 = kg * C - eps * kn * tg * E
    i13 = -eps * kn * C + eps * kg * tg * E
    return i11, i12, i13


def matching_k(prm: DarbouxParams, tol: float) -> Optional[int]:
    """Smallest k >= 1 with |kg^2 - eps kn^2 + (2 k pi / omega)^2| < tol, if any."""
    k_max = math.ceil(prm.omega * math.sqrt(max(0.0, -prm.base)) / (2.0 * math.pi)) + 1
    for k in range(1, k_max + 1):
        if abs(prm.base + (2.0 * k * math.pi / prm.omega) ** 2) < tol:
            return k
    return None


def darboux_closure_condition(prm: DarbouxParams, tol: Optional[float] = None) -> Tuple[bool, Optional[int]]:
    """
    Closed of period omega iff tg = 0 and kg^2 - eps kn^2 = -(2 k pi / omega)^2 for some k >= 1.
    Returns (closed, k); k is None when not closed.
    """
    tol = config.TOL_ZERO if tol is None else tol
    if abs(prm.tg) >= tol:
        return False, None
    k = matching_k(prm, tol)
    logger.debug("Darboux condition kg=%r kn=%r eps=%d -> k=%s", prm.kg, prm.kn, prm.eps, k)
    return k is not None, k
