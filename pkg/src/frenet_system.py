"""
One coefficient-matrix interface over the two ODE families: the Frenet system in E_v^n
and the Darboux systems of curves on timelike / spacelike surfaces in E_1^3.
The oracle and the series engine only see `dimension`, `omega`, `signs()` and
`coefficient(s)`.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .darboux3 import DarbouxParams
from .errors import InputError, ValidationError
from .minkowski_core import MetricSignature
from .profiles import (
    CurvatureProfile,
    SurfaceKind,
    assemble_A,
    assemble_darboux_A,
    darboux_signs,
)

logger = logging.getLogger(__name__)


class SystemSpec:
    """Base of the three system kinds."""
    kind: str = ""

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    @property
    def omega(self) -> float:
        raise NotImplementedError

    def signs(self) -> Tuple[int, ...]:
        raise NotImplementedError

    def coefficient(self, s) -> np.ndarray:
        raise NotImplementedError

    def signature(self) -> MetricSignature:
        """Signature realized by the frame: v = number of negative signs."""
        signs = self.signs()
        return MetricSignature(len(signs), signs.count(-1))

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class FrenetSystem(SystemSpec):
    profile: CurvatureProfile
    kind = "frenet"

    @property
    def dimension(self) -> int:
        return self.profile.n

    @property
    def omega(self) -> float:
        return self.profile.omega

    def signs(self) -> Tuple[int, ...]:
        return self.profile.eps

    def coefficient(self, s) -> np.ndarray:
        return assemble_A(self.profile, s)

    def signature(self) -> MetricSignature:
        return self.profile.sig

    def describe(self) -> dict:
        p = self.profile
        return {
            "kind": self.kind,
            "signature": {"n": p.sig.n, "v": p.sig.v},
            "eps": list(p.eps),
            "omega": p.omega,
            "curvatures": [k.describe() for k in p.curvatures],
        }


def _constant_stack(A: np.ndarray, s) -> np.ndarray:
    return np.broadcast_to(A, np.shape(s) + A.shape).copy()


@dataclass(frozen=True, eq=False)
class DarbouxTimelikeSystem(SystemSpec):
    prm: DarbouxParams
    kind = "darboux_timelike"

    @property
    def dimension(self) -> int:
        return 3

    @property
    def omega(self) -> float:
        return self.prm.omega

    def signs(self) -> Tuple[int, ...]:
        return darboux_signs(self.prm.eps, SurfaceKind.TIMELIKE)

    def coefficient(self, s) -> np.ndarray:
        p = self.prm
        return _constant_stack(assemble_darboux_A(p.kg, p.kn, p.tg, p.eps, SurfaceKind.TIMELIKE), s)

    def describe(self) -> dict:
        p = self.prm
        return {"kind": self.kind, "kg": p.kg, "kn": p.kn, "tg": p.tg, "eps": p.eps, "omega": p.omega}


@dataclass(frozen=True, eq=False)
class DarbouxSpacelikeSystem(SystemSpec):
    kg: float
    kn: float
    tg: float
    period: float
    kind = "darboux_spacelike"

    def __post_init__(self):
        for name in ("kg", "kn", "tg", "period"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name}: expected a finite value, got {value!r}")
            object.__setattr__(self, name, value)
        if self.period <= 0:
            raise ValidationError(f"omega: expected a value > 0, got {self.period!r}")

    @property
    def dimension(self) -> int:
        return 3

    @property
    def omega(self) -> float:
        return self.period

    def signs(self) -> Tuple[int, ...]:
        return darboux_signs(1, SurfaceKind.SPACELIKE)

    def coefficient(self, s) -> np.ndarray:
        return _constant_stack(assemble_darboux_A(self.kg, self.kn, self.tg, 1, SurfaceKind.SPACELIKE), s)

    def describe(self) -> dict:
        return {"kind": self.kind, "kg": self.kg, "kn": self.kn, "tg": self.tg, "omega": self.period}


SystemLike = Union[SystemSpec, CurvatureProfile, DarbouxParams]


def as_system(obj: SystemLike) -> SystemSpec:
    """Wrap a bare profile or Darboux parameter block into its system."""
    if isinstance(obj, SystemSpec):
        return obj
    if isinstance(obj, CurvatureProfile):
        return FrenetSystem(obj)
    if isinstance(obj, DarbouxParams):
        return DarbouxTimelikeSystem(obj)
    raise InputError(f"expected a system, curvature profile or Darboux parameters, got {type(obj).__name__}")


def coefficient(spec: SystemLike, s) -> np.ndarray:
    return as_system(spec).coefficient(s)


def sign_sequence(spec: SystemLike) -> Tuple[int, ...]:
    return as_system(spec).signs()
