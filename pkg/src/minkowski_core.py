"""
Indefinite-metric linear algebra for Minkowski space-time E_v^n.

The metric has signature (-1 x v, +1 x (n - v)):
    <u, w> = -u_1 w_1 - ... - u_v w_v + u_{v+1} w_{v+1} + ... + u_n w_n
Vectors are dense float64 numpy arrays; frames hold one frame vector per row.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from . import config
from .errors import InputError, NumericError, ValidationError

logger = logging.getLogger(__name__)


class CausalCharacter(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


@dataclass(frozen=True)
class MetricSignature:
    """Ambient dimension n and index v (number of negative metric directions)."""
    n: int
    v: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.v) != self.v:
            raise ValidationError(f"signature: n and v must be integers, got n={self.n!r}, v={self.v!r}")
        if self.n < 2:
            raise ValidationError(f"signature.n: expected n >= 2, got {self.n}")
        if not 0 <= self.v < self.n:
            raise ValidationError(f"signature.v: expected 0 <= v < n={self.n}, got {self.v}")

    @property
    def metric_diagonal(self) -> np.ndarray:
        return np.concatenate([-np.ones(self.v), np.ones(self.n - self.v)])

    @property
    def metric_tensor(self) -> np.ndarray:
        return np.diag(self.metric_diagonal)


def _as_vector(u, sig: MetricSignature, name: str = "vector") -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if arr.shape != (sig.n,):
        raise InputError(f"{name}: expected dimension {sig.n}, got shape {arr.shape}")
    return arr


def check_signs(signs: Sequence[int], v: int, n: int = None, name: str = "eps") -> Tuple[int, ...]:
    """Validate a frame-sign sequence against the metric index; returns it as a tuple of ints."""
    out = []
    for i, e in enumerate(signs):
        if e not in (-1, 1):
            raise ValidationError(f"{name}[{i}]: expected -1 or +1, got {e!r}")
        out.append(int(e))
    if n is not None and len(out) != n:
        raise ValidationError(f"{name}: expected {n} signs, got {len(out)}")
    negatives = out.count(-1)
    if negatives != v:
        plural = "sign" if v == 1 else "signs"
        raise ValidationError(f"{name}: expected {v} negative {plural} for v={v}, got {negatives}")
    return tuple(out)


def inner(u, w, sig: MetricSignature) -> float:
    """Indefinite inner product <u, w> under the signature's metric."""
    u = _as_vector(u, sig, "u")
    w = _as_vector(w, sig, "w")
    return float(np.sum(u * w * sig.metric_diagonal))


def causal_character(u, sig: MetricSignature) -> CausalCharacter:
    # Exact comparison with 0.0: tiny non-zero values keep their sign.
    u = _as_vector(u, sig, "u")
    q = inner(u, u, sig)
    if q > 0 or not np.any(u):
        return CausalCharacter.SPACELIKE
    if q < 0:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.NULL


def pseudo_norm(u, sig: MetricSignature) -> float:
    """sqrt(|<u, u>|); zero on null vectors."""
    return float(np.sqrt(abs(inner(u, u, sig))))


def gram_matrix(vectors: np.ndarray, metric_diagonal: np.ndarray) -> np.ndarray:
    """Pairwise inner products of the rows of `vectors` (works on stacks of frames)."""
    vectors = np.asarray(vectors, dtype=float)
    return (vectors * metric_diagonal) @ np.swapaxes(vectors, -1, -2)


@dataclass(frozen=True, eq=False)
class FrameState:
    """Pseudo-orthonormal frame: row i of `vectors` is V_i, signs[i] = <V_i, V_i>."""
    vectors: np.ndarray
    signs: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise InputError(f"frame.vectors: expected a square matrix, got shape {vectors.shape}")
        signs = tuple(int(e) for e in self.signs)
        if len(signs) != vectors.shape[0]:
            raise InputError(f"frame.signs: expected {vectors.shape[0]} signs, got {len(signs)}")
        if any(e not in (-1, 1) for e in signs):
            raise InputError(f"frame.signs: entries must be -1 or +1, got {signs}")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "signs", signs)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def frame_residual(frame: FrameState, sig: MetricSignature) -> np.ndarray:
    """G - diag(eps) with G_ij = <V_i, V_j>; its max-abs entry is the orthonormality defect."""
    if frame.n != sig.n:
        raise InputError(f"frame: expected {sig.n} vectors, got {frame.n}")
    return gram_matrix(frame.vectors, sig.metric_diagonal) - np.diag(frame.signs)


def validate_frame(frame: FrameState, sig: MetricSignature, tol: float = None) -> float:
    """
    Check that the frame realizes the signature (v signs equal to -1) and is
    pseudo-orthonormal within tol. Returns the orthonormality defect.
    """
    tol = config.FRAME_TOL if tol is None else tol
    check_signs(frame.signs, sig.v, name="frame.signs")
    defect = float(np.max(np.abs(frame_residual(frame, sig))))
    if defect > tol:
        raise ValidationError(f"frame: not pseudo-orthonormal (defect {defect:.3g} > {tol:.3g})")
    return defect


def indefinite_gram_schmidt(
    vectors: np.ndarray,
    metric_diagonal: np.ndarray,
    signs: Sequence[int],
) -> np.ndarray:
    """
    Re-orthonormalize the rows of `vectors` against the indefinite metric, in row order.
    Row i keeps its direction up to the components along rows j < i and is rescaled so
    that <V_i, V_i> = signs[i]. Raises NumericError if a row's causal character flips.
    """
    out = np.array(vectors, dtype=float)
    for i in range(out.shape[0]):
        r = out[i]
        for j in range(i):
            r = r - signs[j] * np.sum(r * out[j] * metric_diagonal) * out[j]
        q = float(np.sum(r * r * metric_diagonal))
        if q == 0.0 or np.sign(q) != signs[i]:
            raise NumericError(f"Gram-Schmidt: frame vector {i + 1} lost its causal character (<V,V>={q!r})")
        out[i] = r / np.sqrt(abs(q))
    return out
