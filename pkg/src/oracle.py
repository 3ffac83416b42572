"""
Ground truth for the closure criterion: integrate the frame equations F' = A(s) F together
with the curve x' = V_1 by fixed-step classical RK4, then measure how far the frame and
the curve are from closing after one period.

Without a supplied initial frame the frame starts at the identity and lives in frame
coordinates, where the metric is diag(eps). A supplied frame is validated against the
ambient signature and propagated in ambient coordinates.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import config
from .errors import InputError, NumericError, ValidationError
from .frenet_system import SystemLike, as_system
from .minkowski_core import FrameState, gram_matrix, indefinite_gram_schmidt, validate_frame
from .quadrature import simpson

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CurveTrace:
    """Arc-length samples s_k of the curve x(s_k) and its frame (rows = V_1..V_n)."""
    s_grid: np.ndarray
    positions: np.ndarray
    frames: np.ndarray
    signs: Tuple[int, ...]
    metric: np.ndarray

    @property
    def n(self) -> int:
        return self.frames.shape[-1]

    @property
    def steps(self) -> int:
        return len(self.s_grid) - 1

    @property
    def omega(self) -> float:
        return float(self.s_grid[-1])

    def fundamental(self, k: int = -1) -> np.ndarray:
        """Phi(s_k) with F(s_k) = Phi(s_k) F(0)."""
        return np.linalg.solve(self.frames[0].T, self.frames[k].T).T


class ClosureResiduals(NamedTuple):
    gap: float
    frame_gap: float
    tangent_integral: np.ndarray


def _initial_frame(system, frame0: Optional[FrameState]) -> Tuple[np.ndarray, np.ndarray]:
    signs = system.signs()
    if frame0 is None:
        return np.eye(system.dimension), np.asarray(signs, dtype=float)
    if tuple(frame0.signs) != tuple(signs):
        raise ValidationError(f"initial_frame.signs: expected {list(signs)}, got {list(frame0.signs)}")
    sig = system.signature()
    validate_frame(frame0, sig)
    return np.array(frame0.vectors), sig.metric_diagonal


def _propagate(
    system,
    steps: int,
    x0: Optional[np.ndarray],
    frame0: Optional[FrameState],
    reorthonormalize: bool,
) -> CurveTrace:
    if int(steps) != steps or steps < 2:
        raise InputError(f"steps: expected an integer >= 2, got {steps!r}")
    steps = int(steps)
    n = system.dimension
    omega = system.omega
    h = omega / steps
    F, metric = _initial_frame(system, frame0)
    signs = system.signs()
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (n,):
        raise InputError(f"x0: expected dimension {n}, got shape {x.shape}")

    # A at every node and midpoint: index 2k is s_k, 2k + 1 is s_k + h/2
    s_half = np.linspace(0.0, omega, 2 * steps + 1)
    A = system.coefficient(s_half)
    if not np.all(np.isfinite(A)):
        bad = int(np.argwhere(~np.isfinite(A))[0][0])
        raise NumericError("coefficient matrix is not finite", s=float(s_half[bad]))

    frames = np.empty((steps + 1, n, n))
    positions = np.empty((steps + 1, n))
    frames[0] = F
    positions[0] = x
    for k in range(steps):
        A0, Am, A1 = A[2 * k], A[2 * k + 1], A[2 * k + 2]
        k1 = A0 @ F
        F2 = F + 0.5 * h * k1
        k2 = Am @ F2
        F3 = F + 0.5 * h * k2
        k3 = Am @ F3
        F4 = F + h * k3
        k4 = A1 @ F4
        # x' = V_1 at each stage frame
        x = x + (h / 6.0) * (F[0] + 2.0 * F2[0] + 2.0 * F3[0] + F4[0])
        F = F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if reorthonormalize:
            F = indefinite_gram_schmidt(F, metric, signs)
        frames[k + 1] = F
        positions[k + 1] = x
    if not (np.all(np.isfinite(frames)) and np.all(np.isfinite(positions))):
        bad = int(np.argwhere(~np.isfinite(frames).all(axis=(1, 2)) | ~np.isfinite(positions).all(axis=1))[0][0])
        raise NumericError("integration diverged", s=float(s_half[2 * bad]))
    logger.debug("RK4: %d steps of h=%.3g over omega=%r (n=%d)", steps, h, omega, n)
    return CurveTrace(
        s_grid=s_half[::2].copy(),
        positions=positions,
        frames=frames,
        signs=tuple(signs),
        metric=metric,
    )


def integrate_frame(
    system: SystemLike,
    steps: Optional[int] = None,
    frame0: Optional[FrameState] = None,
    reorthonormalize: Optional[bool] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """(s_k, Phi(s_k)) for Phi' = A Phi over one period; Phi(0) = I unless frame0 is given."""
    system = as_system(system)
    steps = config.STEPS if steps is None else steps
    reorthonormalize = config.REORTHONORMALIZE if reorthonormalize is None else reorthonormalize
    trace = _propagate(system, steps, None, frame0, reorthonormalize)
    return trace.s_grid, trace.frames


def monodromy(system: SystemLike, steps: Optional[int] = None) -> np.ndarray:
    """Phi(omega), the fundamental matrix after one period."""
    _, frames = integrate_frame(system, steps)
    return frames[-1]


def reconstruct_curve(
    system: SystemLike,
    steps: Optional[int] = None,
    x0=None,
    frame0: Optional[FrameState] = None,
    reorthonormalize: Optional[bool] = None,
) -> CurveTrace:
    """Integrate {F' = A F, x' = V_1} jointly inside the RK4 stages."""
    system = as_system(system)
    steps = config.STEPS if steps is None else steps
    reorthonormalize = config.REORTHONORMALIZE if reorthonormalize is None else reorthonormalize
    trace = _propagate(system, steps, x0, frame0, reorthonormalize)
    drift = frame_drift(trace)
    if drift > config.FRAME_TOL:
        logger.warning("Frame orthonormality drift %.3g exceeds %.3g (steps=%d)", drift, config.FRAME_TOL, trace.steps)
    return trace


def closure_residuals(trace: CurveTrace) -> ClosureResiduals:
    """
    gap: Euclidean coordinate norm of x(omega) - x(0) (the pseudo-norm vanishes on null gaps);
    frame_gap: max-abs of Phi(omega) - I; tangent_integral: Simpson estimate of int V_1 ds.
    """
    if len(trace.s_grid) < 3:
        raise InputError(f"trace: expected at least 3 samples, got {len(trace.s_grid)}")
    gap = float(np.linalg.norm(trace.positions[-1] - trace.positions[0]))
    frame_gap = float(np.max(np.abs(trace.fundamental(-1) - np.eye(trace.n))))
    h = trace.omega / trace.steps
    tangent_integral = simpson(trace.frames[:, 0, :], h)
    return ClosureResiduals(gap, frame_gap, tangent_integral)


def frame_drift(trace: CurveTrace) -> float:
    """Largest orthonormality defect |<V_i, V_j> - eps_i delta_ij| over all samples."""
    G = gram_matrix(trace.frames, trace.metric)
    return float(np.max(np.abs(G - np.diag(np.asarray(trace.signs, dtype=float)))))


def determinant_drift(trace: CurveTrace) -> float:
    """max_k |det Phi(s_k) - 1|."""
    dets = np.linalg.det(trace.frames) / np.linalg.det(trace.frames[0])
    return float(np.max(np.abs(dets - 1.0)))


def lemma_integral(system: SystemLike, trace: CurveTrace, lam) -> np.ndarray:
    """
    int_0^omega A(s) phi(s, lam) ds with phi(s, lam) = Phi(s) lam, from the trace samples.
    Equals (Phi(omega) - I) lam; it vanishes exactly when phi(., lam) has period omega.
    """
    system = as_system(system)
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (trace.n,):
        raise InputError(f"lam: expected dimension {trace.n}, got shape {lam.shape}")
    A = system.coefficient(trace.s_grid)
    phi = trace.frames @ np.linalg.solve(trace.frames[0], lam)
    return simpson(A @ phi[..., None], trace.omega / trace.steps)[:, 0]
