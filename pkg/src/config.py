"""
Configuration loaded from environment and .env.
Numerical defaults for the closure criterion, the RK4 oracle and sweeps.
"""
import os
from pathlib import Path

try:
    from dotenv import load_dotenv
except ImportError:
    raise ImportError(
        "Missing dependency: python-dotenv. Install with:\n"
        "  pip install -r requirements.txt\n"
        "or: pip install python-dotenv"
    ) from None

# Project root: parent of src/
PROJECT_ROOT = Path(__file__).resolve().parent.parent
# Load .env from project root or config/
load_dotenv(PROJECT_ROOT / ".env")
load_dotenv(PROJECT_ROOT / "config" / ".env")


def _int(key: str, default: int) -> int:
    try:
        return int(os.environ.get(key, str(default)))
    except ValueError:
        return default


def _float(key: str, default: float) -> float:
    try:
        return float(os.environ.get(key, str(default)))
    except ValueError:
        return default


def _bool(key: str, default: bool) -> bool:
    raw = os.environ.get(key, "").strip().lower()
    if raw in ("1", "true", "yes", "on"):
        return True
    if raw in ("0", "false", "no", "off"):
        return False
    return default


# Peano-Baker series: shared Simpson grid (number of intervals, must be even)
GRID_POINTS = _int("CLOSURE_GRID_POINTS", 2048)
MAX_ORDER = _int("CLOSURE_MAX_ORDER", 64)
TOL_SERIES = _float("CLOSURE_TOL_SERIES", 1e-14)
# Verdict threshold on the criterion residuals
TOL_ZERO = _float("CLOSURE_TOL_ZERO", 1e-8)

# RK4 oracle
STEPS = _int("CLOSURE_STEPS", 4096)
REORTHONORMALIZE = _bool("CLOSURE_REORTHONORMALIZE", False)
# Max-abs orthonormality defect tolerated before a drift warning
FRAME_TOL = _float("CLOSURE_FRAME_TOL", 1e-8)

# Darboux closed forms: |D| below this uses the D -> 0 limits
DARBOUX_DELTA = _float("CLOSURE_DARBOUX_DELTA", 1e-12)

SWEEP_WORKERS = _int("SWEEP_WORKERS", 4)

# Paths
OUTPUT_DIR = PROJECT_ROOT / os.environ.get("OUTPUT_DIR", "output")
LOGS_DIR = PROJECT_ROOT / os.environ.get("LOGS_DIR", "logs")
EXAMPLES_DIR = PROJECT_ROOT / "config" / "examples"
LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO").strip().upper() or "INFO"


def validate_config() -> None:
    """Check the environment-supplied numerics before any job runs."""
    if GRID_POINTS < 2 or GRID_POINTS % 2:
        raise ValueError("CLOSURE_GRID_POINTS must be an even integer >= 2.")
    if STEPS < 2:
        raise ValueError("CLOSURE_STEPS must be >= 2.")
    if MAX_ORDER < 1:
        raise ValueError("CLOSURE_MAX_ORDER must be >= 1.")
    for key, value in (
        ("CLOSURE_TOL_SERIES", TOL_SERIES),
        ("CLOSURE_TOL_ZERO", TOL_ZERO),
        ("CLOSURE_FRAME_TOL", FRAME_TOL),
    ):
        if not value > 0:
            raise ValueError(f"{key} must be positive.")
    if DARBOUX_DELTA < 0:
        raise ValueError("CLOSURE_DARBOUX_DELTA must be non-negative.")
    if SWEEP_WORKERS < 1:
        raise ValueError("SWEEP_WORKERS must be >= 1.")
