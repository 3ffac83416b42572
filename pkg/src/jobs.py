"""
Job configuration: a JSON file with `problem`, `numerics`, `outputs` and (for sweeps)
`sweep` sections, merged over the environment defaults of src.config and overridden
by command-line flags.

Scalars may be numbers or multiples of pi written as strings: "pi", "2pi", "-0.5*pi".
"""
import copy
import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import config
from .darboux3 import DarbouxParams
from .errors import ValidationError
from .frenet_system import DarbouxSpacelikeSystem, DarbouxTimelikeSystem, FrenetSystem, SystemSpec
from .minkowski_core import MetricSignature
from .peano_baker import Numerics
from .profiles import Constant, CurvatureProfile, Fourier, Sampled

logger = logging.getLogger(__name__)

PROBLEM_KINDS = ("frenet", "darboux_timelike", "darboux_spacelike")
FORMATS = {"csv": "csv", "jsonl": "jsonl", "json-lines": "jsonl"}

_PI_RE = re.compile(r"^([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi$")


def parse_number(value: Any, field: str) -> float:
    """Float from a number, a numeric string, or a multiple of pi ("2pi", "2*pi", "-pi")."""
    if isinstance(value, bool):
        raise ValidationError(f"{field}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        text = value.strip().lower()
        match = _PI_RE.match(text)
        if match:
            sign = -1.0 if match.group(1) == "-" else 1.0
            coef = float(match.group(2)) if match.group(2) else 1.0
            out = sign * coef * math.pi
        else:
            try:
                out = float(text)
            except ValueError:
                raise ValidationError(f"{field}: expected a number or a multiple of pi, got {value!r}") from None
    else:
        raise ValidationError(f"{field}: expected a number, got {value!r}")
    if not math.isfinite(out):
        raise ValidationError(f"{field}: expected a finite number, got {value!r}")
    return out


def parse_int(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ValidationError(f"{field}: expected an integer, got {value!r}")
    try:
        out = float(value)
    except ValueError:
        raise ValidationError(f"{field}: expected an integer, got {value!r}") from None
    if not out.is_integer():
        raise ValidationError(f"{field}: expected an integer, got {value!r}")
    return int(out)


def _require(mapping: dict, key: str, path: str) -> Any:
    if not isinstance(mapping, dict):
        raise ValidationError(f"{path}: expected an object, got {type(mapping).__name__}")
    if key not in mapping:
        raise ValidationError(f"{path}.{key}: required")
    return mapping[key]


def build_curvature(entry: Any, field: str):
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ValidationError(f"{field}: expected exactly one of constant, fourier, samples")
    (kind, body), = entry.items()
    if kind == "constant":
        return Constant(parse_number(body, f"{field}.constant"))
    if kind == "fourier":
        if not isinstance(body, dict):
            raise ValidationError(f"{field}.fourier: expected an object with a0, a, b")
        a0 = parse_number(body.get("a0", 0.0), f"{field}.fourier.a0")
        a = [parse_number(x, f"{field}.fourier.a[{i}]") for i, x in enumerate(body.get("a", []))]
        b = [parse_number(x, f"{field}.fourier.b[{i}]") for i, x in enumerate(body.get("b", []))]
        return Fourier(a0, tuple(a), tuple(b))
    if kind == "samples":
        if not isinstance(body, list):
            raise ValidationError(f"{field}.samples: expected a list of numbers")
        values = [parse_number(x, f"{field}.samples[{i}]") for i, x in enumerate(body)]
        try:
            return Sampled(tuple(values))
        except ValidationError as e:
            raise ValidationError(f"{field}.{e}") from None
    raise ValidationError(f"{field}: unknown curvature kind {kind!r} (expected constant, fourier, samples)")


def build_system(problem: dict) -> SystemSpec:
    """Validated system from a `problem` block; error messages carry the field path."""
    if not isinstance(problem, dict):
        raise ValidationError(f"problem: expected an object, got {type(problem).__name__}")
    kind = problem.get("kind", "frenet")
    if kind not in PROBLEM_KINDS:
        raise ValidationError(f"problem.kind: expected one of {', '.join(PROBLEM_KINDS)}, got {kind!r}")
    try:
        if kind == "frenet":
            sig_block = _require(problem, "signature", "problem")
            sig = MetricSignature(
                parse_int(_require(sig_block, "n", "problem.signature"), "problem.signature.n"),
                parse_int(_require(sig_block, "v", "problem.signature"), "problem.signature.v"),
            )
            eps_raw = _require(problem, "eps", "problem")
            if not isinstance(eps_raw, list):
                raise ValidationError("problem.eps: expected a list of signs")
            eps = [parse_int(e, f"problem.eps[{i}]") for i, e in enumerate(eps_raw)]
            curv_raw = _require(problem, "curvatures", "problem")
            if not isinstance(curv_raw, list):
                raise ValidationError("problem.curvatures: expected a list")
            curvatures = [build_curvature(c, f"problem.curvatures[{i}]") for i, c in enumerate(curv_raw)]
            omega = parse_number(_require(problem, "omega", "problem"), "problem.omega")
            return FrenetSystem(CurvatureProfile(sig, omega, tuple(curvatures), tuple(eps)))
        kg = parse_number(_require(problem, "kg", "problem"), "problem.kg")
        kn = parse_number(_require(problem, "kn", "problem"), "problem.kn")
        tg = parse_number(_require(problem, "tg", "problem"), "problem.tg")
        omega = parse_number(_require(problem, "omega", "problem"), "problem.omega")
        if kind == "darboux_spacelike":
            return DarbouxSpacelikeSystem(kg, kn, tg, omega)
        eps = parse_int(_require(problem, "eps", "problem"), "problem.eps")
        return DarbouxTimelikeSystem(DarbouxParams(kg, kn, tg, eps, omega))
    except ValidationError as e:
        message = str(e)
        if message.startswith("problem.") or message.startswith("problem:"):
            raise
        raise ValidationError(f"problem.{message}") from None


def build_numerics(raw: Optional[dict], overrides: Optional[dict] = None) -> Numerics:
    fields: Dict[str, Any] = {}
    known = Numerics.__dataclass_fields__.keys()
    for key, value in (raw or {}).items():
        if key not in known:
            raise ValidationError(f"numerics.{key}: unknown setting (expected one of {', '.join(known)})")
        if key in ("grid_points", "steps", "max_order"):
            value = parse_int(value, f"numerics.{key}")
        elif key in ("tol_series", "tol_zero"):
            value = parse_number(value, f"numerics.{key}")
        fields[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            fields[key] = value
    return Numerics(**fields)


@dataclass(frozen=True)
class Outputs:
    report_path: Optional[Path] = None
    trace_path: Optional[Path] = None
    format: str = "csv"
    include_frames: bool = False

    def as_dict(self) -> dict:
        return {
            "report_path": str(self.report_path) if self.report_path else None,
            "trace_path": str(self.trace_path) if self.trace_path else None,
            "format": self.format,
            "include_frames": self.include_frames,
        }


def build_outputs(raw: Optional[dict], overrides: Optional[dict] = None) -> Outputs:
    raw = dict(raw or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    fmt = str(raw.get("format", "csv")).lower()
    if fmt not in FORMATS:
        raise ValidationError(f"outputs.format: expected csv or jsonl, got {raw.get('format')!r}")
    report = raw.get("report_path")
    trace = raw.get("trace_path")
    return Outputs(
        report_path=Path(report) if report else None,
        trace_path=Path(trace) if trace else None,
        format=FORMATS[fmt],
        include_frames=bool(raw.get("include_frames", False)),
    )


@dataclass(frozen=True)
class SweepAxis:
    param: str
    start: float
    stop: float
    num: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


def sweep_params(problem: dict) -> Tuple[str, ...]:
    if problem.get("kind", "frenet") == "frenet":
        count = len(problem.get("curvatures", []))
        return tuple(f"k{i + 1}" for i in range(count)) + ("omega",)
    return ("kg", "kn", "tg", "omega")


def build_sweep(raw: Any, problem: dict) -> Tuple[SweepAxis, ...]:
    if raw is None:
        return ()
    axes_raw = _require(raw, "axes", "sweep")
    if not isinstance(axes_raw, dict) or not axes_raw:
        raise ValidationError("sweep.axes: expected a non-empty object of {param: {start, stop, num}}")
    allowed = sweep_params(problem)
    axes: List[SweepAxis] = []
    for param, spec in axes_raw.items():
        path = f"sweep.axes.{param}"
        if param not in allowed:
            raise ValidationError(f"{path}: unknown parameter (expected one of {', '.join(allowed)})")
        num = parse_int(_require(spec, "num", path), f"{path}.num")
        if num < 1:
            raise ValidationError(f"{path}.num: expected >= 1, got {num}")
        start = parse_number(_require(spec, "start", path), f"{path}.start")
        stop = parse_number(spec.get("stop", start), f"{path}.stop")
        axes.append(SweepAxis(param, start, stop, num))
    return tuple(axes)


def with_parameters(problem: dict, values: Dict[str, float]) -> dict:
    """Copy of `problem` with sweep parameters substituted (k_i become constant curvatures)."""
    out = copy.deepcopy(problem)
    for param, value in values.items():
        if param.startswith("k") and param[1:].isdigit():
            out["curvatures"][int(param[1:]) - 1] = {"constant": float(value)}
        else:
            out[param] = float(value)
    return out


@dataclass(frozen=True, eq=False)
class JobConfig:
    problem: dict
    system: SystemSpec
    numerics: Numerics
    outputs: Outputs
    sweep: Tuple[SweepAxis, ...] = ()

    def echo(self) -> dict:
        """Effective configuration; loading it back reproduces the run."""
        out = {
            "problem": self.system.describe(),
            "numerics": self.numerics.as_dict(),
            "outputs": self.outputs.as_dict(),
        }
        if self.sweep:
            out["sweep"] = {
                "axes": {a.param: {"start": a.start, "stop": a.stop, "num": a.num} for a in self.sweep}
            }
        return out


def load_config_file(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"config: file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"config: invalid JSON in {path} (line {e.lineno}, column {e.colno}): {e.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"config: expected a JSON object at top level in {path}")
    return data


def build_job(
    data: dict,
    numeric_overrides: Optional[dict] = None,
    output_overrides: Optional[dict] = None,
) -> JobConfig:
    problem = _require(data, "problem", "config")
    if not isinstance(problem, dict):
        raise ValidationError("problem: expected an object")
    system = build_system(problem)
    numerics = build_numerics(data.get("numerics"), numeric_overrides)
    outputs = build_outputs(data.get("outputs"), output_overrides)
    sweep = build_sweep(data.get("sweep"), problem)
    logger.debug("Job: %s system, n=%d, omega=%r", system.kind, system.dimension, system.omega)
    return JobConfig(problem=problem, system=system, numerics=numerics, outputs=outputs, sweep=sweep)


def load_job(
    path: Path,
    numeric_overrides: Optional[dict] = None,
    output_overrides: Optional[dict] = None,
) -> JobConfig:
    return build_job(load_config_file(path), numeric_overrides, output_overrides)


def default_output(name: str) -> Path:
    config.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    return config.OUTPUT_DIR / name
