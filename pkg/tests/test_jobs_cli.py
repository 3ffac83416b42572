"""Job configuration parsing, the sweep runner and the command-line front end."""
import contextlib
import io
import json
import math
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.testing import assert_allclose

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src import config
from src.errors import ValidationError
from src.jobs import (
    SweepAxis,
    build_job,
    build_numerics,
    build_outputs,
    build_system,
    load_config_file,
    load_job,
    parse_int,
    parse_number,
    with_parameters,
)
from src.main import _attach_values, main
from src.peano_baker import Numerics, closure_criterion
from src.report import print_closure, write_json
from src.sweep import evaluate_point, grid_points, run_sweep

TWO_PI = 2.0 * math.pi
EXAMPLES = PROJECT_ROOT / "config" / "examples"

CIRCLE = {
    "kind": "frenet",
    "signature": {"n": 3, "v": 0},
    "eps": [1, 1, 1],
    "omega": 1.0,
    "curvatures": [{"constant": "2pi"}, {"constant": 0.0}],
}


def _error(fn, *args) -> str:
    try:
        fn(*args)
    except ValidationError as e:
        return str(e)
    raise AssertionError("expected ValidationError")


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def _write_config(folder: str, data: dict) -> Path:
    path = Path(folder) / "job.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _strict_loads(text: str):
    def reject(token):
        raise ValueError(f"non-standard JSON token {token}")
    return json.loads(text, parse_constant=reject)


def test_parse_number() -> None:
    assert parse_number("2pi", "x") == TWO_PI
    assert parse_number("pi", "x") == math.pi
    assert parse_number("-0.5*pi", "x") == -0.5 * math.pi
    assert parse_number(" 3 * PI ", "x") == 3 * math.pi
    assert parse_number("1e-3", "x") == 1e-3
    assert parse_number(4, "x") == 4.0
    for bad in ("two pi", True, None, "inf", "nan", [1]):
        assert _error(parse_number, bad, "problem.kg").startswith("problem.kg:")
    assert parse_int("3", "n") == 3
    assert parse_int(4.0, "n") == 4
    _error(parse_int, 2.5, "n")


def test_build_system_errors_carry_field_path() -> None:
    bad_eps = dict(CIRCLE, signature={"n": 3, "v": 1})
    assert _error(build_system, bad_eps) == "problem.eps: expected 1 negative sign for v=1, got 0"
    assert _error(build_system, dict(CIRCLE, kind="bogus")).startswith("problem.kind:")
    missing = {k: v for k, v in CIRCLE.items() if k != "signature"}
    assert _error(build_system, missing) == "problem.signature: required"
    bad_curv = dict(CIRCLE, curvatures=[{"spline": [1, 2]}, {"constant": 0}])
    assert _error(build_system, bad_curv).startswith("problem.curvatures[0]:")
    short = dict(CIRCLE, curvatures=[{"samples": [1.0]}, {"constant": 0}])
    assert _error(build_system, short).startswith("problem.curvatures[0].samples:")
    assert _error(build_system, {"kind": "darboux_timelike", "kg": 0, "kn": 1, "tg": 0, "omega": 1}) == "problem.eps: required"
    assert _error(build_system, dict(CIRCLE, omega=-1.0)).startswith("problem.omega:")


def test_build_system_kinds() -> None:
    assert build_system(CIRCLE).kind == "frenet"
    darboux = build_system({"kind": "darboux_timelike", "kg": 0, "kn": "2pi", "tg": 0, "eps": -1, "omega": 1})
    assert darboux.signs() == (-1, 1, 1)
    spacelike = build_system({"kind": "darboux_spacelike", "kg": 1, "kn": 2, "tg": 3, "omega": 2})
    assert spacelike.signs() == (1, 1, -1)
    assert spacelike.omega == 2.0


def test_numerics_and_outputs() -> None:
    numerics = build_numerics({"grid_points": "512", "tol_zero": 1e-6}, {"steps": 256, "max_order": None})
    assert (numerics.grid_points, numerics.steps, numerics.tol_zero) == (512, 256, 1e-6)
    assert numerics.max_order == config.MAX_ORDER
    assert _error(build_numerics, {"grid": 4}).startswith("numerics.grid:")
    assert _error(build_numerics, {"grid_points": 7}).startswith("numerics.grid_points:")
    outputs = build_outputs({"format": "json-lines", "trace_path": "t.jsonl"}, {"report_path": Path("r.json")})
    assert outputs.format == "jsonl"
    assert outputs.report_path == Path("r.json")
    assert _error(build_outputs, {"format": "xml"}).startswith("outputs.format:")


def test_echo_reproduces_job() -> None:
    data = load_config_file(EXAMPLES / "lorentzian_fourier.json")
    job = build_job(data, {"steps": 128})
    again = build_job(json.loads(json.dumps(job.echo())))
    assert again.system.describe() == job.system.describe()
    assert again.numerics == job.numerics
    assert again.outputs == job.outputs


def test_example_configs_load() -> None:
    for path in sorted(EXAMPLES.glob("*.json")):
        job = load_job(path)
        assert job.system.dimension >= 3, path.name
    sweep = load_job(EXAMPLES / "sweep_circle.json").sweep
    assert [a.param for a in sweep] == ["k1", "k2"]
    assert len(grid_points(sweep)) == 121


def test_config_file_errors() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        assert _error(load_config_file, Path(tmp) / "missing.json").startswith("config: file not found")
        broken = Path(tmp) / "broken.json"
        broken.write_text("{\"problem\": ", encoding="utf-8")
        assert _error(load_config_file, broken).startswith("config: invalid JSON")
        listed = Path(tmp) / "list.json"
        listed.write_text("[1, 2]", encoding="utf-8")
        assert _error(load_config_file, listed).startswith("config: expected a JSON object")
    assert _error(build_job, {"numerics": {}}) == "config.problem: required"
    bad_axis = {"problem": CIRCLE, "sweep": {"axes": {"kg": {"start": 0, "num": 2}}}}
    assert _error(build_job, bad_axis).startswith("sweep.axes.kg:")


def test_grid_points_order() -> None:
    axes = (SweepAxis("k1", 1.0, 2.0, 2), SweepAxis("k2", 0.0, 1.0, 3))
    points = grid_points(axes)
    assert points[0] == {"k1": 1.0, "k2": 0.0}
    assert points[2] == {"k1": 1.0, "k2": 1.0}
    assert points[3] == {"k1": 2.0, "k2": 0.0}
    replaced = with_parameters(CIRCLE, {"k2": 0.25, "omega": 2.0})
    assert replaced["curvatures"][1] == {"constant": 0.25}
    assert replaced["omega"] == 2.0
    assert CIRCLE["omega"] == 1.0


def test_sweep_records_failures_in_row() -> None:
    row = evaluate_point(CIRCLE, {"omega": 0.0}, Numerics(grid_points=64, steps=64))
    assert row["verdict"] == "Error"
    assert "problem.omega" in row["error"]
    assert np.isnan(row["cond_i_residual"])


def test_single_point_sweep_matches_closure() -> None:
    numerics = Numerics(grid_points=512, steps=512)
    table = run_sweep(CIRCLE, (SweepAxis("k1", TWO_PI, TWO_PI, 1),), numerics, workers=2)
    assert len(table) == 1
    report = closure_criterion(build_system(CIRCLE), numerics)
    assert table.loc[0, "verdict"] == report.verdict.value == "Closed"
    assert table.loc[0, "cond_i_residual"] == report.cond_i_residual
    assert table.loc[0, "max_cond_ii"] == report.max_cond_ii


def test_cli_classify() -> None:
    assert _run(["classify", "--sig", "3,1", "--vec", "1,0,0"])[:2] == (0, "timelike, pseudo-norm 1\n")
    assert _run(["classify", "--sig", "3,1", "--vec", "1,1,0"])[:2] == (0, "null, pseudo-norm 0\n")
    assert _run(["classify", "--sig", "3,0", "--vec", "0,3,4"])[:2] == (0, "spacelike, pseudo-norm 5\n")
    code, _, err = _run(["classify", "--sig", "3,1", "--vec", "1,x,0"])
    assert code == 2
    assert "--vec[1]" in err
    code, _, err = _run(["classify", "--sig", "3,1", "--vec", "1,0"])
    assert code == 2


def test_cli_closure_exit_codes() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        report_path = Path(tmp) / "report.json"
        cfg = _write_config(tmp, {"problem": CIRCLE})
        code, out, _ = _run(["closure", "--config", str(cfg), "--report", str(report_path)])
        assert code == 0
        assert out.startswith("verdict: Closed")
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert report["verdict"] == "Closed"
        assert report["criterion"]["cond_i_residual"] < 1e-8
        assert max(abs(x) for x in report["criterion"]["cond_ii_residuals"]) < 1e-8
        assert report["oracle"]["curve_gap"] < 1e-8
        assert report["series"]["order_used"] >= 1
        assert report["config"]["numerics"]["grid_points"] == config.GRID_POINTS

        code, _, _ = _run(["closure", "--config", str(EXAMPLES / "helix.json"), "--report", str(report_path)])
        assert code == 1
        helix = json.loads(report_path.read_text(encoding="utf-8"))
        assert helix["verdict"] == "NotClosed"
        assert helix["criterion"]["cond_i_residual"] > 0.01

        bad = _write_config(tmp, {"problem": dict(CIRCLE, signature={"n": 3, "v": 1})})
        code, _, err = _run(["closure", "--config", str(bad), "--report", str(report_path)])
        assert code == 2
        assert "eps: expected 1 negative sign for v=1" in err

    assert _run(["closure"])[0] == 2
    assert _run(["closure", "--no-such-flag"])[0] == 2


def test_cli_reconstruct() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        trace_path = Path(tmp) / "trace.csv"
        cfg = _write_config(tmp, {"problem": CIRCLE})
        code, out, _ = _run(["reconstruct", "--config", str(cfg), "--trace", str(trace_path)])
        assert code == 0
        assert out.startswith("closure gap")
        df = pd.read_csv(trace_path)
        assert list(df.columns) == ["s", "x1", "x2", "x3"]
        assert len(df) == config.STEPS + 1
        assert np.max(np.abs(df.iloc[-1, 1:].to_numpy() - df.iloc[0, 1:].to_numpy())) < 1e-8

        line = dict(CIRCLE, curvatures=[{"constant": 0}, {"constant": 0}], omega=2.0)
        jsonl = Path(tmp) / "line.jsonl"
        cfg = _write_config(tmp, {"problem": line, "numerics": {"steps": 8}})
        code, _, _ = _run(["reconstruct", "--config", str(cfg), "--trace", str(jsonl), "--format", "jsonl", "--frames"])
        assert code == 0
        rows = [json.loads(x) for x in jsonl.read_text(encoding="utf-8").splitlines()]
        assert len(rows) == 9
        assert rows[-1]["x1"] == 2.0 and rows[-1]["f11"] == 1.0 and rows[-1]["f12"] == 0.0


def test_cli_darboux() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "darboux.json"
        base = ["darboux", "--kg", "0", "--kn", "2pi", "--eps", "1", "--omega", "1", "--report", str(path)]
        code, out, _ = _run(base + ["--tg", "0"])
        assert code == 0
        assert "closed: yes, k = 1" in out
        report = json.loads(path.read_text(encoding="utf-8"))
        assert report["closed"] is True and report["k"] == 1

        assert _run(base + ["--tg", "0.3"])[0] == 1

        code, _, _ = _run([
            "darboux", "--kg", "1", "--kn", "2", "--tg", "0.5", "--eps", "1", "--omega", "1", "--report", str(path),
        ])
        assert code == 1
        report = json.loads(path.read_text(encoding="utf-8"))
        closed_form = [report["closed_form"][k] for k in ("m11", "m12", "m13")]
        assert_allclose(closed_form, report["series_engine"]["row1"], atol=1e-8)
        integrals = [report["closed_form_integrals"][k] for k in ("I11", "I12", "I13")]
        assert_allclose(integrals, report["series_engine"]["cond_ii_residuals"], atol=1e-8)

        assert _run(["darboux", "--kg", "x", "--kn", "1", "--tg", "0", "--eps", "1", "--report", str(path)])[0] == 2


def test_cli_darboux_sweep() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        out_path = Path(tmp) / "sweep.csv"
        code, out, _ = _run([
            "sweep", "--config", str(EXAMPLES / "sweep_darboux.json"), "--report", str(out_path),
            "--grid-points", "1024", "--steps", "1024", "--workers", "3",
        ])
        assert code == 0
        table = pd.read_csv(out_path)
        assert len(table) == 11
        closed = table[table["verdict"] == "Closed"]
        assert list(closed.index) == [5]
        assert_allclose(closed["kn"], [TWO_PI], rtol=1e-12)
        assert (table["verdict"] == table["darboux_condition"]).all()
        assert "1 closed" in out


def test_json_writers_map_non_finite_to_null() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        path = write_json(Path(tmp) / "r.json", {
            "tail_bound": float("inf"),
            "values": np.array([1.0, np.nan]),
            "order": np.int64(3),
            "converged": np.bool_(False),
        })
        data = _strict_loads(path.read_text(encoding="utf-8"))
    assert data == {"tail_bound": None, "values": [1.0, None], "order": 3, "converged": False}


def test_cli_sweep_jsonl_with_failed_point() -> None:
    job = {"problem": CIRCLE, "sweep": {"axes": {"omega": {"start": 0, "stop": 1, "num": 2}}}}
    with tempfile.TemporaryDirectory() as tmp:
        cfg = _write_config(tmp, job)
        out_path = Path(tmp) / "sweep.jsonl"
        code, out, _ = _run([
            "sweep", "--config", str(cfg), "--report", str(out_path), "--format", "jsonl",
            "--grid-points", "256", "--steps", "256", "--workers", "2",
        ])
        assert code == 0
        assert "1 failed" in out
        rows = [_strict_loads(line) for line in out_path.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 2
    failed, ok = rows
    assert failed["omega"] == 0.0 and failed["verdict"] == "Error"
    assert failed["cond_i_residual"] is None and failed["converged"] is None
    assert "problem.omega" in failed["error"]
    assert ok["omega"] == 1.0 and ok["verdict"] != "Error"
    assert ok["converged"] is True and ok["error"] is None


def test_cli_report_config_reproduces_residuals() -> None:
    profile = {
        "kind": "frenet",
        "signature": {"n": 4, "v": 1},
        "eps": [1, -1, 1, 1],
        "omega": 1.5,
        "curvatures": [
            {"samples": [0.5, 1.0, 0.25, 0.75]},
            {"fourier": {"a0": 0.3, "a": [0.2], "b": [0.1]}},
            {"constant": "pi"},
        ],
    }
    with tempfile.TemporaryDirectory() as tmp:
        first, second = Path(tmp) / "first.json", Path(tmp) / "second.json"
        cfg = _write_config(tmp, {"problem": profile})
        code, _, _ = _run(["closure", "--config", str(cfg), "--report", str(first), "--grid-points", "256", "--steps", "256"])
        report = json.loads(first.read_text(encoding="utf-8"))
        echoed = Path(tmp) / "echoed.json"
        echoed.write_text(json.dumps(report["config"]), encoding="utf-8")
        code_again, _, _ = _run(["closure", "--config", str(echoed), "--report", str(second)])
        again = json.loads(second.read_text(encoding="utf-8"))
    assert code == code_again == 1
    assert again["config"]["problem"] == report["config"]["problem"]
    assert again["config"]["numerics"] == report["config"]["numerics"]
    for section in ("criterion", "series", "oracle"):
        assert again[section] == report[section], section
    assert again["verdict"] == report["verdict"]


def test_cli_classify_negative_coordinates() -> None:
    assert _run(["classify", "--sig", "3,1", "--vec", "-1,0,0"])[:2] == (0, "timelike, pseudo-norm 1\n")
    assert _run(["classify", "--sig", "3,1", "--vec=-1,0,0"])[:2] == (0, "timelike, pseudo-norm 1\n")
    assert _run(["classify", "--vec", "-0.5*pi,0,0", "--sig", "3,0"])[:2] == (0, "spacelike, pseudo-norm 1.5707963267948966\n")
    assert _attach_values(["classify", "--vec", "-1,2", "--sig", "2,1"]) == ["classify", "--vec=-1,2", "--sig", "2,1"]
    assert _attach_values(["closure", "--steps", "8"]) == ["closure", "--steps", "8"]
    assert _attach_values(["classify", "--vec", "--sig", "2,1"]) == ["classify", "--vec", "--sig", "2,1"]


def test_unconverged_series_is_flagged() -> None:
    numerics = Numerics(grid_points=64, steps=64, max_order=3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = closure_criterion(build_system(CIRCLE), numerics)
        row = evaluate_point(CIRCLE, {"k1": TWO_PI}, numerics)
    assert not report.series.converged
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        print_closure(report)
    first = out.getvalue().splitlines()[0]
    assert first.startswith("verdict: NotClosed")
    assert "series not converged" in first
    assert row["converged"] is False and row["verdict"] == "NotClosed"
    assert evaluate_point(CIRCLE, {"k1": TWO_PI}, Numerics(grid_points=256, steps=256))["converged"] is True
