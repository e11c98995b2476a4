"""Command-line front end: exit codes, report files and mesh export."""
import json

import numpy as np
import pytest

from wlab import cli, catalog


def run(*args):
    return cli.main(list(args))


def test_verify_boundary_catenoid(tmp_path):
    assert run("verify-boundary", "--surface", "critical-catenoid", "--out", str(tmp_path),
               "--format", "json,csv") == 0
    reports = sorted(tmp_path.glob("*.json"))
    assert len(reports) == 2
    t0, c = catalog.critical_catenoid_constants()
    for r in reports:
        data = json.loads(r.read_text())
        assert data["passed"]
        assert abs(data["circle_fit"]["radius"] - c * np.cosh(t0)) < 1e-10
    assert len(list(tmp_path.glob("*.csv"))) == 2


def test_verify_boundary_disk(tmp_path):
    assert run("verify-boundary", "--surface", "equatorial-disk", "--out", str(tmp_path)) == 0
    (report,) = tmp_path.glob("*.json")
    assert abs(json.loads(report.read_text())["circle_fit"]["radius"] - 1) < 1e-12


def test_enneper_has_no_boundary(tmp_path, capsys):
    assert run("verify-boundary", "--surface", "enneper", "--out", str(tmp_path)) == 2
    assert "no declared boundary" in capsys.readouterr().err


def test_tight_tolerance_fails_verification(tmp_path):
    assert run("verify-boundary", "--surface", "critical-catenoid", "--out", str(tmp_path),
               "--tol.circle", "1e-30") == 1


@pytest.mark.parametrize("args", [
    ["verify-boundary", "--surface", "nope"],
    ["verify-boundary", "--surface", "critical-catenoid", "--count", "3"],
    ["verify-boundary", "--surface", "critical-catenoid", "--tol.sphere=-1"],
    ["verify-boundary", "--surface", "critical-catenoid", "--tol.bogus=1"],
    ["verify-boundary", "--surface", "critical-catenoid", "--format", "png"],
    ["frobnicate"],
    [],
])
def test_usage_errors(tmp_path, args):
    assert run(*args, "--out", str(tmp_path)) == 2


def test_verify_series_batches(tmp_path):
    assert run("verify-series", "--count", "20", "--out", str(tmp_path)) == 0
    rep = json.loads((tmp_path / "series-verdicts.json").read_text())
    assert rep["groups"]["consistent"]["as_expected"] == 20
    assert rep["groups"]["perturbed"]["as_expected"] == 20


def test_verify_series_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("verify-series", "--count", "5", "--seed", "7", "--out", str(out)) == 0
    assert (a / "series-verdicts.json").read_text() == (b / "series-verdicts.json").read_text()


def test_verify_series_explicit_data(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"R": 2.0, "a1": [np.sqrt(25 / 3), 0], "a2": [25 / 12, 0], "a3": 0.5}))
    assert run("verify-series", "--data", str(good), "--out", str(tmp_path)) == 0
    twisted = tmp_path / "twisted.json"
    twisted.write_text(json.dumps([{"R": 2.0, "a1": [np.sqrt(25 / 24), 0], "a2": [-5 / 6, 0.05], "a3": 0.1}]))
    assert run("verify-series", "--data", str(twisted), "--out", str(tmp_path)) == 1


@pytest.mark.parametrize("text", ['{"R": 1, "a1": 1, "a2": 0, "a3": 0}', "not json", '{"R": 2}'])
def test_verify_series_rejects_bad_data(tmp_path, text):
    path = tmp_path / "d.json"
    path.write_text(text)
    assert run("verify-series", "--data", str(path), "--out", str(tmp_path)) == 2


def test_export_mesh(tmp_path):
    assert run("export-mesh", "--surface", "critical-catenoid", "--out", str(tmp_path)) == 0
    obj = tmp_path / "critical-catenoid.obj"
    verts, faces = cli.read_obj(obj)
    assert len(verts) == 100 and len(faces) == 162
    assert np.all(np.linalg.norm(verts, axis=1) <= 1 + 1e-9)
    assert min(min(f) for f in faces) == 0 and max(max(f) for f in faces) == 99
    assert len(list(tmp_path.glob("*boundary*.csv"))) == 2


def test_obj_round_trip_is_bit_exact(tmp_path):
    s = catalog.critical_catenoid()
    verts, faces = cli.mesh(s, 7)
    cli.write_obj(tmp_path / "m.obj", verts, faces)
    back, fback = cli.read_obj(tmp_path / "m.obj")
    assert np.array_equal(back, verts) and fback == faces


def test_mesh_rejects_degenerate_grid():
    with pytest.raises(ValueError):
        cli.mesh(catalog.equatorial_disk(), 1)


def test_surface_report(tmp_path):
    assert run("surface-report", "--surface", "equatorial-disk", "--grid", "4", "--out", str(tmp_path)) == 0
    rep = json.loads((tmp_path / "equatorial-disk-report.json").read_text())
    assert rep["umbilics"]["count"] == 16
    assert rep["umbilics"]["note"]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test\nsurface = critical-catenoid\ncount = 12\ntol.sphere = 1e-11\n")
    c = cli.make_config(["verify-boundary", "--config", str(cfg), "--count", "20"])
    assert c.surface == "critical-catenoid" and c.count == 20
    assert c.tolerances["sphere"] == 1e-11
    cfg.write_text("colour = blue\n")
    with pytest.raises(cli.UsageError):
        cli.make_config(["verify-boundary", "--config", str(cfg)])


def test_weierstrass_chart_file(tmp_path):
    chart = tmp_path / "cat.chart"
    t0, c = catalog.critical_catenoid_constants()
    k = float(np.sqrt(c))
    chart.write_text(
        f"g = exp(w / {k!r})\nhalf_u = {k * 1.3!r}\nhalf_v = 1.5\n"
        f"base_position = {-k * k!r}, 0, 0\nboundary_u = {k * t0!r}\nboundary_v = -1.4, 1.4\n")
    assert run("verify-boundary", "--surface", str(chart), "--out", str(tmp_path)) == 0


@pytest.mark.parametrize("expr, w, expected", [
    ("w**2 + 3*w - 1", 0.5, 0.75),
    ("exp(i*pi*w)", 1.0, -1.0),
    ("2**w", 3.0, 8.0),
    ("-sinh(w) + cosh(w)", 0.3, np.exp(-0.3)),
])
def test_expression_compiler(expr, w, expected):
    assert abs(cli.compile_expression(expr)(w) - expected) < 1e-14


@pytest.mark.parametrize("expr", ["__import__('os')", "w.real", "lambda: 1", "exp(w, 2)", "w +"])
def test_expression_compiler_rejects(expr):
    with pytest.raises(cli.UsageError):
        cli.compile_expression(expr)


def test_json_writer_digits_and_nan():
    text = cli.dumps({"x": 0.1, "y": float("nan"), "z": [np.float64(1 / 3)]})
    data = json.loads(text)
    assert data["y"] is None and data["z"][0] == 1 / 3
    assert "0.10000000000000001" in text
