"""Command-line front end.

Commands: ``verify-boundary``, ``verify-series``, ``surface-report``,
``export-mesh``.  Exit status is 0 on success, 1 when a verification fails
and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import boundary, catalog, geometry, jets
from . import series_verify as sv
from .catalog import BoundaryLocus, CatalogSurface
from .errors import DegenerateChartError, OutsideChartError
from .weierstrass import Chart, from_gauss_map

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
COMMANDS = ("verify-boundary", "verify-series", "surface-report", "export-mesh")
FORMATS = ("json", "csv", "obj")

DEFAULT_TOLERANCES = {
    "sphere": 1e-10,    # | |U|^2 - 1 |
    "angle": 1e-9,      # angle between U and U_u, radians
    "torsion": 1e-8,
    "circle": 1e-8,     # rms plane and radius residuals of the fit
    "series": sv.CONSISTENT_TOL,
    "detect": 1e-4,     # a perturbed instance must exceed this somewhere
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    surface: str | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    count: int = 50
    grid: int = 10
    out: Path = Path("wlab-out")
    formats: tuple = ("json",)
    seed: int = 0
    batch: str | None = None
    data: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for k, v in self.tolerances.items():
            if not (v > 0 and math.isfinite(v)):
                raise UsageError(f"tolerance {k} must be positive")
        if self.command in ("verify-boundary", "export-mesh") and self.count < boundary.MIN_SAMPLES:
            raise UsageError(f"--count must be at least {boundary.MIN_SAMPLES}")
        if self.grid < 2:
            raise UsageError("--grid must be at least 2")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise UsageError(f"unknown format(s): {', '.join(sorted(bad))}")


# ---------------------------------------------------------------------------
# config file and Weierstrass chart files
# ---------------------------------------------------------------------------
def read_key_values(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


_FUNCS = {name: getattr(jets, name) for name in ("exp", "log", "sqrt", "sin", "cos", "sinh", "cosh")}
_CONSTS = {"pi": math.pi, "e": math.e, "i": 1j}


def compile_expression(text: str):
    """Compile an expression in ``w`` into a function usable on jets.

    Only numbers, ``w``, ``pi``, ``e``, ``i``, the operators ``+ - * / **`` and
    the functions exp, log, sqrt, sin, cos, sinh, cosh are accepted.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"bad expression {text!r}: {exc.msg}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            val = node.value
            return lambda w: val
        if isinstance(node, ast.Name):
            if node.id == "w":
                return lambda w: w
            if node.id in _CONSTS:
                val = _CONSTS[node.id]
                return lambda w: val
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            f = build(node.operand)
            return (lambda w: -f(w)) if isinstance(node.op, ast.USub) else f
        if isinstance(node, ast.BinOp):
            a, b = build(node.left), build(node.right)
            op = type(node.op)
            if op is ast.Add:
                return lambda w: a(w) + b(w)
            if op is ast.Sub:
                return lambda w: a(w) - b(w)
            if op is ast.Mult:
                return lambda w: a(w) * b(w)
            if op is ast.Div:
                return lambda w: a(w) / b(w)
            if op is ast.Pow:
                return lambda w: _power(a(w), b(w))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            fn, arg = _FUNCS[node.func.id], build(node.args[0])
            return lambda w: fn(arg(w))
        raise UsageError(f"unsupported construct in expression {text!r}: {ast.dump(node)[:40]}")

    return build(tree)


def _power(base, p):
    if isinstance(p, jets.ComplexJet):
        return jets.exp(jets.log(base) * p) if isinstance(base, jets.ComplexJet) else jets.exp(p * np.log(base))
    if isinstance(p, float) and p.is_integer():
        p = int(p)
    return base**p


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected numbers, got {text!r}") from None


def load_chart_file(path) -> CatalogSurface:
    """Build a chart from a key-value file.

    Keys: ``g`` (expression in ``w``), ``theta0``, ``half_u``, ``half_v``,
    ``center`` (two numbers), ``base_point`` (two numbers), ``base_position``
    (three numbers), optional ``boundary_u`` (list) with ``boundary_v`` (two numbers).
    """
    kv = read_key_values(path)
    if "g" not in kv:
        raise UsageError(f"{path}: missing key 'g'")
    try:
        g = compile_expression(kv["g"])
        center = complex(*_floats(kv.get("center", "0 0")))
        chart = Chart(float(kv.get("half_u", 0.5)), float(kv.get("half_v", 0.5)), center)
        base = complex(*_floats(kv.get("base_point", f"{center.real} {center.imag}")))
        pos = _floats(kv.get("base_position", "0 0 0"))
        data = from_gauss_map(jets.Holomorphic.from_expression(g, kv["g"]), float(kv.get("theta0", 0.0)),
                              chart, base_point=base, base_position=pos, label=Path(path).stem)
    except (TypeError, ValueError, DegenerateChartError, OutsideChartError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    vr = tuple(_floats(kv.get("boundary_v", f"{-chart.half_v} {chart.half_v}")))
    curves = [BoundaryLocus(u, vr, closed=False) for u in _floats(kv.get("boundary_u", ""))]
    hu, hv = chart.half_u * 0.999, chart.half_v * 0.999
    return CatalogSurface(
        name=Path(path).stem, domain=chart, boundary_curves=curves, constants={},
        mesh_domain=(center.real - hu, center.real + hu, center.imag - hv, center.imag + hv),
        weierstrass=data, description=f"g = {kv['g']}",
    )


def resolve_surface(name: str | None) -> CatalogSurface:
    if not name:
        raise UsageError("--surface is required")
    if name in catalog.SURFACES:
        return catalog.get_surface(name)
    if Path(name).is_file():
        return load_chart_file(name)
    raise UsageError(f"unknown surface {name!r}; known: {', '.join(catalog.SURFACES)} or a chart file")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits and NaN/inf as null."""

    def enc(o, indent=0):
        pad = "  " * (indent + 1)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, indent + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
        if isinstance(o, list):
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(enc(v) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, indent + 1) for v in o) + "\n" + "  " * indent + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return format(o, ".17g") if math.isfinite(o) else "null"
        return json.dumps(o)

    return enc(_clean(obj)) + "\n"


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _stats(a) -> dict:
    a = np.abs(np.asarray(a, dtype=float))
    finite = a[np.isfinite(a)]
    if finite.size == 0:
        return {"max": None, "mean": None, "undefined": int(a.size)}
    return {"max": float(finite.max()), "mean": float(finite.mean()), "undefined": int(a.size - finite.size)}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def verify_boundary(cfg: RunConfig, log=print) -> int:
    surface = resolve_surface(cfg.surface)
    if not surface.boundary_curves:
        raise UsageError(f"{surface.name}: no declared boundary on sphere")
    tol = cfg.tolerances
    ok_all = True
    for k, locus in enumerate(surface.boundary_curves):
        smp = boundary.sample_curve(surface, locus.u, locus.v_range, cfg.count, endpoint=not locus.closed)
        fit = boundary.fit_circle(smp.points)
        checks = {
            "sphere": _stats(smp.sphere_residuals)["max"] < tol["sphere"],
            "angle": _stats(smp.orth_residuals)["max"] < tol["angle"],
            "torsion": (_stats(smp.torsions)["max"] or 0.0) < tol["torsion"],
            "circle": max(fit.rms_plane_residual, fit.rms_radius_residual) < tol["circle"],
        }
        ok = all(checks.values())
        ok_all &= ok
        report = {
            "surface": surface.name, "boundary": k, "u": locus.u, "v_range": list(locus.v_range),
            "samples": cfg.count,
            "sphere_residual": _stats(smp.sphere_residuals),
            "orthogonality_angle": _stats(smp.orth_residuals),
            "torsion": _stats(smp.torsions),
            "circle_fit": fit.to_dict(),
            "tolerances": {k2: tol[k2] for k2 in checks},
            "checks": checks, "passed": ok,
        }
        stem = cfg.out / f"{surface.name}-boundary{k}"
        if "json" in cfg.formats:
            _write(stem.with_suffix(".json"), dumps(report))
        if "csv" in cfg.formats:
            cfg.out.mkdir(parents=True, exist_ok=True)
            smp.write_csv(stem.with_suffix(".csv"))
        log(f"{surface.name} boundary {k}: {'PASS' if ok else 'FAIL'} radius={fit.radius:.17g}")
    return EXIT_OK if ok_all else EXIT_FAILED


def _load_series_data(path) -> list[sv.BoundaryJetData]:
    try:
        raw = json.loads(Path(path).read_text())
        items = raw if isinstance(raw, list) else raw.get("instances", [raw])
        return [sv.BoundaryJetData.from_dict(d) for d in items]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"malformed data file {path}: {exc}") from None


def verify_series(cfg: RunConfig, log=print) -> int:
    tol = cfg.tolerances
    rng = np.random.default_rng(cfg.seed)
    groups = []
    if cfg.data is not None:
        groups.append(("explicit", _load_series_data(cfg.data), True))
    else:
        kind = cfg.batch or "both"
        if kind not in ("random-consistent", "random-perturbed", "both"):
            raise UsageError(f"unknown --batch {kind!r}")
        n = cfg.count
        if kind in ("random-consistent", "both"):
            groups.append(("consistent", [sv.consistent_instance(rng, ("R>1", "R<1")[i % 2]) for i in range(n)], True))
        if kind in ("random-perturbed", "both"):
            groups.append(("perturbed", [sv.perturbed_instance(rng, branch=("R>1", "R<1")[i % 2]) for i in range(n)], False))
    ok_all = True
    report = {"seed": cfg.seed, "tolerance": tol["series"], "detect_threshold": tol["detect"], "groups": {}}
    for name, items, expect_pass in groups:
        verdicts = sv.verify_batch(items, tol["series"])
        rows = [v.to_dict() for v in verdicts]
        if expect_pass:
            good = [v.consistent and _torsion_small(v) for v in verdicts]
        else:
            good = [(not v.consistent) and v.max_relation_residual > tol["detect"] for v in verdicts]
        ok_all &= all(good)
        report["groups"][name] = {
            "expected": "pass" if expect_pass else "fail",
            "count": len(rows), "as_expected": int(sum(good)), "verdicts": rows,
        }
        log(f"{name}: {sum(good)}/{len(rows)} as expected")
    report["passed"] = ok_all
    if "json" in cfg.formats:
        _write(cfg.out / "series-verdicts.json", dumps(report))
    return EXIT_OK if ok_all else EXIT_FAILED


def _torsion_small(v) -> bool:
    try:
        return abs(sv.torsion_at_P(v)) < 1e-12
    except Exception:
        return False


def _grid_points(surface: CatalogSurface, n: int):
    u0, u1, v0, v1 = surface.mesh_domain
    us, vs = np.linspace(u0, u1, n), np.linspace(v0, v1, n)
    return [[complex(u, v) for u in us] for v in vs]


def surface_report(cfg: RunConfig, log=print) -> int:
    surface = resolve_surface(cfg.surface)
    grid = _grid_points(surface, cfg.grid)
    flat = [w for row in grid for w in row]
    pts = [surface.point(w) for w in flat]
    umb = geometry.detect_umbilics(surface, flat)
    report = {
        "surface": surface.name, "description": surface.description, "constants": surface.constants,
        "grid": cfg.grid,
        "max_abs_mean_curvature": max(abs(p.H) for p in pts),
        "gauss_curvature": {"min": min(p.K for p in pts), "max": max(p.K for p in pts)},
        "umbilics": {"count": sum(r.is_umbilic for r in umb), "threshold": umb[0].threshold,
                     "note": next((r.note for r in umb if r.note), "")},
        "boundaries": [{"u": b.u, "v_range": list(b.v_range)} for b in surface.boundary_curves],
        "points": [p.to_dict() for p in pts],
    }
    _write(cfg.out / f"{surface.name}-report.json", dumps(report))
    log(f"{surface.name}: {len(pts)} points, max|H|={report['max_abs_mean_curvature']:.3g}")
    return EXIT_OK


def mesh(surface: CatalogSurface, n: int) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Vertices of an ``n x n`` parameter grid and its 2 (n-1)^2 triangles (0-based)."""
    if n < 2:
        raise ValueError("degenerate grid")
    grid = _grid_points(surface, n)
    verts = np.array([surface.parameterization(w) for row in grid for w in row])
    faces = []
    for j in range(n - 1):
        for i in range(n - 1):
            a = j * n + i
            b, c, d = a + 1, a + n, a + n + 1
            faces += [(a, b, d), (a, d, c)]
    if not np.all(np.isfinite(verts)):
        raise ValueError("non-finite vertex")
    return verts, faces


def write_obj(path: Path, verts, faces):
    lines = [f"# {len(verts)} vertices, {len(faces)} faces"]
    lines += ["v " + " ".join(format(float(x), ".17g") for x in v) for v in verts]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in faces]
    _write(path, "\n".join(lines) + "\n")


def read_obj(path) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append(tuple(int(x.split("/")[0]) - 1 for x in parts[1:4]))
    return np.array(verts), faces


def export_mesh(cfg: RunConfig, log=print) -> int:
    surface = resolve_surface(cfg.surface)
    try:
        verts, faces = mesh(surface, cfg.grid)
    except (ValueError, OutsideChartError) as exc:
        raise UsageError(f"{surface.name}: {exc}") from None
    formats = set(cfg.formats)
    if formats == {"json"}:     # default format: mesh plus boundary polylines
        formats = {"obj", "csv"}
    if "obj" in formats:
        write_obj(cfg.out / f"{surface.name}.obj", verts, faces)
    if "csv" in formats:
        for k, locus in enumerate(surface.boundary_curves):
            smp = boundary.sample_curve(surface, locus.u, locus.v_range, cfg.count)
            cfg.out.mkdir(parents=True, exist_ok=True)
            smp.write_csv(cfg.out / f"{surface.name}-boundary{k}.csv")
    log(f"{surface.name}: {len(verts)} vertices, {len(faces)} faces")
    return EXIT_OK


HANDLERS = {
    "verify-boundary": verify_boundary,
    "verify-series": verify_series,
    "surface-report": surface_report,
    "export-mesh": export_mesh,
}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wlab", description="Free boundary minimal surface checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="flat 'key = value' file; flags override it")
    p.add_argument("--surface", help="catalog name or Weierstrass chart file")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", help="comma-separated subset of json,csv,obj")
    p.add_argument("--count", type=int, help="boundary samples or batch size")
    p.add_argument("--grid", type=int, help="grid side for meshes and reports")
    p.add_argument("--seed", type=int)
    p.add_argument("--batch", help="random-consistent, random-perturbed or both")
    p.add_argument("--data", type=Path, help="JSON file of boundary jet data")
    return p


def _parse_tolerances(extra: list[str]) -> dict:
    tols = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--tol."):
            raise UsageError(f"unrecognized argument {tok!r}")
        key, _, val = tok[len("--tol."):].partition("=")
        if not val:
            val = next(it, None)
            if val is None:
                raise UsageError(f"{tok} needs a value")
        if key not in DEFAULT_TOLERANCES:
            raise UsageError(f"unknown tolerance {key!r}; known: {', '.join(DEFAULT_TOLERANCES)}")
        try:
            tols[key] = float(val)
        except ValueError:
            raise UsageError(f"{tok}: not a number: {val!r}") from None
    return tols


def make_config(argv: list[str]) -> RunConfig:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    settings: dict = {}
    tols = dict(DEFAULT_TOLERANCES)
    if args.config is not None:
        try:
            kv = read_key_values(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
        for k, v in kv.items():
            if k.startswith("tol."):
                tols.update(_parse_tolerances([f"--{k}={v}"]))
            else:
                settings[k] = v
    tols.update(_parse_tolerances(extra))
    for k in ("surface", "out", "format", "count", "grid", "seed", "batch", "data"):
        v = getattr(args, k)
        if v is not None:
            settings[k] = v
    unknown = set(settings) - {"surface", "out", "format", "count", "grid", "seed", "batch", "data"}
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    try:
        return RunConfig(
            command=args.command,
            surface=settings.get("surface"),
            tolerances=tols,
            count=int(settings.get("count", 100 if args.command == "verify-series" else 50)),
            grid=int(settings.get("grid", 10)),
            out=Path(settings.get("out", "wlab-out")),
            formats=tuple(f.strip() for f in str(settings.get("format", "json")).split(",") if f.strip()),
            seed=int(settings.get("seed", 0)),
            batch=settings.get("batch"),
            data=Path(settings["data"]) if "data" in settings else None,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = make_config(argv)
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"wlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:   # argparse
        return EXIT_USAGE if exc.code else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
