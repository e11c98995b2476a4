"""Boundary-curve analysis: Frenet data, free-boundary residuals, circle fits."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateCurveError, OutsideChartError
from .weierstrass import SurfacePoint

MIN_SAMPLES = 4
TORSION_DEGENERATE = 1e-12
TANGENT_TOL = 1e-9

CSV_COLUMNS = ("v", "X", "Y", "Z", "sphere_residual", "orth_residual", "torsion")


def _angle_between_lines(a, b) -> float:
    # atan2 form stays accurate near 0
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), abs(a @ b)))


def _torsion(d1, d2, d3) -> float:
    c = np.cross(d1, d2)
    nc = np.linalg.norm(c)
    if nc <= TORSION_DEGENERATE * np.linalg.norm(d1) ** 3:
        raise DegenerateCurveError("curvature vanishes: torsion undefined")
    return float(np.dot(c, d3) / nc**2)


@dataclass(frozen=True, eq=False)
class BoundaryCurveSample:
    """Samples of the chart curve ``w = u + i v`` with derivatives in ``v``."""

    params: np.ndarray
    points: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    conormals: np.ndarray
    sphere_residuals: np.ndarray
    orth_residuals: np.ndarray
    torsions: np.ndarray
    u: float = 0.0

    def __post_init__(self):
        n = len(self.params)
        if n < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples")
        for name in ("points", "d1", "d2", "d3", "sphere_residuals", "orth_residuals", "torsions"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has wrong length")
        if np.any(np.diff(self.params) <= 0):
            raise ValueError("params must be strictly increasing")

    def __len__(self):
        return len(self.params)

    def rows(self):
        for k in range(len(self)):
            yield (self.params[k], *self.points[k], self.sphere_residuals[k],
                   self.orth_residuals[k], self.torsions[k])

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "params": self.params.tolist(),
            "points": self.points.tolist(),
            "d1": self.d1.tolist(), "d2": self.d2.tolist(), "d3": self.d3.tolist(),
            "sphere_residuals": self.sphere_residuals.tolist(),
            "orth_residuals": self.orth_residuals.tolist(),
            "torsions": self.torsions.tolist(),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for row in self.rows():
                w.writerow([format(float(x), ".17g") for x in row])


def sample_curve(surface, u: float, v_range: Sequence[float], count: int,
                 endpoint: bool = True) -> BoundaryCurveSample:
    """Sample ``w = u + i v`` with exact v-derivatives from the surface's derivative table."""
    if count < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {count}")
    vs = np.linspace(v_range[0], v_range[1], count, endpoint=endpoint)
    ws = u + 1j * vs
    if not surface.contains(ws):
        raise OutsideChartError("boundary segment leaves the chart")
    pts, d1, d2, d3, con, sph, orth, tau = ([] for _ in range(8))
    for w in ws:
        d = surface.derivatives(w, 3)
        U = d[(0, 0)]
        pts.append(U)
        d1.append(d[(0, 1)])
        d2.append(d[(0, 2)])
        d3.append(d[(0, 3)])
        con.append(d[(1, 0)])
        sph.append(U @ U - 1.0)
        orth.append(_angle_between_lines(U, d[(1, 0)]))
        try:
            tau.append(_torsion(d[(0, 1)], d[(0, 2)], d[(0, 3)]))
        except DegenerateCurveError:
            tau.append(np.nan)
    a = np.asarray
    return BoundaryCurveSample(a(vs), a(pts), a(d1), a(d2), a(d3), a(con), a(sph), a(orth), a(tau), u=float(u))


def sample_boundary(data, v_range: Sequence[float], count: int, u: float = 0.0) -> BoundaryCurveSample:
    """Boundary samples along ``w = u + i v`` (``u = 0`` is the normalized position)."""
    return sample_curve(data, u, v_range, count)


def torsion(sample: BoundaryCurveSample, index: int) -> float:
    """``det(d1, d2, d3) / |d1 x d2|^2`` at one sample."""
    return _torsion(sample.d1[index], sample.d2[index], sample.d3[index])


class FreeBoundaryResidual(NamedTuple):
    sphere: float
    angle: float

    def holds(self, sphere_tol: float = 1e-10, angle_tol: float = 1e-9) -> bool:
        return self.sphere < sphere_tol and self.angle < angle_tol


def free_boundary_residual(point: SurfacePoint) -> FreeBoundaryResidual:
    """``(| |U|^2 - 1 |, angle between U and the conormal U_u)``.

    Both vanish exactly when the point lies on the unit sphere and the
    surface meets the sphere orthogonally there.
    """
    if np.linalg.norm(point.U_u) == 0:
        raise ValueError("U_u vanishes")
    U = point.U
    return FreeBoundaryResidual(float(abs(U @ U - 1.0)), _angle_between_lines(U, point.U_u))


def principal_direction_check(point: SurfacePoint, tangent) -> float:
    """Normalized off-diagonal second fundamental form ``|II(t, t_perp)| / max|kappa|``.

    Zero iff ``tangent`` is a principal direction; a 45-degree direction at a
    non-umbilic point of a minimal surface gives 1.
    """
    t = np.asarray(tangent, dtype=float)
    nt = np.linalg.norm(t)
    if abs(t @ point.n) > TANGENT_TOL * nt:
        raise ValueError("vector is not tangent to the surface")
    c = np.cross(point.n, t)
    kmax = max(abs(point.kappa1), abs(point.kappa2))
    if kmax == 0:
        return 0.0
    a, b = point.chart_components(t), point.chart_components(c)
    return float(abs(point.second_form(a, b)) / (nt * np.linalg.norm(c) * kmax))


# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CircleFit:
    center: np.ndarray
    radius: float
    plane_normal: np.ndarray
    rms_plane_residual: float
    rms_radius_residual: float

    def to_dict(self) -> dict:
        return {
            "center": list(map(float, self.center)),
            "radius": self.radius,
            "plane_normal": list(map(float, self.plane_normal)),
            "rms_plane_residual": self.rms_plane_residual,
            "rms_radius_residual": self.rms_radius_residual,
        }


def fit_circle(points) -> CircleFit:
    """Plane by principal axes, then algebraic circle fit ``x^2 + y^2 = 2ax + 2by + c`` in-plane.

    The normal is oriented so the points run counter-clockwise around it.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < MIN_SAMPLES:
        raise ValueError("need an (n, 3) array with n >= 4")
    centroid = P.mean(axis=0)
    Q = P - centroid
    _, s, vt = np.linalg.svd(Q, full_matrices=False)
    if s[1] <= 1e-12 * max(s[0], 1e-300):
        raise ValueError("points are collinear or coincident")
    e1, e2, normal = vt[0], vt[1], vt[2]
    x, y = Q @ e1, Q @ e2
    A = np.column_stack([2 * x, 2 * y, np.ones_like(x)])
    (a, b, c), *_ = np.linalg.lstsq(A, x * x + y * y, rcond=None)
    radius = float(np.sqrt(c + a * a + b * b))
    center = centroid + a * e1 + b * e2
    rel = P - center
    winding = np.sum(np.cross(rel, np.roll(rel, -1, axis=0)) @ normal)
    if winding < 0:
        normal = -normal
    plane_res = rel @ normal
    radial = np.hypot(x - a, y - b) - radius
    return CircleFit(
        center=center, radius=radius, plane_normal=normal / np.linalg.norm(normal),
        rms_plane_residual=float(np.sqrt(np.mean(plane_res**2))),
        rms_radius_residual=float(np.sqrt(np.mean(radial**2))),
    )
