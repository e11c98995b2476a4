"""Pointwise and along-curve differential geometry on sampled surfaces.

Surfaces are any objects with ``contains(w)``, ``derivatives(w, order)`` and
``point(w)`` (Weierstrass charts and catalog surfaces both qualify).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import integrate, optimize
from scipy.spatial.transform import Rotation

from .errors import OutsideChartError, PatchError
from .weierstrass import SurfacePoint, stereographic

CODAZZI_RTOL = 1e-6
NON_DISCRETE = "non-discrete (flat?)"


# ---------------------------------------------------------------------------
# umbilics
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class UmbilicReport:
    w: complex
    kappa_gap: float
    is_umbilic: bool
    threshold: float
    note: str = ""


def detect_umbilics(surface, grid: Iterable[complex], threshold: float | None = None,
                    density_bound: float = 0.5) -> list[UmbilicReport]:
    """Scan ``grid`` for points with ``|kappa1 - kappa2| < threshold``.

    Without an explicit threshold, ``1e-8 * median|kappa1|`` over the grid is
    used (``1e-8`` when the surface is flat). If more than ``density_bound``
    of the grid is umbilic, those reports carry the note ``NON_DISCRETE``.
    """
    pts = [complex(w) for w in np.ravel(np.asarray(grid if isinstance(grid, np.ndarray) else list(grid), dtype=complex))]
    sp = [surface.point(w) for w in pts]
    gaps = np.array([abs(p.kappa2 - p.kappa1) for p in sp])
    if threshold is None:
        scale = float(np.median([abs(p.kappa1) for p in sp]))
        threshold = 1e-8 * (scale if scale > 0 else 1.0)
    flags = gaps < threshold
    note = NON_DISCRETE if flags.mean() > density_bound else ""
    return [UmbilicReport(w, float(gap), bool(f), threshold, note if f else "")
            for w, gap, f in zip(pts, gaps, flags)]


# ---------------------------------------------------------------------------
# principal patches
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class PrincipalCoordinatePatch:
    """A patch with diagonal forms ``I = E dx^2 + G dy^2``, ``II = kx E dx^2 + ky G dy^2``.

    ``kx`` and ``ky`` are the principal curvatures along x- and y-lines.  The
    rectangle is ``|x - x0| <= x_half``, ``|y - y0| <= y_half``.
    """

    E: Callable[[float, float], float]
    G: Callable[[float, float], float]
    kx: Callable[[float, float], float]
    ky: Callable[[float, float], float]
    x_half: float
    y_half: float
    x0: float = 0.0
    y0: float = 0.0
    position: Callable[[float, float], np.ndarray] | None = None


def principal_patch_from_surface(surface, center: complex, x_half: float, y_half: float,
                                 rtol: float = 1e-9) -> PrincipalCoordinatePatch:
    """Read E, G and principal curvatures off a surface whose chart lines are principal."""
    center = complex(center)

    def forms(x, y):
        p = surface.point(complex(x, y))
        scale = max(p.E, p.G)
        if abs(p.F) > rtol * scale or abs(p.M) > rtol * max(abs(p.L), abs(p.N2), 1e-300):
            raise PatchError(f"chart lines are not principal at {(x, y)}")
        return p

    return PrincipalCoordinatePatch(
        E=lambda x, y: forms(x, y).E,
        G=lambda x, y: forms(x, y).G,
        kx=lambda x, y: (lambda p: p.L / p.E)(forms(x, y)),
        ky=lambda x, y: (lambda p: p.N2 / p.G)(forms(x, y)),
        x_half=x_half, y_half=y_half, x0=center.real, y0=center.imag,
        position=lambda x, y: surface.derivatives(complex(x, y), 0)[(0, 0)],
    )


@dataclass(frozen=True, eq=False)
class PrincipalPatch:
    """Canonical principal coordinates ``(u, v)`` with ``I = lam (du^2 + dv^2)``, ``II = -du^2 + dv^2``."""

    source: PrincipalCoordinatePatch
    sign: float
    u_of_x: Callable[[float], float]
    v_of_y: Callable[[float], float]
    mu: Callable[[float], float]
    nu: Callable[[float], float]
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    delta: float

    def coords(self, u: float, v: float) -> tuple[float, float]:
        s = self.source
        x = optimize.brentq(lambda x: self.u_of_x(x) - u, s.x0 - s.x_half, s.x0 + s.x_half, xtol=1e-15)
        y = optimize.brentq(lambda y: self.v_of_y(y) - v, s.y0 - s.y_half, s.y0 + s.y_half, xtol=1e-15)
        return x, y

    def kappa(self, x, y) -> float:
        return self.sign * self.source.ky(x, y)

    def lambda_field(self, u: float, v: float) -> float:
        return 1.0 / self.kappa(*self.coords(u, v))

    def forms(self, u: float, v: float) -> dict:
        """Fundamental-form coefficients in (u, v) through the chain rule."""
        x, y = self.coords(u, v)
        s = self.source
        mu2, nu2 = self.mu(x) ** 2, self.nu(y) ** 2
        E, G = s.E(x, y), s.G(x, y)
        return {
            "E": E / mu2, "F": 0.0, "G": G / nu2,
            "L": self.sign * s.kx(x, y) * E / mu2, "M": 0.0, "N": self.sign * s.ky(x, y) * G / nu2,
        }

    def form_error(self, u: float, v: float) -> float:
        """Max deviation from ``I = lam(du^2+dv^2)``, ``II = -du^2+dv^2`` (relative for I)."""
        f = self.forms(u, v)
        lam = self.lambda_field(u, v)
        return max(abs(f["E"] - lam) / lam, abs(f["G"] - lam) / lam, abs(f["L"] + 1.0), abs(f["N"] - 1.0))

    def position(self, u: float, v: float) -> np.ndarray:
        if self.source.position is None:
            raise ValueError("source patch has no position map")
        return self.source.position(*self.coords(u, v))


def _relative_spread(vals) -> float:
    vals = np.asarray(vals, dtype=float)
    m = np.max(np.abs(vals))
    return float((vals.max() - vals.min()) / m) if m > 0 else 0.0


def codazzi_spreads(patch: PrincipalCoordinatePatch, samples: int = 9) -> tuple[float, float]:
    """Relative variation of ``ky E`` along y and of ``ky G`` along x."""
    xs = patch.x0 + patch.x_half * np.linspace(-1, 1, samples)
    ys = patch.y0 + patch.y_half * np.linspace(-1, 1, samples)
    se = max(_relative_spread([patch.ky(x, y) * patch.E(x, y) for y in ys]) for x in xs)
    sg = max(_relative_spread([patch.ky(x, y) * patch.G(x, y) for x in xs]) for y in ys)
    return se, sg


def canonical_principal_form(patch: PrincipalCoordinatePatch, samples: int = 9) -> PrincipalPatch:
    """Reparameterize a minimal principal patch by ``u = int mu dx``, ``v = int nu dy``.

    ``mu^2 = kappa E`` and ``nu^2 = kappa G`` with ``kappa`` the (positive)
    curvature of the y-lines; the normal is flipped first if needed.

    Raises
    ------
    PatchError
        If the patch is not minimal (``kx != -ky``), ``kappa`` is not positive,
        or ``kappa E`` depends on y / ``kappa G`` on x beyond ``1e-6`` relative.
    """
    xs = patch.x0 + patch.x_half * np.linspace(-1, 1, samples)
    ys = patch.y0 + patch.y_half * np.linspace(-1, 1, samples)
    ky = np.array([[patch.ky(x, y) for y in ys] for x in xs])
    kx = np.array([[patch.kx(x, y) for y in ys] for x in xs])
    if np.max(np.abs(kx + ky)) > CODAZZI_RTOL * np.max(np.abs(ky)):
        raise PatchError("principal curvatures are not opposite: patch is not minimal")
    sign = 1.0 if ky[samples // 2, samples // 2] > 0 else -1.0
    if np.any(sign * ky <= 0):
        raise PatchError("kappa must be positive on the whole patch")
    se, sg = codazzi_spreads(patch, samples)
    if se > CODAZZI_RTOL or sg > CODAZZI_RTOL:
        raise PatchError(f"kappa E varies with y ({se:.2e}) or kappa G with x ({sg:.2e})")

    mu = lambda x: np.sqrt(sign * patch.ky(x, patch.y0) * patch.E(x, patch.y0))
    nu = lambda y: np.sqrt(sign * patch.ky(patch.x0, y) * patch.G(patch.x0, y))
    u_of_x = lambda x: integrate.quad(mu, patch.x0, x, epsabs=1e-14, epsrel=1e-13)[0]
    v_of_y = lambda y: integrate.quad(nu, patch.y0, y, epsabs=1e-14, epsrel=1e-13)[0]
    u_lo, u_hi = u_of_x(patch.x0 - patch.x_half), u_of_x(patch.x0 + patch.x_half)
    v_lo, v_hi = v_of_y(patch.y0 - patch.y_half), v_of_y(patch.y0 + patch.y_half)
    return PrincipalPatch(
        source=patch, sign=sign, u_of_x=u_of_x, v_of_y=v_of_y, mu=mu, nu=nu,
        u_range=(u_lo, u_hi), v_range=(v_lo, v_hi),
        delta=min(-u_lo, u_hi, -v_lo, v_hi),
    )


# ---------------------------------------------------------------------------
# boundary-point normalization
# ---------------------------------------------------------------------------
def _rotation_between(a, b, fallback_axis) -> np.ndarray:
    """Smallest rotation taking unit ``a`` to unit ``b``."""
    v = np.cross(a, b)
    c = float(a @ b)
    s = np.linalg.norm(v)
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        return Rotation.from_rotvec(np.pi * fallback_axis / np.linalg.norm(fallback_axis)).as_matrix()
    return Rotation.from_rotvec(v / s * np.arctan2(s, c)).as_matrix()


def normalize_boundary_point(point: SurfacePoint, tangent=None, radius_tol: float = 1e-9) -> np.ndarray:
    """Rotation taking the boundary tangent to +Y; the normal then lies in the XZ-plane.

    ``tangent`` defaults to ``U_v`` (boundary curves are v-lines).
    """
    if abs(np.linalg.norm(point.U) - 1.0) > radius_tol:
        raise ValueError("point is not on the unit sphere")
    t = point.U_v if tangent is None else np.asarray(tangent, dtype=float)
    nt = np.linalg.norm(t)
    if nt < 1e-14:
        raise ValueError("degenerate boundary tangent")
    return _rotation_between(t / nt, np.array([0.0, 1.0, 0.0]), point.n)


@dataclass(frozen=True)
class BoundaryFrame:
    rotation: np.ndarray
    R: float
    position: np.ndarray
    normal: np.ndarray
    tangent_flipped: bool


def special_position(R: float) -> np.ndarray:
    """``((1 - R^2), 0, 2R) / (1 + R^2)``: the normalized boundary point for Gauss value ``R``."""
    return np.array([1.0 - R * R, 0.0, 2.0 * R]) / (1.0 + R * R)


_HALF_TURN_Y = np.diag([-1.0, 1.0, -1.0])


def boundary_frame(point: SurfacePoint, tangent=None) -> BoundaryFrame:
    """Normalize a boundary point and read off its real Gauss-map value ``R > 0``.

    The normal is the chart orientation ``U_u x U_v`` (for Weierstrass charts
    the one whose stereographic image is ``g``), and the tangent is oriented
    so that ``tangent x position`` is along it.  After the rotation taking the
    tangent to +Y, a half-turn about Y is appended if the point would land
    below the XY-plane.  At a free-boundary point the rotated position is then
    :func:`special_position` of ``R``.  ``R`` is a property of this choice of
    rotation, not of the surface point alone.
    """
    t = point.U_v if tangent is None else np.asarray(tangent, dtype=float)
    n = np.cross(point.U_u, point.U_v)
    n = n / np.linalg.norm(n)
    flipped = bool(np.cross(t, point.U) @ n < 0)
    if flipped:
        t = -t
    Q = normalize_boundary_point(point, t)
    if (Q @ point.U)[2] < 0:
        Q = _HALF_TURN_Y @ Q
    nr = Q @ n
    R = stereographic(nr)
    return BoundaryFrame(rotation=Q, R=float(R.real), position=Q @ point.U, normal=nr, tangent_flipped=flipped)


# ---------------------------------------------------------------------------
# curves in the chart
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ChartCurve:
    """Chart curve ``t -> w(t)`` with its first two derivatives (all complex)."""

    position: Callable[[float], complex]
    velocity: Callable[[float], complex]
    acceleration: Callable[[float], complex]

    @classmethod
    def line(cls, origin: complex, direction: complex) -> "ChartCurve":
        origin, direction = complex(origin), complex(direction)
        return cls(lambda t: origin + t * direction, lambda t: direction, lambda t: 0j)


def geodesic_curvature(surface, curve: ChartCurve, t: float) -> float:
    """Signed geodesic curvature ``(n x c') . c'' / |c'|^3`` of the image curve."""
    w = complex(curve.position(t))
    if not surface.contains(w):
        raise OutsideChartError(f"curve point {w} outside chart")
    p = surface.point(w)
    dw, ddw = complex(curve.velocity(t)), complex(curve.acceleration(t))
    du, dv = dw.real, dw.imag
    c1 = p.U_u * du + p.U_v * dv
    c2 = (p.U_uu * du * du + 2 * p.U_uv * du * dv + p.U_vv * dv * dv
          + p.U_u * ddw.real + p.U_v * ddw.imag)
    return float(np.cross(p.n, c1) @ c2 / np.linalg.norm(c1) ** 3)


# ---------------------------------------------------------------------------
# rigid motions
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class RigidlyMoved:
    """``x -> Q x + b`` applied to a surface; the protocol is preserved."""

    surface: object
    Q: np.ndarray
    b: np.ndarray

    def contains(self, w) -> bool:
        return self.surface.contains(w)

    def derivatives(self, w, order: int = 2) -> dict:
        d = {k: self.Q @ v for k, v in self.surface.derivatives(w, order).items()}
        d[(0, 0)] = d[(0, 0)] + self.b
        return d

    def point(self, w) -> SurfacePoint:
        n = self.Q @ self.surface.point(w).n
        return SurfacePoint.from_derivatives(w, self.derivatives(w, 2), normal=n)


def rigid_fit(source, target) -> tuple[np.ndarray, np.ndarray, float]:
    """Best rotation ``Q`` and shift ``b`` with ``Q source + b ~ target``; returns RMS residual too."""
    A, B = np.asarray(source, float), np.asarray(target, float)
    ca, cb = A.mean(0), B.mean(0)
    rot, _ = Rotation.align_vectors(B - cb, A - ca)
    Q = rot.as_matrix()
    b = cb - Q @ ca
    res = np.sqrt(np.mean(np.sum((A @ Q.T + b - B) ** 2, axis=1)))
    return Q, b, float(res)
