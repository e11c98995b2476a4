"""Reference minimal surfaces with closed-form parameterizations.

Every surface here speaks the same small protocol as
:class:`~wlab.weierstrass.WeierstrassData`: ``contains(w)``,
``derivatives(w, order)`` returning ``{(i, j): d^{i+j}U / du^i dv^j}``, and
``point(w)`` returning a :class:`~wlab.weierstrass.SurfacePoint`.  The
parameter is passed as one complex number ``w = u + i v``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from . import jets
from .weierstrass import Chart, SurfacePoint, WeierstrassData, from_gauss_map


@dataclass(frozen=True)
class BoundaryLocus:
    """The chart curve ``w = u + i v`` for ``v`` in ``v_range``, ``u`` fixed."""

    u: float
    v_range: tuple[float, float]
    closed: bool = True


@dataclass(frozen=True, eq=False)
class CatalogSurface:
    name: str
    domain: Chart
    boundary_curves: list[BoundaryLocus]
    constants: dict[str, float]
    mesh_domain: tuple[float, float, float, float]
    _derivs: Callable[[complex, int], dict] | None = None
    weierstrass: WeierstrassData | None = None
    normal_sign: float = 1.0
    description: str = ""

    def contains(self, w) -> bool:
        return self.domain.contains(w)

    def derivatives(self, w, order: int = 2) -> dict:
        if self.weierstrass is not None:
            return self.weierstrass.derivatives(w, order)
        return self._derivs(complex(w), order)

    def parameterization(self, w) -> np.ndarray:
        return self.derivatives(w, 0)[(0, 0)]

    def point(self, w) -> SurfacePoint:
        if self.weierstrass is not None:
            return self.weierstrass.point(w)
        d = self.derivatives(w, 2)
        c = np.cross(d[(1, 0)], d[(0, 1)])
        return SurfacePoint.from_derivatives(w, d, normal=self.normal_sign * c / np.linalg.norm(c))


def _with_orientation(s: CatalogSurface, w_ref: complex) -> CatalogSurface:
    # same convention as the Weierstrass charts: normal curvature along v >= 0
    p = s.point(w_ref)
    if p.N2 < 0:
        object.__setattr__(s, "normal_sign", -s.normal_sign)
    return s


# ---------------------------------------------------------------------------
def equatorial_disk() -> CatalogSurface:
    """Unit disk in the XY-plane, log-polar chart ``(s, theta) -> e^s (cos theta, sin theta, 0)``.

    The chart is conformal (``E = G = e^{2s}``) and the boundary circle is ``s = 0``.
    """

    def derivs(w, order):
        s, th = w.real, w.imag
        r = np.exp(s)
        out = {}
        for k in range(order + 1):
            for j in range(k + 1):
                ang = th + j * np.pi / 2
                out[(k - j, j)] = r * np.array([np.cos(ang), np.sin(ang), 0.0])
        return out

    s_min = -4.0
    return _with_orientation(CatalogSurface(
        name="equatorial-disk",
        domain=Chart(half_u=(0.1 - s_min) / 2, half_v=np.pi + 0.1, center=complex((0.1 + s_min) / 2, 0)),
        boundary_curves=[BoundaryLocus(0.0, (-np.pi, np.pi))],
        constants={"radius": 1.0},
        mesh_domain=(s_min, 0.0, -np.pi, np.pi),
        _derivs=derivs,
        description="flat equatorial disk",
    ), complex(-1.0, 0.0))


# ---------------------------------------------------------------------------
def critical_catenoid_constants(tol: float = 1e-14) -> tuple[float, float]:
    """Return ``(t0, c)``: ``t0 tanh t0 = 1`` and ``c = 1 / sqrt(cosh^2 t0 + t0^2)``.

    Bisection on [1, 1.5] followed by a Newton polish.
    """
    fn = lambda t: t * np.tanh(t) - 1.0
    dfn = lambda t: np.tanh(t) + t / np.cosh(t) ** 2
    t0 = optimize.bisect(fn, 1.0, 1.5, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    t0 = optimize.newton(fn, t0, fprime=dfn, tol=tol, maxiter=20)
    c = 1.0 / np.sqrt(np.cosh(t0) ** 2 + t0**2)
    return float(t0), float(c)


def catenoid(scale: float, t_max: float, name: str = "catenoid") -> CatalogSurface:
    """``X(t, theta) = scale * (cosh t cos theta, cosh t sin theta, t)`` for ``|t| <= t_max``."""

    def derivs(w, order):
        t, th = w.real, w.imag
        ch, sh = np.cosh(t), np.sinh(t)
        out = {}
        for k in range(order + 1):
            for j in range(k + 1):
                i = k - j
                rad = ch if i % 2 == 0 else sh
                ang = th + j * np.pi / 2
                if j == 0:
                    zc = t if i == 0 else (1.0 if i == 1 else 0.0)
                else:
                    zc = 0.0
                out[(i, j)] = scale * np.array([rad * np.cos(ang), rad * np.sin(ang), zc])
        return out

    return _with_orientation(CatalogSurface(
        name=name,
        domain=Chart(half_u=t_max + 0.1, half_v=np.pi + 0.1),
        boundary_curves=[BoundaryLocus(t_max, (-np.pi, np.pi)), BoundaryLocus(-t_max, (-np.pi, np.pi))],
        constants={"c": scale, "t0": t_max},
        mesh_domain=(-t_max, t_max, -np.pi, np.pi),
        _derivs=derivs,
    ), 0j)


def critical_catenoid() -> CatalogSurface:
    """Catenoid rescaled to meet the unit sphere orthogonally along ``t = +-t0``."""
    t0, c = critical_catenoid_constants()
    s = catenoid(c, t0, name="critical-catenoid")
    object.__setattr__(s, "description", "critical catenoid (free boundary annulus)")
    return s


def catenoid_chart(scale: float | None = None, t_max: float | None = None) -> CatalogSurface:
    """Canonical Weierstrass chart of the catenoid: ``g = exp(w / sqrt(scale))``.

    With ``z = w / sqrt(scale)`` the immersion is
    ``scale * (-cosh z, i sinh z, z)`` (real part), i.e. the explicit catenoid
    composed with a half-turn about the Z-axis.  Chart coordinates are
    ``u = sqrt(scale) t``, ``v = sqrt(scale) theta``; defaults give the
    critical catenoid.
    """
    t0, c = critical_catenoid_constants()
    scale = c if scale is None else float(scale)
    t_max = t0 if t_max is None else float(t_max)
    k = np.sqrt(scale)
    chart = Chart(half_u=k * (t_max + 0.1), half_v=k * (np.pi + 0.1))
    data = from_gauss_map(lambda z: jets.exp(z / k), 0.0, chart, base_point=0j,
                          base_position=(-scale, 0.0, 0.0), label="catenoid-chart")
    return CatalogSurface(
        name="catenoid-chart",
        domain=chart,
        boundary_curves=[BoundaryLocus(k * t_max, (-k * np.pi, k * np.pi)),
                         BoundaryLocus(-k * t_max, (-k * np.pi, k * np.pi))],
        constants={"c": scale, "t0": t_max, "sqrt_c": k},
        mesh_domain=(-k * t_max, k * t_max, -k * np.pi, k * np.pi),
        weierstrass=data,
        description="Weierstrass chart of the catenoid",
    )


def enneper_chart(delta: float = 0.5) -> CatalogSurface:
    """Canonical chart ``g = w`` (Enneper) on the square of half-width ``delta``."""
    if not 0 < delta < 1:
        raise ValueError("enneper chart needs 0 < delta < 1")
    chart = Chart(delta, delta)
    data = from_gauss_map(lambda z: z, 0.0, chart, label="enneper")
    return CatalogSurface(
        name="enneper",
        domain=chart,
        boundary_curves=[],
        constants={"delta": delta},
        mesh_domain=(-0.999 * delta, 0.999 * delta, -0.999 * delta, 0.999 * delta),
        weierstrass=data,
        description="Enneper chart (not free boundary)",
    )


SURFACES: dict[str, Callable[[], CatalogSurface]] = {
    "equatorial-disk": equatorial_disk,
    "critical-catenoid": critical_catenoid,
    "catenoid-chart": catenoid_chart,
    "enneper": enneper_chart,
}


def get_surface(name: str) -> CatalogSurface:
    try:
        return SURFACES[name]()
    except KeyError:
        raise KeyError(f"unknown surface {name!r}; known: {', '.join(SURFACES)}") from None

