"""Minimal immersion charts from Weierstrass data.

The immersion is ``U(w) = base_position + Re int_{base_point}^{w} Phi dw`` with

    Phi = ((1 - g^2) f, i (1 + g^2) f, 2 g f),

so ``U_u = Re Phi`` and ``U_v = -Im Phi``.  Canonical data (built by
:func:`from_gauss_map`) fix ``f = e^{i theta0} / (2 g_w)``; in that case the
chart is a principal patch with ``I = lambda |dw|^2`` and
``K = -1 / lambda^2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import jets
from .errors import DegenerateChartError, NonCanonicalError, OutsideChartError, QuadratureError
from .jets import ComplexJet, Holomorphic

GL_NODES = 16
QUAD_ABS_TOL = 1e-13
QUAD_MAX_DEPTH = 20


# ---------------------------------------------------------------------------
# charts and pointwise geometry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Chart:
    """Open axis-aligned rectangle ``|u - Re c| < half_u, |v - Im c| < half_v``."""

    half_u: float
    half_v: float
    center: complex = 0j

    def __post_init__(self):
        if not (self.half_u > 0 and self.half_v > 0):
            raise ValueError("chart half-widths must be positive")
        object.__setattr__(self, "center", complex(self.center))

    def contains(self, w) -> bool:
        z = np.asarray(w, dtype=complex) - self.center
        return bool(np.all((np.abs(z.real) < self.half_u) & (np.abs(z.imag) < self.half_v)))

    def grid(self, nu: int, nv: int, shrink: float = 0.999) -> np.ndarray:
        """``nu x nv`` grid of parameter values strictly inside the chart."""
        us = self.center.real + shrink * self.half_u * np.linspace(-1, 1, nu)
        vs = self.center.imag + shrink * self.half_v * np.linspace(-1, 1, nv)
        return us[:, None] + 1j * vs[None, :]


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    """Immersion value, derivatives, frame and curvature data at one parameter."""

    w: complex
    U: np.ndarray
    U_u: np.ndarray
    U_v: np.ndarray
    U_uu: np.ndarray
    U_uv: np.ndarray
    U_vv: np.ndarray
    n: np.ndarray
    E: float
    F: float
    G: float
    L: float
    M: float
    N2: float
    kappa1: float
    kappa2: float
    lam: float

    @property
    def K(self) -> float:
        return (self.L * self.N2 - self.M**2) / (self.E * self.G - self.F**2)

    @property
    def H(self) -> float:
        return 0.5 * (self.kappa1 + self.kappa2)

    @classmethod
    def from_derivatives(cls, w, d: dict, normal=None, lam=None) -> "SurfacePoint":
        """Assemble fundamental forms from a derivative table ``d[(i, j)]``.

        ``normal`` defaults to ``normalize(U_u x U_v)``; ``lam`` defaults to
        the area density ``sqrt(EG - F^2)``.
        """
        U_u, U_v = d[(1, 0)], d[(0, 1)]
        if normal is None:
            c = np.cross(U_u, U_v)
            normal = c / np.linalg.norm(c)
        n = np.asarray(normal, dtype=float)
        E, F, G = U_u @ U_u, U_u @ U_v, U_v @ U_v
        L, M, N2 = d[(2, 0)] @ n, d[(1, 1)] @ n, d[(0, 2)] @ n
        det = E * G - F * F
        H = (E * N2 - 2 * F * M + G * L) / (2 * det)
        K = (L * N2 - M * M) / det
        disc = np.sqrt(max(H * H - K, 0.0))
        if lam is None:
            lam = np.sqrt(det)
        return cls(
            w=complex(w), U=d[(0, 0)], U_u=U_u, U_v=U_v,
            U_uu=d[(2, 0)], U_uv=d[(1, 1)], U_vv=d[(0, 2)], n=n,
            E=float(E), F=float(F), G=float(G), L=float(L), M=float(M), N2=float(N2),
            kappa1=float(H - disc), kappa2=float(H + disc), lam=float(lam),
        )

    def second_form(self, a, b) -> float:
        """II(a, b) for tangent vectors given in chart components (du, dv)."""
        return self.L * a[0] * b[0] + self.M * (a[0] * b[1] + a[1] * b[0]) + self.N2 * a[1] * b[1]

    def chart_components(self, vec) -> np.ndarray:
        """Components of a tangent 3-vector in the (U_u, U_v) basis."""
        J = np.column_stack([self.U_u, self.U_v])
        return np.linalg.lstsq(J, np.asarray(vec, dtype=float), rcond=None)[0]

    def to_dict(self) -> dict:
        out = {"w": [self.w.real, self.w.imag]}
        for k in ("U", "U_u", "U_v", "U_uu", "U_uv", "U_vv", "n"):
            out[k] = list(map(float, getattr(self, k)))
        for k in ("E", "F", "G", "L", "M", "N2", "kappa1", "kappa2"):
            out[k] = getattr(self, k)
        out["lambda"] = self.lam
        return out


def derivatives_from_jets(Fjets: Sequence[ComplexJet], order: int) -> dict:
    """Real partials of ``Re F`` from holomorphic jets.

    ``d^{i+j} / du^i dv^j Re F = Re(i^j F^{(i+j)})``; returns a table keyed by
    ``(i, j)`` with ``i + j <= order``.
    """
    table = {}
    for k in range(order + 1):
        fk = np.array([J.derivative_value(k) for J in Fjets])
        for j in range(k + 1):
            table[(k - j, j)] = np.real((1j**j) * fk)
    return table


def gauss_normal(g) -> np.ndarray:
    """Unit normal ``(2 Re g, 2 Im g, |g|^2 - 1) / (1 + |g|^2)``; ``g = inf`` maps to (0, 0, 1)."""
    g = complex(g)
    if not np.isfinite(abs(g)):
        return np.array([0.0, 0.0, 1.0])
    m = abs(g) ** 2
    return np.array([2 * g.real, 2 * g.imag, m - 1.0]) / (1.0 + m)


def stereographic(n) -> complex:
    """Inverse of :func:`gauss_normal`."""
    n = np.asarray(n, dtype=float)
    if np.isclose(n[2], 1.0):
        return complex(np.inf)
    return complex(n[0], n[1]) / (1.0 - n[2])


# ---------------------------------------------------------------------------
# Weierstrass data
# ---------------------------------------------------------------------------
class _CanonicalDensity(Holomorphic):
    """``f = e^{i theta0} / (2 g_w)``."""

    def __init__(self, g: Holomorphic, theta0: float):
        self.g = g
        self.phase = np.exp(1j * theta0)

    def jet(self, w0, order):
        gw = self.g.jet(w0, order + 1).derivative()
        return jets.jet_recip(gw) * (0.5 * self.phase)

    def __repr__(self):
        return f"e^(i theta0)/(2 {self.g!r}')"


@dataclass(frozen=True, eq=False)
class WeierstrassData:
    """Weierstrass pair ``(g, f dw)`` on a rectangular chart.

    Use :func:`from_gauss_map` for canonical data or :func:`from_pair` for an
    arbitrary density ``f``.  ``normal_sign`` is fixed at construction so that
    the normal curvature along ``v`` is nonnegative at ``base_point``.
    """

    g: Holomorphic
    f: Holomorphic
    theta0: float
    chart: Chart
    base_point: complex
    base_position: np.ndarray
    canonical: bool = True
    normal_sign: float = 1.0
    label: str = ""

    # sampled-surface protocol -------------------------------------------
    def contains(self, w) -> bool:
        return self.chart.contains(w)

    def derivatives(self, w, order: int = 2) -> dict:
        return derivatives_from_jets(immersion_jet(self, w, order), order)

    def point(self, w) -> SurfacePoint:
        return evaluate(self, w)

    def phi_jets(self, w0, order: int):
        """Jets of the three integrand components at ``w0``."""
        G = self.g.jet(w0, order)
        Fd = self.f.jet(w0, order)
        G2 = G * G
        return ((1 - G2) * Fd, (1 + G2) * Fd * 1j, G * Fd * 2)

    def phi(self, w) -> np.ndarray:
        """Integrand values, shape ``(3, *w.shape)``."""
        return np.array([J.value for J in self.phi_jets(w, 0)])

    def conformal_factor(self, w):
        f = self.f.jet(w, 0).value
        g = self.g.jet(w, 0).value
        return np.abs(f) ** 2 * (1 + np.abs(g) ** 2) ** 2


def _orient(data: WeierstrassData) -> WeierstrassData:
    d = immersion_jet(data, data.base_point, 2, _skip_constant=True)
    tab = derivatives_from_jets(d, 2)
    n = gauss_normal(data.g(data.base_point))
    sign = -1.0 if tab[(0, 2)] @ n < 0 else 1.0
    object.__setattr__(data, "normal_sign", sign)
    return data


def _check_gw(g: Holomorphic, chart: Chart, samples: int = 17, edge: int = 256):
    pts = chart.grid(samples, samples, shrink=1.0 - 1e-9).ravel()
    gw = np.abs(g.derivative().jet(pts, 0).value)
    scale = max(float(np.median(gw)), 1e-300)
    if gw.min() <= 1e-10 * scale:
        raise DegenerateChartError("g_w vanishes on the chart sampling grid")
    # winding number of g_w along the chart boundary counts interior zeros
    hu, hv, c = chart.half_u * (1 - 1e-9), chart.half_v * (1 - 1e-9), chart.center
    s = np.linspace(-1, 1, edge, endpoint=False)
    loop = np.concatenate([
        c + hu * s - 1j * hv,
        c + hu - 1j * hv * s,
        c - hu * s + 1j * hv,
        c - hu + 1j * hv * s,
    ])
    vals = g.derivative().jet(loop, 0).value
    if np.abs(vals).min() <= 1e-10 * scale:
        raise DegenerateChartError("g_w vanishes on the chart boundary")
    dphase = np.angle(np.roll(vals, -1) / vals)
    winding = int(round(dphase.sum() / (2 * np.pi)))
    if winding != 0:
        raise DegenerateChartError(f"g_w has {winding} zero(s) inside the chart")


def from_gauss_map(g, theta0: float, chart: Chart, base_point=0j,
                   base_position=(0.0, 0.0, 0.0), label: str = "") -> WeierstrassData:
    """Canonical data ``(g, e^{i theta0} / (2 g_w) dw)``.

    Raises
    ------
    DegenerateChartError
        If ``g_w`` has a zero on (or is numerically zero somewhere on) the chart.
    """
    g = Holomorphic.wrap(g)
    base_point = complex(base_point)
    if not chart.contains(base_point):
        raise OutsideChartError("base point outside chart")
    _check_gw(g, chart)
    data = WeierstrassData(
        g=g, f=_CanonicalDensity(g, theta0), theta0=float(theta0), chart=chart,
        base_point=base_point, base_position=np.asarray(base_position, dtype=float),
        canonical=True, label=label,
    )
    return _orient(data)


def from_pair(g, f, chart: Chart, base_point=0j, base_position=(0.0, 0.0, 0.0),
              label: str = "") -> WeierstrassData:
    """Non-canonical data with an explicit density ``f``."""
    base_point = complex(base_point)
    if not chart.contains(base_point):
        raise OutsideChartError("base point outside chart")
    data = WeierstrassData(
        g=Holomorphic.wrap(g), f=Holomorphic.wrap(f), theta0=0.0, chart=chart,
        base_point=base_point, base_position=np.asarray(base_position, dtype=float),
        canonical=False, label=label,
    )
    return _orient(data)


# ---------------------------------------------------------------------------
# quadrature and immersion
# ---------------------------------------------------------------------------
@lru_cache(maxsize=None)
def _gl(n: int):
    x, wts = np.polynomial.legendre.leggauss(n)
    return x, wts


def _panel(func: Callable, a: complex, b: complex) -> np.ndarray:
    x, wts = _gl(GL_NODES)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = func(mid + half * x)
    return half * (vals @ wts)


def adaptive_segment_integral(func: Callable, a: complex, b: complex,
                              tol: float = QUAD_ABS_TOL, max_depth: int = QUAD_MAX_DEPTH) -> np.ndarray:
    """Adaptive Gauss-Legendre integral of a vector-valued ``func`` along [a, b].

    ``func`` maps an array of complex nodes to shape ``(m, nodes)``.  Panels are
    bisected until the one-panel and two-half-panel estimates agree within
    ``tol`` (absolute, with a 1e-15 relative floor).
    """
    if a == b:
        return np.zeros(np.asarray(func(np.array([a]))).shape[0], dtype=complex)
    stack = [(a, b, _panel(func, a, b), 0)]
    total = 0.0
    while stack:
        lo, hi, whole, depth = stack.pop()
        m = 0.5 * (lo + hi)
        left, right = _panel(func, lo, m), _panel(func, m, hi)
        both = left + right
        err = np.max(np.abs(both - whole))
        if err <= max(tol, 1e-15 * np.max(np.abs(both))):
            total = total + both
        elif depth >= max_depth:
            raise QuadratureError(f"no convergence on [{lo}, {hi}] (err {err:.3g})")
        else:
            stack.append((lo, m, left, depth + 1))
            stack.append((m, hi, right, depth + 1))
    return np.asarray(total, dtype=complex)


def integrate_path(data: WeierstrassData, start, end) -> np.ndarray:
    """``int Phi dw`` along the straight segment from ``start`` to ``end``."""
    start, end = complex(start), complex(end)
    if not (data.contains(start) and data.contains(end)):
        raise OutsideChartError("segment endpoint outside chart")
    return adaptive_segment_integral(data.phi, start, end)


def immersion_jet(data: WeierstrassData, w0, order: int, _skip_constant: bool = False):
    """Jets ``(F1, F2, F3)`` at ``w0`` with ``Re F(base_point) = base_position``."""
    w0 = complex(w0)
    if not data.contains(w0):
        raise OutsideChartError(f"w0 = {w0} outside chart")
    if order < 1:
        consts = _primitive_value(data, w0, _skip_constant)
        return tuple(ComplexJet(w0, [c]) for c in consts)
    phis = data.phi_jets(w0, order - 1)
    consts = _primitive_value(data, w0, _skip_constant)
    return tuple(p.antiderivative(c) for p, c in zip(phis, consts))


def _primitive_value(data, w0, skip):
    if skip:
        return data.base_position.astype(complex)
    return data.base_position + integrate_path(data, data.base_point, w0)


def evaluate(data: WeierstrassData, w) -> SurfacePoint:
    w = complex(w)
    tab = data.derivatives(w, 2)
    g = data.g(w)
    normal = data.normal_sign * gauss_normal(g)
    return SurfacePoint.from_derivatives(w, tab, normal=normal, lam=float(data.conformal_factor(w)))


def gauss_equation_residual(data: WeierstrassData, w, h: float) -> float:
    """``|Delta_h phi + e^{2 phi}|`` with ``phi = -ln(lambda) / 2`` and a 5-point Laplacian."""
    if not data.canonical:
        raise NonCanonicalError("the conformal-factor equation only holds for canonical data")
    w = complex(w)
    stencil = w + h * np.array([0, 1, -1, 1j, -1j])
    if not data.contains(stencil):
        raise OutsideChartError("finite-difference stencil leaves the chart")
    phi = -0.5 * np.log(data.conformal_factor(stencil))
    lap = (phi[1:].sum() - 4 * phi[0]) / h**2
    return float(abs(lap + np.exp(2 * phi[0])))
