"""Truncated-series replay of the boundary-circle argument at a boundary point P.

At the normalized boundary point (tangent along +Y, normal in the XZ-plane,
``w(P) = 0``, boundary curve ``w = i v``) canonical data are fixed by the
g-jet ``g = R + a1 w + a2 w^2 + a3 w^3 + a4 w^4 + ...`` and the phase
``theta0``.  This module

* expands ``1/g_w``, ``g^2/g_w``, ``g/g_w`` and the holomorphic coordinate
  primitives with jet algebra and compares them with hand-written closed forms,
* evaluates the closed-form relations that the free-boundary conditions are
  supposed to impose at orders ``v`` .. ``v^3`` (named by what they come from,
  see :data:`RELATIONS`), and
* independently expands the free-boundary conditions themselves
  (``U x U_u = 0`` through ``v^2``, ``|U|^2 = 1`` through ``v^3``) from jets.

Notation: ``rho = e^{i theta0} / a1``, ``q = a2 / a1``,
``Psi = 4 a2^2 / a1^2 - 3 a3 / a1``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import jets
from .errors import DegenerateCurveError
from .geometry import special_position
from .jets import ComplexJet
from .weierstrass import Chart, WeierstrassData, from_gauss_map

CONSISTENT_TOL = 1e-10
REAL_TOL = 1e-10
TORSION_TOL = 1e-12

# closed-form relations, keyed by the condition and order they are read from
RELATIONS = (
    "conormal_xy_linear",      # Y X_u = X Y_u at order v
    "conormal_xy_quadratic",   # Y X_u = X Y_u at order v^2
    "conormal_yz_quadratic",   # Y Z_u = Z Y_u at order v^2
    "sphere_quadratic",        # X^2 + Y^2 + Z^2 = 1 at order v^2
    "sphere_cubic",            # X^2 + Y^2 + Z^2 = 1 at order v^3
    "combined_ratio",          # a2/a1 + conj = (a1 + conj a1) / (2R)
    "combined_phase",          # rho = (R^2 - 1)(a1 + conj a1) / (R (1 + R^2)^2)
)
JET_CHECKS = ("tangent_alignment", "jet_orthogonality", "jet_sphere")


@dataclass(frozen=True)
class BoundaryJetData:
    """g-jet coefficients at the normalized boundary point."""

    R: float
    a1: complex
    a2: complex
    a3: complex
    a4: complex = 0j
    theta0: float = 0.0

    def __post_init__(self):
        for k in ("a1", "a2", "a3", "a4"):
            object.__setattr__(self, k, complex(getattr(self, k)))
        object.__setattr__(self, "R", float(self.R))
        vals = [self.R, self.theta0, self.a1, self.a2, self.a3, self.a4]
        if not all(np.isfinite(complex(v)) for v in vals):
            raise ValueError("jet data must be finite")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if abs(self.R - 1.0) < 1e-12:
            raise ValueError("R = 1 is excluded (degenerate normalization)")
        if self.a1 == 0:
            raise ValueError("a1 must be nonzero")

    @property
    def branch(self) -> str:
        return "R>1" if self.R > 1 else "R<1"

    @property
    def g_coeffs(self) -> list[complex]:
        return [complex(self.R), self.a1, self.a2, self.a3, self.a4]

    @property
    def rho(self) -> complex:
        return np.exp(1j * self.theta0) / self.a1

    @property
    def psi(self) -> complex:
        return 4 * self.a2**2 / self.a1**2 - 3 * self.a3 / self.a1

    def to_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]
        return {"R": self.R, "a1": c(self.a1), "a2": c(self.a2), "a3": c(self.a3),
                "a4": c(self.a4), "theta0": self.theta0}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundaryJetData":
        z = lambda v: complex(*v) if isinstance(v, (list, tuple)) else complex(v)
        return cls(R=float(d["R"]), a1=z(d["a1"]), a2=z(d["a2"]), a3=z(d["a3"]),
                   a4=z(d.get("a4", 0)), theta0=float(d.get("theta0", 0.0)))


# ---------------------------------------------------------------------------
# expansions
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SeriesExpansions:
    """Jet-computed series next to their closed forms.

    ``X``, ``Y``, ``Z`` are the holomorphic parts ``H`` with
    ``coordinate = constant + Re H(w)``; jets of order 4, compared through w^3.
    """

    recip_gw: ComplexJet
    g2_over_gw: ComplexJet
    g_over_gw: ComplexJet
    X: ComplexJet
    Y: ComplexJet
    Z: ComplexJet
    closed: dict
    mismatch: dict

    @property
    def max_mismatch(self) -> float:
        return max(self.mismatch.values())

    def to_dict(self) -> dict:
        out = {}
        for k in ("recip_gw", "g2_over_gw", "g_over_gw", "X", "Y", "Z"):
            cs = getattr(self, k).coeffs[:4]
            out[k] = [[float(c.real), float(c.imag)] for c in cs]
        out["mismatch"] = dict(self.mismatch)
        return out


def closed_form_series(data: BoundaryJetData) -> dict:
    """Hand-expanded coefficients (w^0 .. w^3) of the six series."""
    R, a1, a2, a3, a4 = data.R, data.a1, data.a2, data.a3, data.a4
    e = np.exp(1j * data.theta0)
    b2 = 4 * a2**2 / a1**3 - 3 * a3 / a1**2
    b3 = -8 * a2**3 / a1**4 + 12 * a2 * a3 / a1**3 - 4 * a4 / a1**2
    recip = [1 / a1, -2 * a2 / a1**2, b2, b3]
    g2 = [R**2 / a1,
          2 * R * (1 - a2 / a1**2 * R),
          b2 * R**2 - 2 * a2 / a1 * R + a1,
          b3 * R**2 + 4 * (a2**2 / a1**2 - a3 / a1) * R]
    g1 = [R / a1,
          1 - 2 * a2 / a1**2 * R,
          b2 * R - a2 / a1,
          b3 * R + 2 * (a2**2 / a1**2 - a3 / a1)]
    X = [0, (1 - R**2) / a1,
         -((1 - a2 / a1**2 * R) * R + a2 / a1**2),
         (b2 * (1 - R**2) + 2 * a2 / a1 * R - a1) / 3]
    Y = [0, (1 + R**2) / a1,
         (1 - a2 / a1**2 * R) * R - a2 / a1**2,
         (b2 * (1 + R**2) - 2 * a2 / a1 * R + a1) / 3]
    Z = [0, R / a1, 0.5 * (1 - 2 * a2 / a1**2 * R), (b2 * R - a2 / a1) / 3]
    return {
        "recip_gw": np.array(recip, complex),
        "g2_over_gw": np.array(g2, complex),
        "g_over_gw": np.array(g1, complex),
        "X": 0.5 * e * np.array(X, complex),
        "Y": 0.5j * e * np.array(Y, complex),
        "Z": e * np.array(Z, complex),
    }


def expand_weierstrass_series(data: BoundaryJetData, order: int = 4) -> SeriesExpansions:
    g = ComplexJet(0j, (data.g_coeffs + [0j] * order)[: order + 2])
    gw = g.derivative()                        # order + 1 coefficients... trimmed below
    gw = gw.truncate(order - 1) if gw.order > order - 1 else gw
    g_ = g.truncate(order - 1)
    recip = jets.jet_recip(gw)
    g2 = g_ * g_ * recip
    g1 = g_ * recip
    e = np.exp(1j * data.theta0)
    HX = ((recip - g2) * (0.5 * e)).antiderivative(0)
    HY = ((recip + g2) * (0.5j * e)).antiderivative(0)
    HZ = (g1 * e).antiderivative(0)
    series = {"recip_gw": recip, "g2_over_gw": g2, "g_over_gw": g1, "X": HX, "Y": HY, "Z": HZ}
    closed = closed_form_series(data)
    mismatch = {}
    for k, cf in closed.items():
        got = series[k].coeffs[:4]
        scale = max(np.max(np.abs(cf)), 1e-300)
        mismatch[k] = float(np.max(np.abs(got - cf)) / scale)
    return SeriesExpansions(recip, g2, g1, HX, HY, HZ, closed, mismatch)


# ---------------------------------------------------------------------------
# frame at P
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class TangentFrame:
    Xv: float
    Yv: float
    Zv: float
    Xu: float
    Yu: float
    Zu: float
    position: np.ndarray

    @property
    def tangent(self) -> np.ndarray:
        return np.array([self.Xv, self.Yv, self.Zv])

    @property
    def conormal(self) -> np.ndarray:
        return np.array([self.Xu, self.Yu, self.Zu])


def tangent_frame_at_P(data: BoundaryJetData) -> TangentFrame:
    """U_v(0), U_u(0) in closed form and the normalized position of P."""
    R, rho = data.R, data.rho
    s = rho - np.conj(rho)
    t = rho + np.conj(rho)
    Xv = 0.25 * (1 - R**2) * s * 1j
    Yv = -0.25 * (1 + R**2) * t
    Zv = 0.25 * 2 * R * s * 1j
    return TangentFrame(
        Xv=float(Xv.real), Yv=float(Yv.real), Zv=float(Zv.real),
        Xu=float(0.5 * (1 - R**2) * rho.real),
        Yu=float(-0.5 * (1 + R**2) * rho.imag),
        Zu=float(R * rho.real),
        position=special_position(R),
    )


# ---------------------------------------------------------------------------
# closed-form relations
# ---------------------------------------------------------------------------
def relation_terms(data: BoundaryJetData) -> tuple[dict, dict]:
    """Left/right-hand sides of each relation plus intermediate terms."""
    R, a1, a2 = data.R, data.a1, data.a2
    conj = np.conj
    rho, psi = data.rho, data.psi
    q = a2 / a1
    dpsi = conj(psi) - psi
    s1 = conj(a1) + a1
    theta1 = 0.5 * rho * (3 * (q - conj(q)) * (1 + R**2) - R * (1 + 3 * R**2) / (1 - R**2) * (conj(a1) - a1))
    theta2 = (2 * R * (a2 - conj(a2)) - a1**2 + conj(a1) ** 2) / (1 + R**2)
    pi1 = 0.5 * rho * (3 * (q - conj(q)) * (R**2 + 1) + (1 / R + 2 * R) * (conj(a1) - a1))
    pi2 = (2 * R * (a2 - conj(a2)) - a1**2 + conj(a1) ** 2) / (1 + R**2)
    ups1 = 1.5 * rho * ((q - conj(q)) * (1 + R**2) ** 3 / (1 + R**4)
                        + R * (1 + R**2) ** 2 / (1 + R**4) * (conj(a1) - a1))
    ups2 = 2 * R**3 / (1 + R**4) * (a2 - conj(a2)) + (1 - R**2) / (1 + R**4) * (a1**2 - conj(a1) ** 2)
    sides = {
        "conormal_xy_linear": (rho, -2 / (1 + R**2) ** 2 * ((conj(q) + q) * (1 + R**2) - R * s1)),
        "conormal_xy_quadratic": (dpsi, theta1 - theta2),
        "conormal_yz_quadratic": (dpsi, pi1 - pi2),
        "sphere_quadratic": (rho, -2 / (1 + R**2) ** 3 * ((conj(q) + q) * (1 + R**4) - R**3 * s1)),
        "sphere_cubic": (dpsi, ups1 - ups2),
        "combined_ratio": (q + conj(q), s1 / (2 * R)),
        "combined_phase": (rho, (R**2 - 1) / (R * (1 + R**2) ** 2) * s1),
    }
    trace = {"Theta1": theta1, "Theta2": theta2, "Pi1": pi1, "Pi2": pi2,
             "Upsilon1": ups1, "Upsilon2": ups2}
    return sides, trace


def third_derivatives_at_P(data: BoundaryJetData) -> tuple[complex, complex]:
    """Closed forms of X_vvv(0) and Z_vvv(0) (valid once rho is real)."""
    R, a1, a2, rho, psi = data.R, data.a1, data.a2, data.rho, data.psi
    conj = np.conj
    dpsi = conj(psi) - psi
    xvvv = 0.5j * rho * (dpsi * (1 - R**2) + 2 * R * (conj(a2) - a2) + a1**2 - conj(a1) ** 2)
    zvvv = 1j * rho * (dpsi * R + a2 - conj(a2))
    return complex(xvvv), complex(zvvv)


# ---------------------------------------------------------------------------
# jet-level free-boundary conditions along w = i v
# ---------------------------------------------------------------------------
def boundary_series(exp: SeriesExpansions, data: BoundaryJetData, nv: int = 4):
    """Real v-series of U(i v) and U_u(i v); coefficient k multiplies v^k."""
    ik = np.array([1j**k for k in range(nv)])
    pos = special_position(data.R)
    U = np.array([np.real(H.coeffs[:nv] * ik) for H in (exp.X, exp.Y, exp.Z)])
    U[:, 0] += pos
    Uu = np.array([np.real(H.derivative().coeffs[:nv] * ik) for H in (exp.X, exp.Y, exp.Z)])
    return U, Uu


def _smul(a, b, n):
    return np.convolve(a, b)[:n]


def jet_free_boundary_residuals(exp: SeriesExpansions, data: BoundaryJetData) -> dict:
    U, Uu = boundary_series(exp, data)
    cross = [
        _smul(U[1], Uu[2], 3) - _smul(U[2], Uu[1], 3),
        _smul(U[2], Uu[0], 3) - _smul(U[0], Uu[2], 3),
        _smul(U[0], Uu[1], 3) - _smul(U[1], Uu[0], 3),
    ]
    sphere = sum(_smul(U[k], U[k], 4) for k in range(3))
    sphere[0] -= 1.0
    return {
        "tangent_alignment": float(abs(data.rho.imag)),
        "jet_orthogonality": float(np.max(np.abs(cross))),
        "jet_sphere": float(np.max(np.abs(sphere))),
    }


def boundary_derivatives_at_P(exp: SeriesExpansions) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """U_v, U_vv, U_vvv at v = 0 from the coordinate jets."""
    H = (exp.X, exp.Y, exp.Z)
    d = [np.array([np.real((1j**k) * h.derivative_value(k)) for h in H]) for k in (1, 2, 3)]
    return d[0], d[1], d[2]


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Conclusions:
    a1_real: bool
    theta_unit: bool
    a2_real: bool
    psi_real: bool
    X_vvv_zero: bool
    Z_vvv_zero: bool
    torsion_zero: bool

    def __post_init__(self):
        if self.torsion_zero and not (self.X_vvv_zero and self.Z_vvv_zero):
            raise ValueError("torsion_zero requires X_vvv_zero and Z_vvv_zero")

    def all(self) -> bool:
        return all(vars(self).values())


@dataclass(frozen=True, eq=False)
class SeriesVerdict:
    data: BoundaryJetData
    expansions: SeriesExpansions
    residuals: dict
    jet_residuals: dict
    conclusions: Conclusions
    psi: complex
    forced_unit: float | None
    X_vvv: complex
    Z_vvv: complex
    trace: dict = field(default_factory=dict)
    tol: float = CONSISTENT_TOL

    @property
    def branch(self) -> str:
        return self.data.branch

    @property
    def max_relation_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def consistent(self) -> bool:
        return (self.max_relation_residual < self.tol
                and max(self.jet_residuals.values()) < self.tol
                and self.conclusions.all())

    def to_dict(self) -> dict:
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        try:
            tau = torsion_at_P(self)
        except DegenerateCurveError:
            tau = None
        return {
            "input": self.data.to_dict(),
            "branch": self.branch,
            "residuals": dict(self.residuals),
            "jet_residuals": dict(self.jet_residuals),
            "conclusions": dict(vars(self.conclusions)),
            "psi": c(self.psi),
            "forced_unit": self.forced_unit,
            "X_vvv": c(self.X_vvv),
            "Z_vvv": c(self.Z_vvv),
            "torsion_at_P": tau,
            "expansion_mismatch": dict(self.expansions.mismatch),
            "trace": {k: c(v) for k, v in self.trace.items()},
            "consistent": self.consistent,
        }


def _is_real(z: complex, tol: float = REAL_TOL) -> bool:
    return abs(np.imag(z)) <= tol * max(1.0, abs(z))


def derive_constraints(data: BoundaryJetData, tol: float = CONSISTENT_TOL) -> SeriesVerdict:
    """Evaluate every relation and the conclusion chain on ``data``.

    Inconsistent data give a failing verdict, not an exception.
    """
    exp = expand_weierstrass_series(data)
    sides, trace = relation_terms(data)
    residuals = {k: float(abs(l - r)) for k, (l, r) in sides.items()}
    jet_res = jet_free_boundary_residuals(exp, data)

    a1_real = _is_real(data.a1)
    forced = None
    theta_unit = False
    if a1_real:
        val = 2 * data.a1.real**2 * (data.R**2 - 1) / (data.R * (1 + data.R**2) ** 2)
        forced = 1.0 if val > 0 else -1.0
        theta_unit = abs(np.exp(1j * data.theta0) - forced) <= tol
    xvvv, zvvv = third_derivatives_at_P(data)
    scale = max(1.0, abs(data.rho))
    xz, zz = abs(xvvv) <= tol * scale, abs(zvvv) <= tol * scale
    tangent_ok = jet_res["tangent_alignment"] <= tol
    conclusions = Conclusions(
        a1_real=a1_real,
        theta_unit=theta_unit,
        a2_real=_is_real(data.a2),
        psi_real=_is_real(data.psi),
        X_vvv_zero=xz,
        Z_vvv_zero=zz,
        torsion_zero=xz and zz and tangent_ok,
    )
    return SeriesVerdict(data=data, expansions=exp, residuals=residuals, jet_residuals=jet_res,
                         conclusions=conclusions, psi=data.psi, forced_unit=forced,
                         X_vvv=xvvv, Z_vvv=zvvv, trace=trace, tol=tol)


def torsion_at_P(verdict: SeriesVerdict) -> float:
    """``det(U_v, U_vv, U_vvv) / |U_v x U_vv|^2`` at v = 0 from the series."""
    d1, d2, d3 = boundary_derivatives_at_P(verdict.expansions)
    c = np.cross(d1, d2)
    nc = np.linalg.norm(c)
    if nc <= 1e-12 * np.linalg.norm(d1) ** 2:
        raise DegenerateCurveError("U_v x U_vv vanishes at P")
    return float(np.linalg.det(np.array([d1, d2, d3])) / nc**2)


# ---------------------------------------------------------------------------
# generators and batches
# ---------------------------------------------------------------------------
def consistent_instance(rng: np.random.Generator, branch: str | None = None) -> BoundaryJetData:
    """Data satisfying all relations: a1 real, a2 = a1^2 / (2R), a3 real, a4 free.

    ``R > 1`` pairs with ``theta0 = 0`` and ``R < 1`` with ``theta0 = pi``
    (the unit value forced by the phase relation).
    """
    if branch is None:
        branch = "R>1" if rng.random() < 0.5 else "R<1"
    R = rng.uniform(1.25, 4.0) if branch == "R>1" else rng.uniform(0.25, 0.8)
    a1 = np.sqrt(R * (1 + R**2) ** 2 / (2 * abs(R**2 - 1))) * rng.choice([-1.0, 1.0])
    a2 = a1**2 / (2 * R)
    a3 = rng.normal() * abs(a1) ** 3
    a4 = complex(rng.normal(), rng.normal()) * abs(a1) ** 4
    theta0 = 0.0 if R > 1 else np.pi
    return BoundaryJetData(R=R, a1=a1, a2=a2, a3=a3, a4=a4, theta0=theta0)


def perturbed_instance(rng: np.random.Generator, noise: float | None = None, target: str | None = None,
                       branch: str | None = None) -> BoundaryJetData:
    """A consistent instance with imaginary noise added to a2 or a1.

    ``noise`` defaults to a uniform draw from [0.05, 0.2].
    """
    base = consistent_instance(rng, branch)
    if noise is None:
        noise = rng.uniform(0.05, 0.2)
    target = target or ("a2" if rng.random() < 0.5 else "a1")
    kick = 1j * noise * rng.choice([-1.0, 1.0])
    fields = base.__dict__.copy()
    fields[target] = fields[target] + kick
    return BoundaryJetData(**fields)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WLAB_THREADS", "1")))
    except ValueError:
        return 1


def verify_batch(instances: Iterable[BoundaryJetData], tol: float = CONSISTENT_TOL) -> list[SeriesVerdict]:
    instances = list(instances)
    n = worker_count()
    if n == 1:
        return [derive_constraints(d, tol) for d in instances]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda d: derive_constraints(d, tol), instances))


# ---------------------------------------------------------------------------
def jet_chart(data: BoundaryJetData, half_width: float | None = None) -> WeierstrassData:
    """Canonical chart for the polynomial g-jet, with P at ``w = 0`` in normalized position."""
    cs = data.g_coeffs
    if half_width is None:
        half_width = 0.5
        while True:
            r = np.sqrt(2) * half_width
            drift = sum(k * abs(cs[k]) * r ** (k - 1) for k in range(2, len(cs)))
            if drift <= 0.5 * abs(cs[1]):
                break
            half_width *= 0.5
    return from_gauss_map(jets.polynomial(cs), data.theta0, Chart(half_width, half_width),
                          base_point=0j, base_position=special_position(data.R), label="jet-chart")


def relation_names() -> Sequence[str]:
    return RELATIONS
