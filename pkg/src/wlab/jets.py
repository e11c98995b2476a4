"""Truncated complex power series ("holomorphic jets").

A :class:`ComplexJet` stores the Taylor coefficients ``c_0 .. c_N`` of a
holomorphic function about an expansion point ``base``::

    f(w) = c_0 + c_1 (w - base) + ... + c_N (w - base)^N + O((w - base)^{N+1})

Arithmetic propagates coefficients exactly up to the truncation order, so
derivatives of any expression built from jets come out without numerical
differentiation.  Coefficient arrays may carry trailing batch axes
(``coeffs.shape == (N + 1, *batch)``); every operation broadcasts over them,
which lets one jet evaluate a function at many points at once.

The elementary functions below (:func:`exp`, :func:`sin`, ...) accept either
jets or plain numbers/arrays, so the same user expression works for both.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import JetMismatchError

DEFAULT_ORDER = 8

Scalar = Union[complex, float, int, np.ndarray]


@dataclass(frozen=True, eq=False)
class ComplexJet:
    """Immutable truncated power series with complex coefficients.

    Parameters
    ----------
    base : complex or ndarray
        Expansion point (one per batch element when batched).
    coeffs : array_like
        ``coeffs[k]`` multiplies ``(w - base)**k``.  Shape ``(order + 1, *batch)``.
    """

    base: complex | np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 0:
            c = c.reshape(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("jet coefficients must be finite")
        b = np.asarray(self.base, dtype=complex)
        if not np.all(np.isfinite(b)):
            raise ValueError("jet base must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "base", complex(b) if b.ndim == 0 else b)

    # -- constructors -----------------------------------------------------
    @classmethod
    def variable(cls, base, order: int = DEFAULT_ORDER) -> "ComplexJet":
        """Jet of the identity map ``w`` about ``base``."""
        base = np.asarray(base, dtype=complex)
        c = np.zeros((order + 1,) + base.shape, dtype=complex)
        c[0] = base
        if order >= 1:
            c[1] = 1.0
        return cls(base, c)

    @classmethod
    def constant(cls, value, base=0j, order: int = DEFAULT_ORDER) -> "ComplexJet":
        value = np.asarray(value, dtype=complex)
        shape = np.broadcast_shapes(value.shape, np.shape(base))
        c = np.zeros((order + 1,) + shape, dtype=complex)
        c[0] = value
        return cls(base, c)

    # -- basic properties -------------------------------------------------
    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        """Constant term, i.e. the function value at ``base``."""
        v = self.coeffs[0]
        return complex(v) if v.ndim == 0 else v

    def derivative_value(self, k: int):
        """k-th complex derivative at ``base`` (``k! * c_k``)."""
        v = self.coeffs[k] * float(np.prod(np.arange(1, k + 1)))
        return complex(v) if v.ndim == 0 else v

    def truncate(self, order: int) -> "ComplexJet":
        if order > self.order:
            raise JetMismatchError(f"cannot raise order {self.order} to {order}")
        return ComplexJet(self.base, self.coeffs[: order + 1])

    def __repr__(self):
        return f"ComplexJet(base={self.base!r}, coeffs={self.coeffs.tolist()!r})"

    # -- compatibility ----------------------------------------------------
    def _check(self, other: "ComplexJet"):
        if self.order != other.order:
            raise JetMismatchError(f"order mismatch: {self.order} vs {other.order}")
        if not np.array_equal(np.asarray(self.base), np.asarray(other.base)):
            raise JetMismatchError("jets expanded about different base points")

    def _lift(self, x) -> "ComplexJet":
        if isinstance(x, ComplexJet):
            self._check(x)
            return x
        return ComplexJet.constant(x, self.base, self.order)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ComplexJet):
            return jet_add(self, other)
        c = self.coeffs.copy()
        c[0] = c[0] + other
        return ComplexJet(self.base, c)

    __radd__ = __add__

    def __neg__(self):
        return ComplexJet(self.base, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ComplexJet):
            return jet_mul(self, other)
        return ComplexJet(self.base, self.coeffs * np.asarray(other, dtype=complex))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ComplexJet):
            return jet_mul(self, jet_recip(other))
        return ComplexJet(self.base, self.coeffs / np.asarray(other, dtype=complex))

    def __rtruediv__(self, other):
        return jet_recip(self) * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            if p < 0:
                return jet_recip(self) ** (-p)
            out = ComplexJet.constant(1.0, self.base, self.order) * np.ones_like(self.coeffs[0])
            sq = self
            while p:
                if p & 1:
                    out = jet_mul(out, sq)
                p >>= 1
                if p:
                    sq = jet_mul(sq, sq)
            return out
        return exp(log(self) * p)

    def __call__(self, w):
        return jet_eval(self, w)

    def derivative(self) -> "ComplexJet":
        return jet_derivative(self)

    def antiderivative(self, constant=0j) -> "ComplexJet":
        return jet_antiderivative(self, constant)


# -- the core operations ----------------------------------------------------
def jet_add(a: ComplexJet, b: ComplexJet) -> ComplexJet:
    a._check(b)
    return ComplexJet(a.base, a.coeffs + b.coeffs)


def jet_mul(a: ComplexJet, b: ComplexJet) -> ComplexJet:
    """Cauchy product truncated at the common order."""
    a._check(b)
    x, y = np.broadcast_arrays(a.coeffs, b.coeffs)
    out = np.empty_like(x)
    for k in range(x.shape[0]):
        out[k] = np.sum(x[: k + 1] * y[k::-1], axis=0)
    return ComplexJet(a.base, out)


def jet_recip(a: ComplexJet) -> ComplexJet:
    """Series of ``1 / a``; needs a nonzero constant term."""
    c = a.coeffs
    if np.any(c[0] == 0):
        raise ZeroDivisionError("jet has zero constant term (pole at the expansion point)")
    b = np.empty_like(c)
    b[0] = 1.0 / c[0]
    for k in range(1, c.shape[0]):
        b[k] = -np.sum(c[1 : k + 1] * b[k - 1 :: -1][:k], axis=0) / c[0]
    return ComplexJet(a.base, b)


def jet_derivative(a: ComplexJet) -> ComplexJet:
    if a.order < 1:
        raise JetMismatchError("derivative of an order-0 jet is not determined")
    k = np.arange(1, a.order + 1).reshape((-1,) + (1,) * (a.coeffs.ndim - 1))
    return ComplexJet(a.base, a.coeffs[1:] * k)


def jet_antiderivative(a: ComplexJet, constant=0j) -> ComplexJet:
    k = np.arange(1, a.order + 2).reshape((-1,) + (1,) * (a.coeffs.ndim - 1))
    head = np.broadcast_to(np.asarray(constant, dtype=complex), a.coeffs.shape[1:])[None]
    return ComplexJet(a.base, np.concatenate([head, a.coeffs / k]))


def jet_eval(a: ComplexJet, w):
    """Horner evaluation of the truncated polynomial at ``w``."""
    z = np.asarray(w, dtype=complex) - np.asarray(a.base)
    acc = np.zeros(np.broadcast_shapes(z.shape, a.coeffs.shape[1:]), dtype=complex)
    for c in a.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


# -- elementary functions -------------------------------------------------
def _ks(a: ComplexJet):
    return np.arange(a.order + 1).reshape((-1,) + (1,) * (a.coeffs.ndim - 1))


def _exp_jet(a: ComplexJet) -> ComplexJet:
    # b' = a' b  =>  k b_k = sum_{j=1..k} j a_j b_{k-j}
    c, ks = a.coeffs, _ks(a)
    b = np.empty_like(c)
    b[0] = np.exp(c[0])
    for k in range(1, c.shape[0]):
        b[k] = np.sum(ks[1 : k + 1] * c[1 : k + 1] * b[k - 1 :: -1][:k], axis=0) / k
    return ComplexJet(a.base, b)


def _log_jet(a: ComplexJet) -> ComplexJet:
    # a b' = a'  =>  k a_0 b_k = k a_k - sum_{j=1..k-1} j b_j a_{k-j}
    c, ks = a.coeffs, _ks(a)
    if np.any(c[0] == 0):
        raise ZeroDivisionError("log of a jet with zero constant term")
    b = np.empty_like(c)
    b[0] = np.log(c[0])
    for k in range(1, c.shape[0]):
        s = np.sum(ks[1:k] * b[1:k] * c[k - 1 : 0 : -1], axis=0) if k > 1 else 0.0
        b[k] = (c[k] - s / k) / c[0]
    return ComplexJet(a.base, b)


def _sincos_jet(a: ComplexJet, hyperbolic: bool):
    # s' = a' c, c' = -a' s   (hyperbolic: c' = +a' s)
    x, ks = a.coeffs, _ks(a)
    s = np.empty_like(x)
    c = np.empty_like(x)
    if hyperbolic:
        s[0], c[0] = np.sinh(x[0]), np.cosh(x[0])
    else:
        s[0], c[0] = np.sin(x[0]), np.cos(x[0])
    sign = 1.0 if hyperbolic else -1.0
    for k in range(1, x.shape[0]):
        da = ks[1 : k + 1] * x[1 : k + 1]
        s[k] = np.sum(da * c[k - 1 :: -1][:k], axis=0) / k
        c[k] = sign * np.sum(da * s[k - 1 :: -1][:k], axis=0) / k
    return ComplexJet(a.base, s), ComplexJet(a.base, c)


def exp(x):
    return _exp_jet(x) if isinstance(x, ComplexJet) else np.exp(x)


def log(x):
    return _log_jet(x) if isinstance(x, ComplexJet) else np.log(x)


def sqrt(x):
    return exp(0.5 * log(x)) if isinstance(x, ComplexJet) else np.sqrt(x)


def sin(x):
    return _sincos_jet(x, False)[0] if isinstance(x, ComplexJet) else np.sin(x)


def cos(x):
    return _sincos_jet(x, False)[1] if isinstance(x, ComplexJet) else np.cos(x)


def sinh(x):
    return _sincos_jet(x, True)[0] if isinstance(x, ComplexJet) else np.sinh(x)


def cosh(x):
    return _sincos_jet(x, True)[1] if isinstance(x, ComplexJet) else np.cosh(x)


def polynomial(coeffs, center=0j) -> Callable:
    """Return ``w -> sum coeffs[k] (w - center)^k`` usable on jets and numbers."""
    cs = [complex(c) for c in coeffs]

    def p(z):
        acc = cs[-1] + 0 * z
        for c in cs[-2::-1]:
            acc = acc * (z - center) + c
        return acc

    return p


# -- holomorphic functions --------------------------------------------------
class Holomorphic:
    """A holomorphic function that can be expanded into jets anywhere.

    Subclasses implement :meth:`jet`; plain callables written with the jet
    elementary functions are wrapped by :meth:`from_expression`.
    """

    def jet(self, w0, order: int) -> ComplexJet:
        raise NotImplementedError

    def __call__(self, w):
        return self.jet(w, 0).value

    def derivative(self) -> "Holomorphic":
        return _Derivative(self)

    @staticmethod
    def from_expression(fn: Callable, label: str | None = None) -> "Holomorphic":
        return _Expression(fn, label)

    @staticmethod
    def wrap(obj) -> "Holomorphic":
        if isinstance(obj, Holomorphic):
            return obj
        if callable(obj):
            return _Expression(obj)
        return _Expression(lambda z, c=complex(obj): c + 0 * z, repr(obj))


class _Expression(Holomorphic):
    def __init__(self, fn, label=None):
        self.fn = fn
        self.label = label or getattr(fn, "__name__", "expr")

    def jet(self, w0, order):
        out = self.fn(ComplexJet.variable(w0, order))
        if not isinstance(out, ComplexJet):
            out = ComplexJet.constant(out, np.asarray(w0, dtype=complex), order)
        return out

    def __repr__(self):
        return f"Holomorphic({self.label})"


class _Derivative(Holomorphic):
    def __init__(self, parent: Holomorphic):
        self.parent = parent

    def jet(self, w0, order):
        return self.parent.jet(w0, order + 1).derivative()

    def __repr__(self):
        return f"d/dw {self.parent!r}"
