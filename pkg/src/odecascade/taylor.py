"""Truncated power series (jets) and the Taylor-recurrence IVP solver.

A :class:`TaylorPoly` holds the first ``order + 1`` Taylor coefficients of a
function around ``center``::

    p(t) = c[0] + c[1]*(t - center) + ... + c[order]*(t - center)**order

Products and compositions drop every term above the working order, so the
retained coefficients are exact up to floating point.  Polynomials that are
known exactly (the forcing ``g`` and the time factor ``f`` of a problem) are
zero-padded with :meth:`TaylorPoly.padded` before entering jet arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import CenterMismatchError, DivergenceError, NonFiniteError

__all__ = [
    "TaylorPoly",
    "Polynomial",
    "PowerFunction",
    "Exponential",
    "SeriesAtY0",
    "PhiSpec",
    "ProblemSpec",
    "tp_add",
    "tp_mul",
    "tp_scale",
    "tp_compose_phi",
    "tp_substitute",
    "tp_integrate",
    "tp_derivative",
    "tp_eval",
    "taylor_ivp_coeffs",
]


@dataclass(frozen=True)
class TaylorPoly:
    center: float
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("a TaylorPoly needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise NonFiniteError(f"non-finite coefficient in {coeffs!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", float(self.center))

    @classmethod
    def constant(cls, value, center=0.0, order=0):
        return cls(center, (value,) + (0.0,) * order)

    @classmethod
    def variable(cls, center=0.0, order=1):
        """The identity jet ``t`` expanded around ``center``."""
        if order < 1:
            raise ValueError("the identity jet needs order >= 1")
        return cls(center, (center, 1.0) + (0.0,) * (order - 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def padded(self, order: int) -> "TaylorPoly":
        """Zero-pad (or cut) to ``order``; only meaningful for exact polynomials."""
        c = self.coeffs[: order + 1]
        return TaylorPoly(self.center, c + (0.0,) * (order + 1 - len(c)))

    def truncated(self, order: int) -> "TaylorPoly":
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order} by truncation")
        return TaylorPoly(self.center, self.coeffs[: order + 1])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1.0 and not any(self.coeffs[1:])

    def is_constant(self) -> bool:
        return not any(self.coeffs[1:])

    def __add__(self, other):
        return tp_add(self, other)

    def __mul__(self, other):
        if isinstance(other, TaylorPoly):
            return tp_mul(self, other)
        return tp_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return tp_scale(self, -1.0)

    def __sub__(self, other):
        return tp_add(self, -other)

    def __call__(self, t):
        return tp_eval(self, t)


def _check_centers(a: TaylorPoly, b: TaylorPoly):
    if a.center != b.center:
        raise CenterMismatchError(f"centers differ: {a.center} != {b.center}")


def _from_array(center, arr) -> TaylorPoly:
    return TaylorPoly(center, tuple(arr.tolist()))


def tp_add(a: TaylorPoly, b: TaylorPoly) -> TaylorPoly:
    _check_centers(a, b)
    n = min(a.order, b.order) + 1
    with np.errstate(over="ignore", invalid="ignore"):
        return _from_array(a.center, a.array[:n] + b.array[:n])


def tp_mul(a: TaylorPoly, b: TaylorPoly) -> TaylorPoly:
    """Cauchy product, truncated at the smaller of the two orders."""
    _check_centers(a, b)
    n = min(a.order, b.order) + 1
    with np.errstate(over="ignore", invalid="ignore"):
        prod = np.convolve(a.array[:n], b.array[:n])[:n]
    return _from_array(a.center, prod)


def tp_scale(a: TaylorPoly, k: float) -> TaylorPoly:
    with np.errstate(over="ignore", invalid="ignore"):
        return _from_array(a.center, a.array * float(k))


def tp_substitute(outer: Sequence[float], inner: TaylorPoly, shift: float = 0.0) -> TaylorPoly:
    """Jet of ``sum_k outer[k] * (inner - shift)**k`` at the order of ``inner``.

    Horner's scheme on jets.  For a truncation-exact result the constant term
    of ``inner - shift`` should vanish; otherwise the sum is simply the
    polynomial ``outer`` evaluated on the jet.
    """
    x = inner.array.copy()
    x[0] -= shift
    n = len(x)
    acc = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        for c in reversed(list(outer)):
            acc = np.convolve(acc, x)[:n]
            acc[0] += c
    return _from_array(inner.center, acc)


def _exp_jet(y: np.ndarray) -> np.ndarray:
    # e' = y' e  =>  k e_k = sum_{j=1..k} j y_j e_{k-j}
    n = len(y)
    e = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        e[0] = math.exp(y[0]) if y[0] < 709.0 else math.inf
        jy = np.arange(n) * y
        for k in range(1, n):
            e[k] = np.dot(jy[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return e


# -- phi variants -----------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """phi(y) = sum_k coeffs[k] * y**k."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("polynomial phi needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise NonFiniteError("polynomial phi has non-finite coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, y):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def compose(self, y: TaylorPoly) -> TaylorPoly:
        return tp_substitute(self.coeffs, y)


@dataclass(frozen=True)
class PowerFunction:
    """phi(y) = y**exponent for an integer exponent >= 1."""

    exponent: int

    def __post_init__(self):
        if int(self.exponent) != self.exponent or self.exponent < 1:
            raise ValueError(f"power exponent must be an integer >= 1, got {self.exponent}")
        object.__setattr__(self, "exponent", int(self.exponent))

    def __call__(self, y):
        return y**self.exponent

    def compose(self, y: TaylorPoly) -> TaylorPoly:
        m = self.exponent
        result, base = None, y
        while m:
            if m & 1:
                result = base if result is None else tp_mul(result, base)
            m >>= 1
            if m:
                base = tp_mul(base, base)
        return result


@dataclass(frozen=True)
class Exponential:
    """phi(y) = exp(y)."""

    def __call__(self, y):
        return math.exp(y)

    def compose(self, y: TaylorPoly) -> TaylorPoly:
        return _from_array(y.center, _exp_jet(y.array))


@dataclass(frozen=True)
class SeriesAtY0:
    """phi given by its Taylor coefficients around ``center`` (the initial value y0)."""

    coeffs: tuple
    center: float = 0.0

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("series phi needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise NonFiniteError("series phi has non-finite coefficients")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", float(self.center))

    def __call__(self, y):
        d = y - self.center
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * d + c
        return acc

    def compose(self, y: TaylorPoly) -> TaylorPoly:
        # Terms beyond len(coeffs) are unknown; the jet is exact only while
        # the series is long enough for the working order.
        return tp_substitute(self.coeffs, y, shift=self.center)


PhiSpec = Union[Polynomial, PowerFunction, Exponential, SeriesAtY0]


def tp_compose_phi(phi: PhiSpec, y: TaylorPoly) -> TaylorPoly:
    """Taylor coefficients of ``phi(y(t))`` around ``y.center``, to ``y.order``."""
    return phi.compose(y)


def tp_integrate(p: TaylorPoly, const0: float = 0.0) -> TaylorPoly:
    """Antiderivative with constant term ``const0``; the order grows by one."""
    k = np.arange(1, p.order + 2)
    return _from_array(p.center, np.concatenate(([float(const0)], p.array / k)))


def tp_derivative(p: TaylorPoly) -> TaylorPoly:
    if p.order == 0:
        return TaylorPoly(p.center, (0.0,))
    return _from_array(p.center, p.array[1:] * np.arange(1, p.order + 1))


def tp_eval(p: TaylorPoly, t: float) -> float:
    dt = t - p.center
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * dt + c
    if not math.isfinite(acc):
        raise NonFiniteError(f"series evaluation overflowed at t={t}")
    return acc


# -- problem ----------------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    """The scalar IVP y' = phi(y) * f(t) + g(t), y(t0) = y0.

    ``f`` and ``g`` are polynomials written as coefficient jets around ``t0``;
    they default to the constants 1 and 0.
    """

    t0: float
    y0: float
    phi: PhiSpec
    f: TaylorPoly = field(default=None)
    g: TaylorPoly = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "y0", float(self.y0))
        if self.f is None:
            object.__setattr__(self, "f", TaylorPoly.constant(1.0, self.t0))
        if self.g is None:
            object.__setattr__(self, "g", TaylorPoly.constant(0.0, self.t0))
        for name in ("f", "g"):
            if getattr(self, name).center != self.t0:
                raise CenterMismatchError(f"{name} must be expanded around t0={self.t0}")
        if not math.isfinite(self.y0) or not math.isfinite(self.t0):
            raise NonFiniteError("t0 and y0 must be finite")

    def rhs(self, t: float, y: float) -> float:
        return self.phi(y) * tp_eval(self.f, t) + tp_eval(self.g, t)

    def autonomous(self) -> "ProblemSpec":
        """The same phi with f = 1 and g = 0, i.e. dy/du = phi(y) in u = F(t)."""
        return ProblemSpec(self.t0, self.y0, self.phi)


def taylor_ivp_coeffs(problem: ProblemSpec, order: int) -> TaylorPoly:
    """Taylor coefficients y_0 .. y_order of the analytic solution at ``t0``.

    Fixed-point recurrence: with the jet known through order k, the right-hand
    side is known through order k, and ``y[k+1] = rhs[k] / (k + 1)``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    f = problem.f.padded(order)
    g = problem.g.padded(order)
    y = [problem.y0]
    for k in range(order):
        jet = TaylorPoly(problem.t0, y)
        try:
            w = tp_compose_phi(problem.phi, jet) * f.truncated(k) + g.truncated(k)
        except NonFiniteError:
            raise DivergenceError(k + 1) from None
        nxt = w.coeffs[k] / (k + 1)
        if not math.isfinite(nxt):
            raise DivergenceError(k + 1)
        y.append(nxt)
    return TaylorPoly(problem.t0, y)
