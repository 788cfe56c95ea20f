"""Gauge coefficients and initial auxiliary values of the linear cascade.

The cascade variables obey ``x_j' = a[j] * x_{j+1}`` (times ``f(t)`` in the
time-dependent case), with ``x_0 = y`` and ``x_1 = phi(y) / a[0]``.  Only the
products ``prod_a[j] * c[j]`` are gauge independent: they equal the
``(j-1)``-th derivative of ``phi(y(t))`` at ``t0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidGaugeError, UnsupportedCombinationError
from .taylor import (
    Exponential,
    PhiSpec,
    PowerFunction,
    ProblemSpec,
    taylor_ivp_coeffs,
    tp_compose_phi,
)

GAUGE_KINDS = ("unit", "paper-power", "paper-exp", "custom")


@dataclass(frozen=True)
class Gauge:
    """Choice of the superdiagonal entries a[j] = a_{j,j+1}.

    ``unit``        a[j] = 1
    ``paper-power`` a[j] = j + 1 (natural for phi = y**2)
    ``paper-exp``   a[0] = 1, a[j] = j for j >= 1 (natural for phi = exp)
    ``custom``      a[j] = values[j]
    """

    kind: str = "unit"
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in GAUGE_KINDS:
            raise InvalidGaugeError(f"unknown gauge kind {self.kind!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.kind == "custom" and any(v == 0.0 for v in self.values):
            raise InvalidGaugeError("custom gauge entries must be nonzero")

    @classmethod
    def custom(cls, values):
        return cls("custom", tuple(values))


UNIT = Gauge("unit")
PAPER_POWER = Gauge("paper-power")
PAPER_EXP = Gauge("paper-exp")


def resolve_gauge(gauge: Gauge, N: int) -> tuple:
    """The N-1 superdiagonal entries of the N-dimensional truncation."""
    if N < 2:
        raise ValueError(f"truncation N must be >= 2, got {N}")
    n = N - 1
    if gauge.kind == "unit":
        a = (1.0,) * n
    elif gauge.kind == "paper-power":
        a = tuple(float(j + 1) for j in range(n))
    elif gauge.kind == "paper-exp":
        a = (1.0,) + tuple(float(j) for j in range(1, n))
    else:
        if len(gauge.values) < n:
            raise InvalidGaugeError(
                f"custom gauge has {len(gauge.values)} entries, N={N} needs {n}"
            )
        a = gauge.values[:n]
    if any(v == 0.0 or not math.isfinite(v) for v in a):
        raise InvalidGaugeError("gauge entries must be finite and nonzero")
    return a


def _cumulative_products(a) -> tuple:
    prod = [1.0]
    for v in a:
        prod.append(prod[-1] * v)
    return tuple(prod)


@dataclass(frozen=True)
class CascadeInit:
    gauge: tuple
    c: tuple
    prod_a: tuple

    @property
    def N(self) -> int:
        return len(self.c)

    def derivatives(self) -> tuple:
        """prod_a[j] * c[j], the gauge-invariant part of the initial vector."""
        return tuple(p * c for p, c in zip(self.prod_a, self.c))


def _cascade_problem(problem: ProblemSpec) -> ProblemSpec:
    # With f != 1 the cascade lives in u = F(t), where dy/du = phi(y); g is
    # carried separately in b(t) and only consistent when it vanishes.
    if problem.f.is_one():
        return problem
    return problem.autonomous()


def initial_auxiliary_values(problem: ProblemSpec, gauge: Gauge, N: int) -> CascadeInit:
    a = resolve_gauge(gauge, N)
    prod_a = _cumulative_products(a)
    y = taylor_ivp_coeffs(_cascade_problem(problem), N)
    w = tp_compose_phi(problem.phi, y).coeffs
    c = [problem.y0]
    for j in range(1, N):
        c.append(math.factorial(j - 1) * w[j - 1] / prod_a[j])
    return CascadeInit(a, tuple(c), prod_a)


def closed_form_aux(phi: PhiSpec, gauge: Gauge, y0: float, N: int) -> CascadeInit:
    """Initial values from the explicit cascade variables y**(j+1) or exp(j*y)."""
    a = resolve_gauge(gauge, N)
    if isinstance(phi, PowerFunction) and phi.exponent == 2 and gauge.kind == "paper-power":
        c = tuple(y0 ** (j + 1) for j in range(N))
    elif isinstance(phi, Exponential) and gauge.kind == "paper-exp":
        c = (float(y0),) + tuple(math.exp(j * y0) for j in range(1, N))
    else:
        raise UnsupportedCombinationError(
            f"no closed-form cascade for phi={phi!r} with gauge {gauge.kind!r}"
        )
    return CascadeInit(a, c, _cumulative_products(a))
