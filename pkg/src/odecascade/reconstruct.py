"""Scalar solution as a power series in u = F(t), read off the first row of exp(A u)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .cascade import CascadeInit
from .errors import OutsideConvergenceDiskWarning
from .linear import SuperdiagonalMatrix
from .taylor import ProblemSpec, TaylorPoly, tp_add, tp_eval, tp_integrate, tp_substitute

RADIUS_WINDOW = 5
RADIUS_MIN_LENGTH = 8
_NEGLIGIBLE = 1e-300


@dataclass(frozen=True)
class SeriesSolution:
    """y(t) = sum_j u_coeffs[j] * u**j + int_{t0}^t g, with u = F(t) - F(t0).

    ``radius_u`` is the estimated radius in u; NaN marks an indeterminate
    estimate and ``inf`` a terminating series.
    """

    t0: float
    u_coeffs: tuple
    g_antideriv: TaylorPoly
    radius_u: float
    problem: ProblemSpec

    @property
    def F(self) -> TaylorPoly:
        return tp_integrate(self.problem.f, 0.0)

    @property
    def radius_indeterminate(self) -> bool:
        return math.isnan(self.radius_u)

    def u(self, t: float) -> float:
        return tp_eval(self.F, t)

    def __call__(self, t: float) -> float:
        return evaluate(self, t)


def first_row_coefficients(A: SuperdiagonalMatrix) -> np.ndarray:
    """Entries (0, m) of A**m, i.e. a[0] * ... * a[m-1], for m = 0 .. N-1."""
    return np.array([math.prod(A.superdiag[:m]) for m in range(A.dim)])


def first_row_series(init: CascadeInit, problem: ProblemSpec, N: int) -> SeriesSolution:
    if init.N != N:
        raise ValueError(f"cascade initial data has dimension {init.N}, expected {N}")
    row = first_row_coefficients(SuperdiagonalMatrix(init.gauge))
    beta = [float(init.c[0])]
    for m in range(1, N):
        beta.append(row[m] * init.c[m] / math.factorial(m))
    radius = radius_estimate(beta) if N >= RADIUS_MIN_LENGTH else math.nan
    return SeriesSolution(
        t0=problem.t0,
        u_coeffs=tuple(beta),
        g_antideriv=tp_integrate(problem.g, 0.0),
        radius_u=radius,
        problem=problem,
    )


def evaluate(sol: SeriesSolution, t: float) -> float:
    """Horner evaluation in u plus the forcing antiderivative in t.

    Outside the estimated disk the value is still returned, with an
    :class:`OutsideConvergenceDiskWarning`.
    """
    u = sol.u(t)
    if math.isfinite(sol.radius_u) and abs(u) >= sol.radius_u:
        warnings.warn(
            f"t={t} maps to |u|={abs(u):.6g} outside the estimated radius {sol.radius_u:.6g}",
            OutsideConvergenceDiskWarning,
            stacklevel=2,
        )
    acc = 0.0
    for b in reversed(sol.u_coeffs):
        acc = acc * u + b
    return acc + tp_eval(sol.g_antideriv, t)


def t_coefficients(sol: SeriesSolution, order: int) -> TaylorPoly:
    """Expand the reconstructed solution in powers of (t - t0) through ``order``."""
    F = sol.F.padded(order)
    y = tp_substitute(sol.u_coeffs, F)
    return tp_add(y, sol.g_antideriv.padded(order))


def radius_estimate(coeffs) -> float:
    """Windowed Cauchy-Hadamard estimate 1 / max_j |c_j|**(1/j) over the last 5 terms.

    Returns ``inf`` when the whole window is negligible and NaN (indeterminate)
    when fewer than three window terms are nonzero.
    """
    c = np.asarray(coeffs, dtype=float)
    if len(c) < RADIUS_MIN_LENGTH:
        raise ValueError(f"need at least {RADIUS_MIN_LENGTH} coefficients, got {len(c)}")
    j = np.arange(len(c) - RADIUS_WINDOW, len(c))
    tail = np.abs(c[j])
    keep = tail >= _NEGLIGIBLE
    if not keep.any():
        return math.inf
    if keep.sum() < 3:
        return math.nan
    roots = tail[keep] ** (1.0 / j[keep])
    return float(1.0 / roots.max())


@dataclass(frozen=True)
class Domain:
    """Interval of t around t0 on which |F(t) - F(t0)| < radius_u."""

    lo: float
    hi: float
    note: str = ""

    @property
    def indeterminate(self) -> bool:
        return math.isnan(self.lo) or math.isnan(self.hi)


def _boundary(U: np.polynomial.Polynomial, R: float, side: int) -> float:
    # Nearest |U(dt)| = R on one side of dt = 0, located from the polynomial
    # roots and polished by bisection on a bracket around the candidate.
    cands = []
    for target in (R, -R):
        for r in (U - target).roots():
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r.real)) and side * r.real > 0:
                cands.append(r.real)
    if not cands:
        return side * math.inf
    r = min(cands, key=abs)

    def h(x):
        return abs(U(x)) - R

    width = 1e-7 * max(abs(r), 1e-6)
    lo, hi = sorted((r - side * width, r + side * width))
    if h(lo) * h(hi) < 0:
        r = bisect(h, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    return r


def domain_map(sol: SeriesSolution) -> Domain:
    from .oracles import extension_note

    note = extension_note(sol.problem)
    R = sol.radius_u
    if math.isnan(R):
        return Domain(math.nan, math.nan, "indeterminate radius")
    if math.isinf(R):
        return Domain(-math.inf, math.inf, note)
    U = np.polynomial.Polynomial(sol.F.coeffs)
    return Domain(sol.t0 + _boundary(U, R, -1), sol.t0 + _boundary(U, R, +1), note)
