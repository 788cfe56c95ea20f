"""The truncated superdiagonal system X' = A f(t) X + b(t) and its solution.

Truncation keeps x_0 .. x_{N-1}; the last equation becomes x_{N-1}' = 0, so
A is strictly upper triangular and nilpotent and its exponential is a finite
sum.  Matrices are returned as dense ``numpy`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cascade import CascadeInit
from .errors import WrongSolverError
from .taylor import ProblemSpec, TaylorPoly, tp_eval, tp_integrate


@dataclass(frozen=True)
class SuperdiagonalMatrix:
    """N x N matrix whose only nonzeros are superdiag[j] at (j, j+1)."""

    superdiag: tuple

    def __post_init__(self):
        object.__setattr__(self, "superdiag", tuple(float(a) for a in self.superdiag))

    @property
    def dim(self) -> int:
        return len(self.superdiag) + 1

    def dense(self) -> np.ndarray:
        return np.diag(np.asarray(self.superdiag, dtype=float), k=1)

    def norm(self) -> float:
        """Induced infinity norm (max absolute row sum)."""
        return max((abs(a) for a in self.superdiag), default=0.0)


@dataclass(frozen=True)
class TruncatedSystem:
    A: SuperdiagonalMatrix
    f: TaylorPoly
    g: TaylorPoly
    C: tuple
    t0: float

    def __post_init__(self):
        if len(self.C) != self.A.dim:
            raise ValueError(f"initial vector has {len(self.C)} entries, A is {self.A.dim}-dimensional")

    @property
    def N(self) -> int:
        return self.A.dim

    def F(self, t: float) -> float:
        """int_{t0}^t f(s) ds, exact for polynomial f."""
        return tp_eval(tp_integrate(self.f, 0.0), t)

    def G(self, t: float) -> float:
        """int_{t0}^t g(s) ds, exact for polynomial g."""
        return tp_eval(tp_integrate(self.g, 0.0), t)


def build_truncated_system(init: CascadeInit, problem: ProblemSpec, N: int) -> TruncatedSystem:
    if N < 2:
        raise ValueError(f"truncation N must be >= 2, got {N}")
    if init.N != N or len(init.gauge) != N - 1:
        raise ValueError(f"cascade initial data has dimension {init.N}, expected {N}")
    return TruncatedSystem(
        A=SuperdiagonalMatrix(init.gauge),
        f=problem.f,
        g=problem.g,
        C=tuple(init.c),
        t0=problem.t0,
    )


def matrix_power(A: SuperdiagonalMatrix, p: int) -> np.ndarray:
    """A**p; only the p-th superdiagonal is nonzero, holding products of p entries."""
    if p < 0:
        raise ValueError("power must be nonnegative")
    N = A.dim
    out = np.zeros((N, N))
    if p >= N:
        return out
    a = np.asarray(A.superdiag)
    for i in range(N - p):
        out[i, i + p] = math.prod(a[i : i + p])
    return out


def expm_superdiag(A: SuperdiagonalMatrix, s: float) -> np.ndarray:
    """Exact exp(A s): entry (i, i+m) = a[i]...a[i+m-1] * s**m / m!.

    Built diagonal by diagonal with the same multiply-then-divide recurrence
    that the dense series in :func:`expm_series` performs, so both agree
    bit for bit once the series has run past the nilpotency index.
    """
    N = A.dim
    a_s = np.asarray(A.superdiag, dtype=float) * s
    E = np.eye(N)
    diag = np.ones(N)
    for m in range(1, N):
        diag = diag[: N - m] * a_s[m - 1 :] / m
        idx = np.arange(N - m)
        E[idx, idx + m] = diag
    return E


def exp_tail_bound(x: float, n: int) -> float:
    """sum_{j >= n} x**j / j! for x >= 0."""
    if not math.isfinite(x):
        return math.inf
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    term, total, j = 1.0, 1.0 if n == 0 else 0.0, 0
    while True:
        j += 1
        term = term * x / j
        if j >= n:
            if term == 0.0 or (j > x and term <= total * 1e-17):
                return total + term
            total += term
        if math.isinf(term):
            return math.inf


def expm_series(A: SuperdiagonalMatrix, s: float, n: int):
    """Partial sum S_n = I + sum_{j=1}^{n-1} (A s)**j / j! and its remainder bound.

    The bound is the tail of the scalar exponential series at ||A s|| in the
    max-row-sum norm, which dominates ||exp(A s) - S_n|| and hence every
    entry of the difference.
    """
    if n < 1:
        raise ValueError("number of series terms must be >= 1")
    As = A.dense() * s
    N = A.dim
    S = np.eye(N)
    term = np.eye(N)
    for j in range(1, min(n, N)):
        term = term @ As / j
        S = S + term
    x = float(np.abs(As).sum(axis=1).max())
    return S, exp_tail_bound(x, n)


def _forcing_term(sys: TruncatedSystem, t: float) -> np.ndarray:
    # b(s) = g(s) e_0 and column 0 of any unit upper-triangular exp(A u) is
    # e_0, so the variation-of-constants integral reduces to (int g, 0, ...).
    out = np.zeros(sys.N)
    out[0] = sys.G(t)
    return out


def solve_constant(sys: TruncatedSystem, t: float) -> np.ndarray:
    """X(t) = exp(A (t - t0)) C + int_{t0}^t exp(A (t - s)) b(s) ds."""
    if not sys.f.is_one():
        raise WrongSolverError("f is not identically 1; use solve_timedep")
    E = expm_superdiag(sys.A, t - sys.t0)
    return E @ np.asarray(sys.C) + _forcing_term(sys, t)


def solve_timedep(sys: TruncatedSystem, t: float) -> np.ndarray:
    """X(t) = exp(A F(t)) C + int_{t0}^t exp(A (F(t) - F(r))) b(r) dr."""
    E = expm_superdiag(sys.A, sys.F(t))
    return E @ np.asarray(sys.C) + _forcing_term(sys, t)


def solve(sys: TruncatedSystem, t: float) -> np.ndarray:
    if sys.f.is_one():
        return solve_constant(sys, t)
    return solve_timedep(sys, t)


def partial_sum_solution(sys: TruncatedSystem, t: float, n: int) -> np.ndarray:
    """Approximant X_n(t) with exp(M) replaced by its n-th partial sum; X_0 = C."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    C = np.asarray(sys.C, dtype=float)
    if n == 0:
        return C.copy()
    S, _ = expm_series(sys.A, sys.F(t), n)
    return S @ C + _forcing_term(sys, t)
