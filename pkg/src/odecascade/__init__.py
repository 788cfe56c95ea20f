"""Scalar first-order IVPs solved through a truncated superdiagonal linear cascade."""

from .cascade import (
    PAPER_EXP,
    PAPER_POWER,
    UNIT,
    CascadeInit,
    Gauge,
    closed_form_aux,
    initial_auxiliary_values,
    resolve_gauge,
)
from .errors import (
    BlowUpError,
    CascadeError,
    CenterMismatchError,
    ConfigError,
    DivergenceError,
    InvalidGaugeError,
    ModelValidityWarning,
    NonFiniteError,
    OutOfDomainError,
    OutsideConvergenceDiskWarning,
    UnsupportedCombinationError,
    WrongSolverError,
)
from .linear import (
    SuperdiagonalMatrix,
    TruncatedSystem,
    build_truncated_system,
    expm_series,
    expm_superdiag,
    matrix_power,
    partial_sum_solution,
    solve,
    solve_constant,
    solve_timedep,
)
from .oracles import ErrorReport, ExampleId, closed_form, compare, example_problem, rk_reference
from .reconstruct import Domain, SeriesSolution, domain_map, evaluate, first_row_series, radius_estimate
from .taylor import (
    Exponential,
    Polynomial,
    PowerFunction,
    ProblemSpec,
    SeriesAtY0,
    TaylorPoly,
    taylor_ivp_coeffs,
    tp_add,
    tp_compose_phi,
    tp_eval,
    tp_integrate,
    tp_mul,
)

__version__ = "0.1.0"
