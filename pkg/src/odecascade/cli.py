"""Command-line front end.

Subcommands::

    odecascade solve --config run.json [--out y.csv] [--summary s.txt]
    odecascade partial-sums --config run.json --t 0.5 [--n-max 10]
    odecascade radius --config run.json
    odecascade expm-check -N 10 --gauge paper-power [--s-max 0.5]
    odecascade examples

Exit codes: 0 success, 1 usage/configuration/pipeline error, 2 a tolerance or
validation check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .cascade import Gauge, initial_auxiliary_values, resolve_gauge
from .errors import CascadeError, ConfigError, ModelValidityWarning, OutsideConvergenceDiskWarning
from .linear import SuperdiagonalMatrix, build_truncated_system, expm_series, expm_superdiag, partial_sum_solution, solve
from .oracles import ExampleId, closed_form, compare, example_problem, identify_example, rk_reference
from .reconstruct import SeriesSolution, domain_map, first_row_series
from .taylor import Exponential, Polynomial, PowerFunction, ProblemSpec, SeriesAtY0, TaylorPoly

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2
SUMMARY_COEFFS = 12

_NUM = {"type": "number"}
_POLY = {
    "type": "object",
    "properties": {"poly": {"type": "array", "items": _NUM, "minItems": 1}},
    "required": ["poly"],
    "additionalProperties": False,
}
CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "t0": _NUM,
        "y0": _NUM,
        "phi": {
            "type": "object",
            "properties": {
                "type": {"enum": ["power", "exponential", "polynomial", "series"]},
                "exponent": {"type": "integer", "minimum": 1},
                "coeffs": {"type": "array", "items": _NUM, "minItems": 1},
                "center": _NUM,
            },
            "required": ["type"],
            "additionalProperties": False,
            "allOf": [
                {"if": {"properties": {"type": {"const": "power"}}}, "then": {"required": ["exponent"]}},
                {"if": {"properties": {"type": {"const": "polynomial"}}}, "then": {"required": ["coeffs"]}},
                {"if": {"properties": {"type": {"const": "series"}}}, "then": {"required": ["coeffs"]}},
            ],
        },
        "f": _POLY,
        "g": _POLY,
        "gauge": {
            "type": "object",
            "properties": {
                "type": {"enum": ["unit", "paper-power", "paper-exp", "custom"]},
                "a": {"type": "array", "items": _NUM, "minItems": 1},
            },
            "required": ["type"],
            "additionalProperties": False,
            "if": {"properties": {"type": {"const": "custom"}}},
            "then": {"required": ["a"]},
        },
        "N": {"type": "integer", "minimum": 2},
        "grid": {
            "type": "object",
            "properties": {"min": _NUM, "max": _NUM, "count": {"type": "integer", "minimum": 2}},
            "required": ["min", "max", "count"],
            "additionalProperties": False,
        },
        "oracle": {"enum": ["rk", "ex1", "ex2", "ex3", "ex4", "none"]},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["y0", "phi"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class Grid:
    t_min: float
    t_max: float
    count: int

    def points(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.count)


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSpec
    gauge: Gauge
    N: int = 30
    grid: Optional[Grid] = None
    tol: float = 1e-8
    oracle: str = "rk"
    out: Optional[Path] = None
    summary: Optional[Path] = None

    def __post_init__(self):
        if self.N < 2:
            raise ConfigError("N must be >= 2", "$.N")
        if self.grid is None:
            t0 = self.problem.t0
            object.__setattr__(self, "grid", Grid(t0 - 0.5, t0 + 0.5, 21))
        if self.grid.count < 2:
            raise ConfigError("grid count must be >= 2", "$.grid.count")
        if not self.grid.t_min < self.grid.t_max:
            raise ConfigError("grid min must be < max", "$.grid")


def _phi_from_doc(doc, y0):
    kind = doc["type"]
    if kind == "power":
        return PowerFunction(doc["exponent"])
    if kind == "exponential":
        return Exponential()
    if kind == "polynomial":
        return Polynomial(tuple(doc["coeffs"]))
    return SeriesAtY0(tuple(doc["coeffs"]), doc.get("center", y0))


def parse_config(text) -> RunConfig:
    """Validate a JSON run configuration and fill in defaults."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    error = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(CONFIG_SCHEMA).iter_errors(doc))
    if error is not None:
        raise ConfigError(error.message, error.json_path)

    t0 = float(doc.get("t0", 0.0))
    y0 = float(doc["y0"])
    poly = lambda key: TaylorPoly(t0, tuple(doc[key]["poly"])) if key in doc else None  # noqa: E731
    problem = ProblemSpec(t0, y0, _phi_from_doc(doc["phi"], y0), f=poly("f"), g=poly("g"))

    gdoc = doc.get("gauge", {"type": "unit"})
    gauge = Gauge(gdoc["type"], tuple(gdoc.get("a", ())))
    grid = None
    if "grid" in doc:
        grid = Grid(float(doc["grid"]["min"]), float(doc["grid"]["max"]), int(doc["grid"]["count"]))
    cfg = RunConfig(
        problem=problem,
        gauge=gauge,
        N=int(doc.get("N", 30)),
        grid=grid,
        tol=float(doc.get("tol", 1e-8)),
        oracle=doc.get("oracle", "rk"),
    )
    resolve_gauge(cfg.gauge, cfg.N)
    return cfg


# -- pipeline ----------------------------------------------------------------


@dataclass
class Pipeline:
    cfg: RunConfig
    solution: SeriesSolution
    system: object
    warnings: list


def run_pipeline(cfg: RunConfig) -> Pipeline:
    problem = cfg.problem
    notes = []
    if not problem.f.is_constant() and not problem.g.is_zero():
        msg = "f is non-constant and g is not zero: the time-dependent cascade is not exact for this IVP"
        warnings.warn(msg, ModelValidityWarning, stacklevel=2)
        notes.append(msg)
    init = initial_auxiliary_values(problem, cfg.gauge, cfg.N)
    system = build_truncated_system(init, problem, cfg.N)
    return Pipeline(cfg, first_row_series(init, problem, cfg.N), system, notes)


def _rk_tol(tol: float) -> float:
    return min(max(tol / 100.0, 1e-13), 1e-3)


def _oracle_fn(cfg: RunConfig):
    if cfg.oracle == "none":
        return None
    if cfg.oracle == "rk":
        tol = _rk_tol(cfg.tol)
        return lambda t: rk_reference(cfg.problem, t, tol)
    example = ExampleId(cfg.oracle)
    return lambda t: closed_form(example, cfg.problem.y0, t)


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _open_text(path: Optional[Path], fallback):
    if path is None:
        return fallback, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _summary_lines(pipe: Pipeline, dump_coeffs: bool) -> list:
    cfg, sol = pipe.cfg, pipe.solution
    p = cfg.problem
    dom = domain_map(sol)
    coeffs = sol.u_coeffs if dump_coeffs else sol.u_coeffs[:SUMMARY_COEFFS]
    lines = [
        f"phi: {p.phi!r}",
        f"t0: {_fmt(p.t0)}  y0: {_fmt(p.y0)}",
        f"f: {list(p.f.coeffs)}  g: {list(p.g.coeffs)}",
        f"gauge: {cfg.gauge.kind}  N: {cfg.N}",
        f"series coefficients in u ({len(coeffs)} of {len(sol.u_coeffs)}):",
    ]
    lines += [f"  u^{j}: {_fmt(c)}" for j, c in enumerate(coeffs)]
    lines.append(f"radius_u: {_fmt(sol.radius_u)}")
    lines.append(f"t-domain: ({_fmt(dom.lo)}, {_fmt(dom.hi)})" + (f"  [{dom.note}]" if dom.note else ""))
    return lines


def cmd_solve(cfg: RunConfig, dump_coeffs: bool = False, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pipe = run_pipeline(cfg)
        grid = cfg.grid.points()
        y_matrix = [float(solve(pipe.system, t)[0]) for t in grid]
        oracle = _oracle_fn(cfg)
        report = compare(pipe.solution, oracle, grid) if oracle else None
        y_series = [pipe.solution(t) for t in grid] if report is None else [q.y_series for q in report.per_point]
    outside = sum(issubclass(w.category, OutsideConvergenceDiskWarning) for w in caught)

    header = ["t", "y_series", "y_matrix"] + (["y_oracle", "abs_err"] if report else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for i, t in enumerate(grid):
        row = [_fmt(t), _fmt(y_series[i]), _fmt(y_matrix[i])]
        if report:
            q = report.per_point[i]
            row += [_fmt(q.y_ref), _fmt(q.abs_err)]
        writer.writerow(row)
    out, close = _open_text(cfg.out, stdout)
    try:
        out.write(buf.getvalue())
    finally:
        if close:
            out.close()

    lines = _summary_lines(pipe, dump_coeffs)
    status = EXIT_OK
    if report:
        lines.append(f"oracle: {cfg.oracle}  max_abs_err: {_fmt(report.max_abs_err)}  max_rel_err: {_fmt(report.max_rel_err)}")
        lines += [f"  oracle failed at t={_fmt(q.t)}: {q.failure}" for q in report.flagged]
        if not report.max_abs_err <= cfg.tol:
            status = EXIT_TOLERANCE
    else:
        lines.append("oracle: none")
    warn_lines = list(pipe.warnings)
    if outside:
        warn_lines.append(f"{outside} grid point(s) lie outside the estimated convergence disk")
    lines += [f"warning: {w}" for w in warn_lines]
    lines.append(f"tol: {_fmt(cfg.tol)}  status: {'PASS' if status == EXIT_OK else 'FAIL'}")
    summ, close = _open_text(cfg.summary, stderr)
    try:
        summ.write("\n".join(lines) + "\n")
    finally:
        if close:
            summ.close()
    return status


def cmd_expm_check(N: int, gauge: Gauge, s_max: float, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if not 2 <= N <= 64:
        print(f"error: N must lie in [2, 64], got {N}", file=sys.stderr)
        return EXIT_USAGE
    A = SuperdiagonalMatrix(resolve_gauge(gauge, N))
    exact = expm_superdiag(A, s_max)
    print(f"expm check: N={N} gauge={gauge.kind} s={_fmt(s_max)}", file=stdout)
    print(f"{'n':>3}  {'max_err':>24}  {'bound':>24}  ok", file=stdout)
    ok_all = True
    for n in range(1, N + 1):
        S, bound = expm_series(A, s_max, n)
        err = float(np.abs(S - exact).max())
        ok = err <= bound
        ok_all &= ok
        print(f"{n:>3}  {_fmt(err):>24}  {_fmt(bound):>24}  {'yes' if ok else 'NO'}", file=stdout)
    return EXIT_OK if ok_all else EXIT_TOLERANCE


def cmd_partial_sums(cfg: RunConfig, t: float, n_max: int, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if n_max < 1:
        print("error: n-max must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    pipe = run_pipeline(cfg)
    y_full = float(solve(pipe.system, t)[0])
    print(f"partial sums at t={_fmt(t)} (N={cfg.N}, full truncated solution {_fmt(y_full)})", file=stdout)
    print(f"{'n':>3}  {'y_n':>24}  {'abs_diff':>24}", file=stdout)
    status = EXIT_OK
    for n in range(n_max + 1):
        y_n = float(partial_sum_solution(pipe.system, t, n)[0])
        diff = abs(y_n - y_full)
        print(f"{n:>3}  {_fmt(y_n):>24}  {_fmt(diff):>24}", file=stdout)
        if n >= cfg.N and diff > 1e-13:
            status = EXIT_TOLERANCE
    return status


def cmd_radius(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    pipe = run_pipeline(cfg)
    dom = domain_map(pipe.solution)
    print(f"radius_u: {_fmt(pipe.solution.radius_u)}", file=stdout)
    print(f"t-domain: ({_fmt(dom.lo)}, {_fmt(dom.hi)})", file=stdout)
    if dom.note:
        print(f"note: {dom.note}", file=stdout)
    return EXIT_OK


# name, example, y0, gauge, grid
EXAMPLE_RUNS = (
    ("ex1", ExampleId.EX1_LINEAR_FORCED, 2.0, Gauge("unit"), (-1.0, 1.0)),
    ("ex2", ExampleId.EX2_QUADRATIC, 0.5, Gauge("paper-power"), (-1.0, 1.0)),
    ("ex3", ExampleId.EX3_EXPONENTIAL, 0.0, Gauge("paper-exp"), (-0.5, 0.5)),
    ("ex4", ExampleId.EX4_QUADRATIC_TIMES_T, 1.0, Gauge("paper-power"), (-1.0, 1.0)),
)
EXAMPLE_SUBCASES = (("ex2 (y0=0)", ExampleId.EX2_QUADRATIC, 0.0, Gauge("paper-power"), (-1.0, 1.0)),)


def run_example(example: ExampleId, y0: float, gauge: Gauge, span, N: int = 40, count: int = 21):
    cfg = RunConfig(example_problem(example, y0), gauge, N=N, grid=Grid(span[0], span[1], count), oracle="none")
    pipe = run_pipeline(cfg)
    grid = cfg.grid.points()
    series = compare(pipe.solution, lambda t: closed_form(example, y0, t), grid)
    matrix = compare(lambda t: float(solve(pipe.system, t)[0]), lambda t: closed_form(example, y0, t), grid)
    return series, matrix


def cmd_examples(tol: float = 1e-8, stdout=None) -> int:
    stdout = stdout or sys.stdout
    passed = 0
    ok_sub = True
    for label, example, y0, gauge, span in EXAMPLE_RUNS + EXAMPLE_SUBCASES:
        series, matrix = run_example(example, y0, gauge, span)
        err = max(series.max_abs_err, matrix.max_abs_err)
        ok = err <= tol and not series.flagged
        print(
            f"{label:<11} y0={_fmt(y0):<4} grid=[{_fmt(span[0])}, {_fmt(span[1])}]  "
            f"max_abs_err={err:.3e}  {'PASS' if ok else 'FAIL'}",
            file=stdout,
        )
        if label in {r[0] for r in EXAMPLE_RUNS}:
            passed += ok
        else:
            ok_sub &= ok
    print(f"{passed}/{len(EXAMPLE_RUNS)} examples passed", file=stdout)
    return EXIT_OK if passed == len(EXAMPLE_RUNS) and ok_sub else EXIT_TOLERANCE


# -- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="odecascade", description="Solve scalar IVPs through a truncated linear cascade.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config_required=True):
        p.add_argument("--config", type=Path, required=config_required, help="JSON run configuration")
        p.add_argument("-N", type=int, help="truncation dimension (overrides config)")
        p.add_argument("--gauge", choices=["unit", "paper-power", "paper-exp"], help="gauge preset (overrides config)")
        p.add_argument("--tol", type=float, help="comparison tolerance (overrides config)")

    p = sub.add_parser("solve", help="evaluate series and matrix solutions on a grid")
    common(p)
    p.add_argument("--out", type=Path, help="CSV output path (default: stdout)")
    p.add_argument("--summary", type=Path, help="summary output path (default: stderr)")
    p.add_argument("--dump-coeffs", action="store_true", help="list every series coefficient in the summary")

    p = sub.add_parser("partial-sums", help="partial-sum approximants at one time")
    common(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n-max", type=int, help="largest partial sum (default: N)")

    p = sub.add_parser("radius", help="estimated radius of convergence and t-domain")
    common(p)

    p = sub.add_parser("expm-check", help="partial sums of exp(A s) against the exact exponential")
    p.add_argument("-N", type=int, default=10)
    p.add_argument("--gauge", choices=["unit", "paper-power", "paper-exp"], default="unit")
    p.add_argument("--s-max", type=float, default=1.0)

    p = sub.add_parser("examples", help="reproduce the four built-in examples")
    p.add_argument("--tol", type=float, default=1e-8)
    return parser


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config.read_bytes())
    overrides = {}
    if args.N is not None:
        overrides["N"] = args.N
    if args.gauge is not None:
        overrides["gauge"] = Gauge(args.gauge)
    if args.tol is not None:
        overrides["tol"] = args.tol
    if getattr(args, "out", None) is not None:
        overrides["out"] = args.out
    if getattr(args, "summary", None) is not None:
        overrides["summary"] = args.summary
    cfg = replace(cfg, **overrides)
    resolve_gauge(cfg.gauge, cfg.N)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "expm-check":
            return cmd_expm_check(args.N, Gauge(args.gauge), args.s_max)
        if args.command == "examples":
            return cmd_examples(args.tol)
        cfg = _load_config(args)
        if args.command == "solve":
            return cmd_solve(cfg, dump_coeffs=args.dump_coeffs)
        if args.command == "partial-sums":
            return cmd_partial_sums(cfg, args.t, args.n_max if args.n_max is not None else cfg.N)
        return cmd_radius(cfg)
    except (CascadeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
