import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odecascade.errors import CenterMismatchError, DivergenceError, NonFiniteError
from odecascade.taylor import (
    Exponential,
    Polynomial,
    PowerFunction,
    ProblemSpec,
    SeriesAtY0,
    TaylorPoly,
    taylor_ivp_coeffs,
    tp_add,
    tp_compose_phi,
    tp_derivative,
    tp_eval,
    tp_integrate,
    tp_mul,
)


def brute_convolution(a, b, order):
    out = [0.0] * (order + 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if i + j <= order:
                out[i + j] += ai * bj
    return out


def coeffs_close(p, expected, rtol=1e-15, atol=1e-15):
    np.testing.assert_allclose(p.coeffs, expected, rtol=rtol, atol=atol)


# -- construction ----------------------------------------------------------------


def test_order_matches_length():
    p = TaylorPoly(0.0, (1, 2, 3))
    assert p.order == 2
    assert p.coeffs == (1.0, 2.0, 3.0)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_constructor_rejects_non_finite(bad):
    with pytest.raises(NonFiniteError):
        TaylorPoly(0.0, (1.0, bad))


def test_problem_rejects_off_center_forcing():
    with pytest.raises(CenterMismatchError):
        ProblemSpec(0.0, 1.0, Exponential(), g=TaylorPoly(1.0, (1.0,)))


# -- add / mul -------------------------------------------------------------------


def test_add_cancellation():
    s = tp_add(TaylorPoly(0, (1, 1)), TaylorPoly(0, (1, -1)))
    assert s.coeffs == (2.0, 0.0)


def test_add_zero_identity():
    p = TaylorPoly(0.5, (0.3, -1.2, 4.0))
    assert tp_add(p, TaylorPoly(0.5, (0, 0, 0))) == p


def test_add_arithmetic():
    assert tp_add(TaylorPoly(0, (0.5, 0.25)), TaylorPoly(0, (0.5, 0.75))).coeffs == (1.0, 1.0)


def test_add_truncates_to_min_order():
    assert tp_add(TaylorPoly(0, (1, 2, 3)), TaylorPoly(0, (1,))).order == 0


def test_center_mismatch():
    with pytest.raises(CenterMismatchError):
        tp_add(TaylorPoly(0, (1,)), TaylorPoly(1, (1,)))
    with pytest.raises(CenterMismatchError):
        tp_mul(TaylorPoly(0, (1,)), TaylorPoly(1, (1,)))


def test_mul_difference_of_squares():
    p = tp_mul(TaylorPoly(0, (1, 1, 0)), TaylorPoly(0, (1, -1, 0)))
    assert p.coeffs == (1.0, 0.0, -1.0)


def test_mul_one_identity():
    p = TaylorPoly(0, (0.1, 0.2, 0.3))
    assert tp_mul(p, TaylorPoly(0, (1, 0, 0))) == p


def test_mul_convolution():
    assert tp_mul(TaylorPoly(0, (1, 1, 1)), TaylorPoly(0, (1, 1, 1))).coeffs == (1.0, 2.0, 3.0)


unit_coeffs = st.lists(st.floats(-1, 1), min_size=6, max_size=6)


@settings(max_examples=200, deadline=None)
@given(unit_coeffs, unit_coeffs, unit_coeffs)
def test_mul_commutes_and_associates(a, b, c):
    A, B, C = (TaylorPoly(0.0, x) for x in (a, b, c))
    coeffs_close(tp_mul(A, B), tp_mul(B, A).coeffs, rtol=0, atol=1e-14)
    coeffs_close(tp_mul(tp_mul(A, B), C), tp_mul(A, tp_mul(B, C)).coeffs, rtol=0, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(unit_coeffs, unit_coeffs)
def test_mul_matches_brute_convolution(a, b):
    coeffs_close(tp_mul(TaylorPoly(0, a), TaylorPoly(0, b)), brute_convolution(a, b, 5), atol=1e-15)


# -- composition -------------------------------------------------------------------


def test_exp_of_identity():
    p = tp_compose_phi(Exponential(), TaylorPoly(0, (0, 1, 0, 0)))
    coeffs_close(p, (1, 1, 0.5, 1 / 6))


def test_square_of_constant():
    assert tp_compose_phi(PowerFunction(2), TaylorPoly(0, (1.5,))).coeffs == (2.25,)


def test_square_of_geometric_series():
    # (1 - t)**-2 = sum (k+1) t**k
    y = (1.0, 1.0, 1.0, 1.0)
    p = tp_compose_phi(PowerFunction(2), TaylorPoly(0, y))
    assert p.coeffs == tuple(brute_convolution(y, y, 3)) == (1.0, 2.0, 3.0, 4.0)


def test_exp_of_log1p_is_linear():
    order = 12
    log1p = [0.0] + [(-1) ** (k + 1) / k for k in range(1, order + 1)]
    p = tp_compose_phi(Exponential(), TaylorPoly(0, log1p))
    coeffs_close(p, [1.0, 1.0] + [0.0] * (order - 1), atol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
def test_power_matches_repeated_convolution(m):
    y = [0.3, -0.7, 0.2, 0.9, -0.1, 0.4]
    expected = [1.0] + [0.0] * 5
    for _ in range(m):
        expected = brute_convolution(expected, y, 5)
    coeffs_close(tp_compose_phi(PowerFunction(m), TaylorPoly(0, y)), expected, rtol=1e-13, atol=1e-15)


def test_polynomial_horner_matches_expansion():
    coeffs = (0.5, -1.0, 0.25, 2.0)
    y = [0.4, 0.3, -0.2, 0.1, 0.05]
    expected = [0.0] * 5
    power = [1.0, 0, 0, 0, 0]
    for c in coeffs:
        expected = [e + c * p for e, p in zip(expected, power)]
        power = brute_convolution(power, y, 4)
    coeffs_close(tp_compose_phi(Polynomial(coeffs), TaylorPoly(0, y)), expected, atol=1e-15)


def test_series_phi_matches_exponential():
    y0 = 0.3
    series = SeriesAtY0(tuple(math.exp(y0) / math.factorial(k) for k in range(20)), center=y0)
    y = TaylorPoly(0, (y0, 0.5, -0.25, 0.125, 0.3))
    coeffs_close(tp_compose_phi(series, y), tp_compose_phi(Exponential(), y).coeffs, rtol=1e-14)
    assert series(y0 + 0.1) == pytest.approx(math.exp(y0 + 0.1), rel=1e-14)


def test_invalid_phi():
    with pytest.raises(ValueError):
        PowerFunction(0)
    with pytest.raises(ValueError):
        Polynomial(())
    with pytest.raises(NonFiniteError):
        SeriesAtY0((1.0, math.nan))


# -- integrate / eval -------------------------------------------------------------


def test_integrate_constant():
    assert tp_integrate(TaylorPoly(0, (1,)), 0).coeffs == (0.0, 1.0)


def test_integrate_forcing_of_first_example():
    assert tp_integrate(TaylorPoly(0, (0, -1)), 0).coeffs == (0.0, 0.0, -0.5)


def test_integrate_termwise():
    coeffs_close(tp_integrate(TaylorPoly(0, (1, 1, 1)), 5), (5, 1, 0.5, 1 / 3))


def test_derivative_inverts_integrate_exactly_when_division_is_exact():
    # coefficient k is a multiple of k+1, so p[k]/(k+1) is an exact integer
    for order in range(31):
        p = TaylorPoly(0.0, [(k + 1) * (k - 7) for k in range(order + 1)])
        assert tp_derivative(tp_integrate(p, 2.5)) == p


# p[k]/(k+1) must stay a normal float; subnormal quotients lose bits
normal_floats = st.floats(-1e3, 1e3).filter(lambda x: x == 0 or abs(x) > 1e-290)


@settings(max_examples=100, deadline=None)
@given(st.lists(normal_floats, min_size=1, max_size=31), st.floats(-10, 10))
def test_derivative_inverts_integrate_to_one_ulp(coeffs, c0):
    p = TaylorPoly(0.0, coeffs)
    back = tp_derivative(tp_integrate(p, c0))
    for x, y in zip(back.coeffs, p.coeffs):
        assert abs(x - y) <= math.ulp(y)


def test_eval_partial_sum_of_e():
    assert tp_eval(TaylorPoly(0, (1, 1, 0.5, 1 / 6)), 1.0) == pytest.approx(8 / 3, rel=1e-15)


def test_eval_at_center():
    p = TaylorPoly(2.0, (3.25, 9.0, -4.0))
    assert tp_eval(p, 2.0) == 3.25


def test_eval_geometric():
    assert tp_eval(TaylorPoly(0, (0.5, 0.25, 0.125, 0.0625)), 1.0) == 0.9375


def test_eval_overflow():
    with pytest.raises(NonFiniteError):
        tp_eval(TaylorPoly(0, (1e300, 1e300, 1e300)), 1e10)


# -- Taylor recurrence ---------------------------------------------------------------


def test_ivp_quadratic():
    p = taylor_ivp_coeffs(ProblemSpec(0, 0.5, PowerFunction(2)), 3)
    assert p.coeffs == (0.5, 0.25, 0.125, 0.0625)


def test_ivp_exponential():
    p = taylor_ivp_coeffs(ProblemSpec(0, 0.0, Exponential()), 3)
    coeffs_close(p, (0, 1, 0.5, 1 / 3))


def test_ivp_constant_solution():
    p = taylor_ivp_coeffs(ProblemSpec(0, 1.7, Polynomial((0.0,))), 6)
    assert p.coeffs == (1.7,) + (0.0,) * 6


def test_ivp_linear_growth_gives_inverse_factorials():
    p = taylor_ivp_coeffs(ProblemSpec(0, 1.0, Polynomial((0.0, 1.0))), 20)
    for k, c in enumerate(p.coeffs):
        assert c == pytest.approx(1 / math.factorial(k), rel=1e-15)


def test_ivp_quadratic_geometric_to_order_30():
    p = taylor_ivp_coeffs(ProblemSpec(0, 0.5, PowerFunction(2)), 30)
    for k, c in enumerate(p.coeffs):
        assert c == pytest.approx(0.5 ** (k + 1), rel=1e-13)


def test_ivp_with_time_factor_and_forcing():
    # y' = y*t + 1, y(0)=0: y = t + t**3/3 + t**5/15 + ...
    p = ProblemSpec(0, 0.0, Polynomial((0.0, 1.0)), f=TaylorPoly(0, (0, 1)), g=TaylorPoly(0, (1,)))
    coeffs_close(taylor_ivp_coeffs(p, 5), (0, 1, 0, 1 / 3, 0, 1 / 15))


def test_ivp_divergence_names_order():
    with pytest.raises(DivergenceError) as info:
        taylor_ivp_coeffs(ProblemSpec(0, 1e200, PowerFunction(2)), 5)
    assert info.value.order == 1


def test_ivp_requires_positive_order():
    with pytest.raises(ValueError):
        taylor_ivp_coeffs(ProblemSpec(0, 1.0, Exponential()), 0)
