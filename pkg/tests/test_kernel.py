import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from efros import kernel, specfun
from efros.errors import CancellationError, DomainError, EfrosError
from efros.kernel import KernelParams, Method

# f_{nu,mu}(t) from mpmath's Talbot inversion of s^-mu exp(-s^nu) at 40 digits,
# cross-checked at 60 digits (agreement better than 1e-47)
TALBOT = [
    (0.3, 0.7, 2.0, 0.36522161508747657812),
    (0.75, 0.25, 0.5, 0.7498065906304117232),
    (0.6, 1.5, 0.3, 0.03532858795800693701),
    (0.4, -0.6, 0.2, -0.0238128958044781426),
    (0.8, 0.1, 0.5, 0.8938764106453261951),
    (0.5, 2.3, 1.0, 0.21240792840511324188),
    (0.25, 0.0, 3.0, 0.029423744328190023405),
]


def levy_half(t):
    return math.exp(-0.25 / t) / (2 * math.sqrt(math.pi) * t**1.5)


def half_half(t):
    return math.exp(-0.25 / t) / math.sqrt(math.pi * t)


def third_two_thirds(t):
    return special.kv(1 / 3, 2 / math.sqrt(27 * t)) / (math.pi * math.sqrt(t))


def central_difference(fn, x, h):
    """Central difference with one Richardson step."""
    d1 = (fn(x + h) - fn(x - h)) / (2 * h)
    d2 = (fn(x + h / 2) - fn(x - h / 2)) / h
    return (4 * d2 - d1) / 3


# parameters ------------------------------------------------------------------


@pytest.mark.parametrize("nu", [0.0, 1.0, -0.2, 1.5, float("nan")])
def test_params_reject_nu_outside_unit_interval(nu):
    with pytest.raises(DomainError):
        KernelParams(nu, 0.0)


def test_params_reject_non_finite_mu():
    with pytest.raises(DomainError):
        KernelParams(0.5, float("inf"))


@pytest.mark.parametrize("t", [0.0, -1.0, float("inf")])
def test_routes_reject_bad_t(t):
    with pytest.raises(DomainError):
        kernel.eval_auto(KernelParams(0.5, 0.2), t)


# independent oracles -----------------------------------------------------------


@pytest.mark.parametrize("nu, mu, t, expected", TALBOT)
def test_auto_and_contour_match_talbot(nu, mu, t, expected):
    p = KernelParams(nu, mu)
    assert kernel.eval_auto(p, t).value == pytest.approx(expected, rel=1e-10)
    assert kernel.eval_contour(p, t).value == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("nu, mu, t, expected", [c for c in TALBOT if c[1] < 1])
def test_real_axis_route_matches_talbot(nu, mu, t, expected):
    assert kernel.eval_stankovic(KernelParams(nu, mu), t).value == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("nu, mu, t, expected", [c for c in TALBOT if c[1] > 1])
def test_extension_route_matches_talbot(nu, mu, t, expected):
    assert kernel.eval_extended(KernelParams(nu, mu), t).value == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("t", [0.25, 0.5, 1.0, 2.0, 5.0, 10.0])
def test_integral_routes_reproduce_closed_forms(t):
    assert kernel.eval_stankovic(KernelParams(0.5, 0.0), t).value == pytest.approx(levy_half(t), rel=1e-8)
    assert kernel.eval_stankovic(KernelParams(0.5, 0.5), t).value == pytest.approx(half_half(t), rel=1e-8)
    assert kernel.eval_contour(KernelParams(1 / 3, 2 / 3), t).value == pytest.approx(third_two_thirds(t), rel=1e-8)
    assert kernel.eval_stankovic(KernelParams(1 / 3, 2 / 3), t).value == pytest.approx(third_two_thirds(t), rel=1e-8)


@pytest.mark.parametrize("t", [0.5, 2.0, 4.0])
def test_half_half_closed_form_is_not_the_t_free_variant(t):
    value = kernel.eval_stankovic(KernelParams(0.5, 0.5), t).value
    assert abs(value - math.exp(-0.25 / t) / math.sqrt(math.pi)) > 1e-3 * value


def test_closed_form_table():
    assert kernel.closed_form(0.5, 0.0, 1.0) == pytest.approx(0.2196956447, abs=1e-10)
    assert kernel.closed_form(0.4, 0.0, 1.0) is None
    res = kernel.eval_auto(KernelParams(0.5, 0.0), 1.0)
    assert res.method is Method.CLOSED_FORM


# mu = 0 representations -----------------------------------------------------------


@pytest.mark.parametrize("t", [1.0, 2.0])
def test_laplace_form_closed_form(t):
    assert kernel.eval_mikusinski_laplace(0.5, t).value == pytest.approx(levy_half(t), rel=1e-9)


@pytest.mark.parametrize("t", [0.25, 1.0])
def test_finite_form_closed_form(t):
    assert kernel.eval_mikusinski_finite(0.5, t).value == pytest.approx(levy_half(t), rel=1e-9)


@pytest.mark.parametrize("t", [1.0, 4.0])
def test_cos_form_closed_form(t):
    assert kernel.eval_mikusinski_cos(0.5, t).value == pytest.approx(levy_half(t), rel=1e-8)


@pytest.mark.parametrize("nu", [0.25, 2 / 3])
def test_laplace_and_finite_forms_match_real_axis(nu):
    ref = kernel.eval_stankovic(KernelParams(nu, 0.0), 1.0).value
    assert kernel.eval_mikusinski_laplace(nu, 1.0).value == pytest.approx(ref, rel=1e-8)
    assert kernel.eval_mikusinski_finite(nu, 1.0).value == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("nu", [0.2, 0.3, 0.4])
def test_cos_variants_only_sine_corrected_matches(nu):
    ref = kernel.eval_stankovic(KernelParams(nu, 0.0), 1.0).value
    assert kernel.eval_mikusinski_cos(nu, 1.0, variant="corrected").value == pytest.approx(ref, rel=1e-6)
    printed = kernel.eval_mikusinski_cos(nu, 1.0, variant="printed").value
    assert abs(printed - ref) > 1e-3 * abs(ref)


def test_cos_variants_coincide_at_half():
    a = kernel.eval_mikusinski_cos(0.5, 1.0, variant="corrected").value
    b = kernel.eval_mikusinski_cos(0.5, 1.0, variant="printed").value
    # cos(pi/4) and sin(pi/4) differ in the last bit only
    assert a == pytest.approx(b, rel=1e-14)


def test_cos_form_limits():
    with pytest.raises(DomainError):
        kernel.eval_mikusinski_cos(0.6, 1.0)
    with pytest.raises(DomainError):
        kernel.eval_mikusinski_cos(0.4, 1.0, variant="other")


# Wright series and asymptotic routes ---------------------------------------------------


def test_series_route_examples():
    assert kernel.eval_wright_route(KernelParams(0.5, 0.5), 1.0).value == pytest.approx(0.4393912894, abs=1e-10)
    assert kernel.eval_wright_route(KernelParams(0.5, 0.0), 1.0).value == pytest.approx(0.2196956447, abs=1e-10)
    bessel = special.kv(1 / 3, 2 / math.sqrt(27)) / math.pi
    assert kernel.eval_wright_route(KernelParams(1 / 3, 2 / 3), 1.0).value == pytest.approx(bessel, rel=1e-10)


def test_series_route_refuses_cancelling_sums():
    with pytest.raises(CancellationError):
        kernel.eval_wright_route(KernelParams(0.5, 0.0), 1e-3)


@pytest.mark.parametrize("nu", [0.25, 1 / 3, 0.5, 0.75])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_mainardi_reduction(nu, t):
    x = t ** (-nu)
    value = kernel.eval_stankovic(KernelParams(nu, 1 - nu), t).value
    assert value == pytest.approx(x * specfun.mainardi_m(nu, x), rel=1e-8)
    assert value == pytest.approx(specfun.mainardi_f(nu, x) / nu, rel=1e-8)


def test_asymptotic_leading_term():
    res = kernel.eval_asymptotic(KernelParams(0.5, 0.5), 100.0, 1)
    assert res.value == pytest.approx(0.1 / math.sqrt(math.pi), rel=1e-14)
    assert res.method is Method.ASYMPTOTIC


def test_asymptotic_pole_zeroes_second_term():
    # mu - nu = 0 makes the second term vanish
    one = kernel.eval_asymptotic(KernelParams(0.5, 0.5), 100.0, 1).value
    two = kernel.eval_asymptotic(KernelParams(0.5, 0.5), 100.0, 2).value
    assert one == two


@pytest.mark.parametrize("nu, mu", [(0.5, 0.5), (0.4, 0.25), (0.6, 0.75)])
@pytest.mark.parametrize("t", [50.0, 100.0, 1000.0])
def test_asymptotic_bracket(nu, mu, t):
    p = KernelParams(nu, mu)
    res = kernel.eval_asymptotic(p, t, 3)
    assert abs(kernel.eval_stankovic(p, t).value - res.value) <= 2 * res.err_estimate


def test_asymptotic_term_count():
    with pytest.raises(DomainError):
        kernel.eval_asymptotic(KernelParams(0.5, 0.5), 100.0, 4)


# two-argument kernel -------------------------------------------------------------------


def test_scaled_kernel_unit_u_is_f():
    p = KernelParams(0.4, 0.3)
    assert kernel.kernel_scaled(p, 1.7, 1.0) == pytest.approx(kernel.eval_auto(p, 1.7).value, rel=1e-12)


def test_scaled_kernel_example():
    # 0.25 * f_{1/2,1/2}(1/16) = e^-4 / sqrt(pi)
    assert kernel.kernel_scaled(KernelParams(0.5, 0.5), 1.0, 4.0) == pytest.approx(math.exp(-4) / math.sqrt(math.pi), rel=1e-12)


def test_scaled_kernel_at_zero_u():
    p = KernelParams(0.5, 0.5)
    assert kernel.kernel_scaled(p, 4.0, 0.0) == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        kernel.kernel_scaled(p, 1.0, -1.0)


def test_scaled_kernel_integrates_to_one():
    p = KernelParams(0.5, 0.5)
    total, _ = integrate.quad(lambda u: kernel.kernel_scaled(p, 1.0, u), 0, np.inf, epsabs=1e-13, epsrel=1e-12)
    assert total == pytest.approx(1.0, rel=1e-9)


def test_scaled_kernel_array_matches_scalar():
    p = KernelParams(0.6, -0.2)
    u = np.array([0.0, 0.3, 2.0, 25.0])
    arr = kernel.kernel_scaled(p, 1.3, u)
    assert np.allclose(arr, [kernel.kernel_scaled(p, 1.3, float(x)) for x in u], rtol=1e-13, atol=0)


def test_scaling_law_against_real_axis_route():
    rng = np.random.default_rng(20240611)
    for _ in range(20):
        nu = rng.uniform(0.2, 0.6)
        mu = rng.uniform(-0.5, 0.9)
        t = rng.uniform(0.5, 3.0)
        u = rng.uniform(0.2, 3.0)
        p = KernelParams(nu, mu)
        lhs = kernel.kernel_scaled(p, t, u) * u ** ((1 - mu) / nu)
        rhs = kernel.eval_stankovic(p, t * u ** (-1 / nu)).value
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-14)


# index extension and derived quantities --------------------------------------------------


def test_extension_at_unit_index_is_erfc():
    p = KernelParams(0.5, 1.0)
    assert kernel.eval_extended(p, 1.0).value == pytest.approx(math.erfc(0.5), rel=1e-10)
    # the running integral approaches 1 only slowly: erfc(1/(2 sqrt t))
    assert kernel.eval_extended(p, 400.0).value == pytest.approx(math.erfc(1 / 40), rel=1e-9)


def test_extension_forced_split_matches_real_axis():
    p = KernelParams(0.5, 0.9)
    forced = kernel.eval_extended(p, 1.0, split=0.4).value
    assert forced == pytest.approx(kernel.eval_stankovic(p, 1.0).value, rel=1e-7)


@pytest.mark.parametrize("split", [0.7, 1.3, 2.0])
def test_extension_is_split_independent(split):
    p = KernelParams(0.5, 2.3)
    base = kernel.eval_extended(p, 1.0).value
    assert kernel.eval_extended(p, 1.0, split=split).value == pytest.approx(base, rel=1e-7)


def test_extension_guards():
    with pytest.raises(DomainError):
        kernel.eval_extended(KernelParams(0.5, 0.5), 1.0)
    with pytest.raises(DomainError):
        kernel.eval_extended(KernelParams(0.5, 1.5), 1.0, split=0.0)
    assert kernel.extension_split(2.3) == pytest.approx((2.0, 0.3))
    assert kernel.extension_split(1.5) == pytest.approx((2.0, -0.5))


def test_first_derivative_closed_form():
    expected = math.exp(-0.25) / math.sqrt(math.pi) * (0.25 - 0.5)
    assert kernel.derivative_n(KernelParams(0.5, 0.5), 1.0, 1) == pytest.approx(expected, rel=1e-9)


def test_derivative_zero_order_and_guard():
    p = KernelParams(0.4, 0.3)
    assert kernel.derivative_n(p, 2.0, 0) == kernel.eval_stankovic(p, 2.0).value
    with pytest.raises(DomainError):
        kernel.derivative_n(p, 2.0, 5)


@pytest.mark.parametrize("nu, mu, t", [(0.4, 0.3, 2.0), (0.6, 0.0, 1.0), (0.5, 0.75, 0.5)])
def test_first_derivative_matches_finite_difference(nu, mu, t):
    p = KernelParams(nu, mu)
    fd = central_difference(lambda x: kernel.eval_stankovic(p, x).value, t, 1e-3 * t)
    assert kernel.derivative_n(p, t, 1) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("nu, mu, t, tol", [(0.5, 0.5, 1.0, 1e-8), (0.3, 0.7, 2.0, 1e-8), (0.8, 0.1, 0.5, 1e-7)])
def test_recurrence_residual_vanishes(nu, mu, t, tol):
    assert abs(kernel.recurrence_residual(KernelParams(nu, mu), t)) <= tol


def test_antiderivative():
    assert kernel.antiderivative(KernelParams(0.5, 0.0), 1.0) == pytest.approx(math.erfc(0.5), rel=1e-10)
    assert kernel.antiderivative(KernelParams(0.5, 0.0), 1e6) == pytest.approx(1.0, abs=1e-3)
    p = KernelParams(0.6, 0.2)
    direct, _ = integrate.quad(lambda u: kernel.eval_auto(p, u).value if u > 0 else 0.0, 0, 1.5, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert kernel.antiderivative(p, 1.5) == pytest.approx(direct, rel=1e-7)


@pytest.mark.parametrize("nu, mu, t", [(0.5, 0.5, 2.0), (0.3, 0.6, 1.0), (0.7, 0.2, 3.0)])
def test_nu_derivative_matches_finite_difference(nu, mu, t):
    fd = central_difference(lambda x: kernel.f(x, mu, t), nu, 1e-4)
    assert kernel.d_dnu(KernelParams(nu, mu), t) == pytest.approx(fd, rel=1e-5)


@pytest.mark.parametrize("nu, mu, t", [(0.5, 0.5, 2.0), (0.4, 0.1, 1.0), (0.6, 0.8, 5.0)])
def test_mu_derivative_matches_finite_difference(nu, mu, t):
    fd = central_difference(lambda x: kernel.f(nu, x, t), mu, 1e-4)
    d = kernel.d_dmu(KernelParams(nu, mu), t)
    assert d == pytest.approx(fd, rel=1e-5)
    # the negated form has the wrong sign wherever the derivative is not tiny
    assert abs(-d - fd) > 1e-3 * abs(fd)


# automatic routing, limits and positivity --------------------------------------------


def test_auto_matches_series_and_real_axis():
    p = KernelParams(0.25, 0.5)
    auto = kernel.eval_auto(p, 0.5).value
    assert auto == pytest.approx(kernel.eval_stankovic(p, 0.5).value, rel=1e-9)
    assert auto == pytest.approx(kernel.eval_wright_route(p, 0.5).value, rel=1e-9)


def test_auto_uses_asymptotic_only_when_bound_met():
    res = kernel.eval_auto(KernelParams(0.5, 0.25), 1e8)
    assert res.method is Method.ASYMPTOTIC
    assert res.err_estimate <= 1e-10 * abs(res.value)


@pytest.mark.parametrize("nu", [0.4, 0.5, 0.6])
@pytest.mark.parametrize("mu", [0.0, 0.5])
def test_small_and_large_time_limits(nu, mu):
    p = KernelParams(nu, mu)
    assert abs(kernel.eval_auto(p, 1e-3).value) < 1e-8
    big = [kernel.eval_auto(p, t).value for t in (1e5, 1e6, 1e7)]
    assert abs(big[1]) < 1e-3
    assert big[0] > big[1] > big[2] > 0


@settings(max_examples=60, deadline=None)
@given(nu=st.floats(min_value=0.1, max_value=0.9), t=st.floats(min_value=0.1, max_value=100.0))
def test_stable_density_is_nonnegative(nu, t):
    assert kernel.eval_auto(KernelParams(nu, 0.0), t).value >= -1e-10


def test_real_axis_route_refuses_ill_conditioned_small_t():
    # e^{-u^nu cos(pi nu)} grows without bound for nu > 1/2; at t = 0.1 the
    # integrand peaks far beyond double range and the route must say so
    with pytest.raises(EfrosError):
        kernel.eval_stankovic(KernelParams(0.9, 0.0), 0.1)


def test_real_axis_route_needs_mu_below_one():
    with pytest.raises(DomainError):
        kernel.eval_stankovic(KernelParams(0.5, 1.0), 1.0)


def test_vectorized_values_match_scalar():
    t = np.array([0.05, 0.3, 1.0, 4.0, 30.0])
    vals = kernel.f_values(0.45, 0.35, t)
    ref = [kernel.eval_contour(KernelParams(0.45, 0.35), float(x)).value for x in t]
    np.testing.assert_allclose(vals, ref, rtol=1e-11)
