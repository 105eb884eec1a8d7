"""Evaluators for f_{nu,mu}(t), the inverse Laplace transform of s^-mu exp(-s^nu).

Several independent representations are provided so they can be checked
against each other:

* ``eval_stankovic``: real-axis integral obtained by folding the Bromwich
  contour onto the branch cut (valid for mu < 1).
* ``eval_mikusinski_laplace`` / ``eval_mikusinski_cos`` / ``eval_mikusinski_finite``:
  the three mu = 0 integral forms.
* ``eval_wright_route``: f = t^(mu-1) W_{-nu,mu}(-t^-nu) through the series.
* ``eval_asymptotic``: truncated large-t expansion.
* ``eval_extended``: power-law convolution that lifts mu past 1.

``eval_auto`` picks a route, and ``f_values``/``kernel_scaled`` are the fast
array evaluators used inside the identity integrals.  They combine the float
series with a finite contour integral valid for every real mu:

    W_{-nu,mu}(-x) = (1/pi) int_0^pi exp(h) r^-mu [r cos((1-mu)phi) + r' sin((1-mu)phi)] dphi

with r(phi) = (x sin(nu phi)/sin(phi))^(1/(1-nu)) and
h(phi) = -r sin((1-nu)phi)/sin(nu phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import mpmath
import numpy as np

from . import specfun
from .errors import CancellationError, DomainError, QuadratureError
from .quad import (
    DEFAULT_SPEC,
    QuadratureSpec,
    convolve,
    integrate_finite,
    integrate_fourier_cos,
    integrate_semi_infinite,
)

EULER_GAMMA = 0.5772156649015329
ASYMPTOTIC_MIN_T = 1e4


class Method(str, Enum):
    STANKOVIC = "stankovic"
    MIKUSINSKI_LAPLACE = "mikusinski_laplace"
    MIKUSINSKI_COS = "mikusinski_cos"
    MIKUSINSKI_FINITE = "mikusinski_finite"
    WRIGHT_SERIES = "wright_series"
    ASYMPTOTIC = "asymptotic"
    CLOSED_FORM = "closed_form"
    EXTENDED_CONVOLUTION = "extended_convolution"


@dataclass(frozen=True)
class KernelParams:
    nu: float
    mu: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.nu < 1:
            raise DomainError(f"nu must satisfy 0 < nu < 1, got {self.nu}")
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")

    def with_mu(self, mu: float) -> "KernelParams":
        return KernelParams(self.nu, mu)


@dataclass
class KernelEval:
    t: float
    params: KernelParams
    value: float
    err_estimate: float
    method: Method
    evaluations: int = 0

    def __float__(self) -> float:
        return self.value


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"t must be a finite positive number, got {t}")
    return t


def _require_converged(res, what: str):
    if not res.converged:
        raise QuadratureError(
            f"{what}: quadrature did not reach tolerance "
            f"(value={res.value!r}, err={res.err_estimate!r}, |f| integral={res.abs_integral!r})"
        )
    return res


# closed forms ---------------------------------------------------------------


def closed_form(nu: float, mu: float, t: float) -> Optional[float]:
    """Closed-form value of f_{nu,mu}(t) where one is known, else None."""
    t = _check_t(t)
    if nu == 0.5 and mu == 0.0:
        return math.exp(-0.25 / t) / (2.0 * math.sqrt(math.pi) * t**1.5)
    if nu == 0.5 and mu == 0.5:
        return math.exp(-0.25 / t) / math.sqrt(math.pi * t)
    if math.isclose(nu, 1 / 3, rel_tol=0, abs_tol=1e-15) and math.isclose(mu, 2 / 3, rel_tol=0, abs_tol=1e-15):
        return specfun.bessel_k(1 / 3, 2.0 / math.sqrt(27.0 * t)) / (math.pi * math.sqrt(t))
    return None


# real-axis (branch cut) integrals -------------------------------------------


def _branch_cut_integrand(nu: float, mu: float, t: float):
    c = math.cos(math.pi * nu)
    s = math.sin(math.pi * nu)
    phase = math.pi * mu

    def integrand(u):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            un = u**nu
            amp = np.exp(-u * t - un * c - mu * np.log(u))
            out = amp * np.sin(un * s + phase)
        return np.where(amp == 0.0, 0.0, out)

    return integrand


def _branch_cut_scale(nu: float, t: float) -> float:
    # e^{-ut} sets the scale unless e^{|cos| u^nu} pushes the peak further out
    c = math.cos(math.pi * nu)
    scale = 1.0 / t
    if c < 0:
        scale = max(scale, (nu * abs(c) / t) ** (1.0 / (1.0 - nu)))
    return scale


def eval_stankovic(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelEval:
    """Real-axis integral representation, valid for mu < 1 (including negative mu)."""
    t = _check_t(t)
    if not p.mu < 1:
        raise DomainError(f"the real-axis integral needs mu < 1, got mu={p.mu}")
    f = _branch_cut_integrand(p.nu, p.mu, t)
    res = integrate_semi_infinite(f, 0.0, spec, scale=_branch_cut_scale(p.nu, t))
    # at a sign change of f (mu < 0) only absolute accuracy is possible; measure it
    # against int e^{-ut} u^{-mu} du, the integral without the e^{-u^nu cos(pi nu)}
    # factor, so the overflowing nu > 1/2 small-t integrals are still refused
    envelope = math.gamma(1.0 - p.mu) * t ** (p.mu - 1.0)
    if not (np.isfinite(res.value) and res.err_estimate <= 1e-2 * spec.rel_tol * envelope):
        _require_converged(res, f"stankovic(nu={p.nu}, mu={p.mu}, t={t})")
    return KernelEval(t, p, res.value / math.pi, res.err_estimate / math.pi, Method.STANKOVIC, res.evaluations)


def eval_mikusinski_laplace(nu: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelEval:
    """mu = 0 Laplace-type form: (1/pi) int e^{-ut} e^{-u^nu cos(pi nu)} sin(u^nu sin(pi nu)) du."""
    p = KernelParams(nu, 0.0)
    t = _check_t(t)
    c = math.cos(math.pi * nu)
    s = math.sin(math.pi * nu)

    def integrand(u):
        un = u**nu
        return np.exp(-u * t) * np.exp(-un * c) * np.sin(un * s)

    res = integrate_semi_infinite(integrand, 0.0, spec, scale=_branch_cut_scale(nu, t))
    _require_converged(res, f"mikusinski_laplace(nu={nu}, t={t})")
    return KernelEval(t, p, res.value / math.pi, res.err_estimate / math.pi, Method.MIKUSINSKI_LAPLACE, res.evaluations)


def eval_mikusinski_cos(
    nu: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC, variant: str = "corrected"
) -> KernelEval:
    """mu = 0 Fourier-cosine form (2/pi) int e^{-u^nu a} cos(u^nu b) cos(ut) du.

    ``a = cos(pi nu/2)``.  ``variant="corrected"`` uses ``b = sin(pi nu/2)``;
    ``variant="printed"`` uses ``b = cos(pi nu/2)``, which coincides only at nu = 1/2.
    Restricted to nu <= 1/2.
    """
    p = KernelParams(nu, 0.0)
    t = _check_t(t)
    if nu > 0.5:
        raise DomainError(f"the cosine form is only supported for nu <= 1/2, got {nu}")
    a = math.cos(0.5 * math.pi * nu)
    if variant == "corrected":
        b = math.sin(0.5 * math.pi * nu)
    elif variant == "printed":
        b = a
    else:
        raise DomainError(f"unknown variant {variant!r}; use 'corrected' or 'printed'")

    def amplitude(u):
        un = u**nu
        return np.exp(-un * a) * np.cos(un * b)

    res = integrate_fourier_cos(amplitude, t, spec)
    _require_converged(res, f"mikusinski_cos(nu={nu}, t={t}, variant={variant})")
    return KernelEval(t, p, 2.0 * res.value / math.pi, 2.0 * res.err_estimate / math.pi, Method.MIKUSINSKI_COS, res.evaluations)


def eval_mikusinski_finite(nu: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelEval:
    """mu = 0 finite form nu/(pi (1-nu) t) int_0^pi xi e^{-xi} du.

    ``xi = t^{-nu/(1-nu)} (sin(nu u)/sin u)^{nu/(1-nu)} sin((1-nu)u)/sin u``.
    """
    p = KernelParams(nu, 0.0)
    t = _check_t(t)
    k = nu / (1.0 - nu)
    log_t_part = -k * math.log(t)

    def integrand(u):
        with np.errstate(over="ignore"):
            log_xi = log_t_part + k * np.log(np.sin(nu * u) / np.sin(u)) + np.log(np.sin((1.0 - nu) * u) / np.sin(u))
            xi = np.exp(log_xi)
            return np.where(np.isfinite(xi), np.exp(log_xi - xi), 0.0)

    # xi(0+) = (nu^nu (1-nu)^(1-nu) / t^nu)^(1/(1-nu)); the peak narrows like xi0^(-1/2)
    xi0 = (nu**nu * (1.0 - nu) ** (1.0 - nu) / t**nu) ** (1.0 / (1.0 - nu))
    res = integrate_finite(integrand, 0.0, math.pi, spec, points=_peak_points(xi0))
    _require_converged(res, f"mikusinski_finite(nu={nu}, t={t})")
    scale = nu / (math.pi * (1.0 - nu) * t)
    return KernelEval(t, p, scale * res.value, scale * res.err_estimate, Method.MIKUSINSKI_FINITE, res.evaluations)


def _peak_points(height: float) -> list[float]:
    width = min(1.0, 1.0 / math.sqrt(max(height, 1e-300)))
    pts = [width * 2.0**k for k in range(-3, 8) if width * 2.0**k < math.pi]
    pts += [math.pi * (1.0 - 2.0**-k) for k in range(1, 6)]
    return sorted(set(pts))


# finite contour for W_{-nu,mu}(-x), any real mu ---------------------------------


def _cot_series_coefficients(n: int) -> list[float]:
    # cot y = 1/y - sum_k c_k y^(2k-1),  c_k = 2^(2k) |B_2k| / (2k)!
    return [float(mpmath.mpf(2) ** (2 * k) * abs(mpmath.bernoulli(2 * k)) / mpmath.factorial(2 * k)) for k in range(1, n + 1)]


_COT_COEFFS = _cot_series_coefficients(14)
_COT_SERIES_MAX = 0.5


def cot_difference(nu: float, phi: np.ndarray) -> np.ndarray:
    """nu cot(nu phi) - cot(phi), free of cancellation as phi -> 0."""
    phi = np.asarray(phi, dtype=float)
    out = np.empty_like(phi)
    small = phi <= _COT_SERIES_MAX
    if np.any(small):
        ps = phi[small]
        p2 = ps * ps
        acc = np.zeros_like(ps)
        for k in range(len(_COT_COEFFS), 0, -1):
            acc = acc * p2 + _COT_COEFFS[k - 1] * (1.0 - nu ** (2 * k))
        out[small] = acc * ps
    big = ~small
    if np.any(big):
        pb = phi[big]
        out[big] = nu / np.tan(nu * pb) - 1.0 / np.tan(pb)
    return out


@dataclass
class _ContourValue:
    log_scale: float  # value = exp(log_scale) * integral / pi
    integral: float
    err: float
    evaluations: int

    def value(self, extra_log: float = 0.0) -> float:
        return math.exp(self.log_scale + extra_log) * self.integral / math.pi

    def error(self, extra_log: float = 0.0) -> float:
        return math.exp(self.log_scale + extra_log) * self.err / math.pi


# below this log-magnitude the result is zero in double precision
_UNDERFLOW_LOG = -900.0


def _wright_neg_contour(nu: float, mu: float, x: float, spec: QuadratureSpec, extra_log: float = 0.0) -> _ContourValue:
    """W_{-nu,mu}(-x) for x > 0 by the finite contour integral."""
    one_nu = 1.0 - nu
    lr0 = (math.log(x) + math.log(nu)) / one_nu
    r0 = math.exp(lr0)
    h0 = -r0 * one_nu / nu
    log_scale = h0 + (1.0 - mu) * lr0
    if log_scale + extra_log < _UNDERFLOW_LOG:
        return _ContourValue(log_scale, 0.0, 0.0, 0)
    logx = math.log(x)
    a = 1.0 - mu

    def integrand(phi):
        with np.errstate(over="ignore", invalid="ignore"):
            lr = (logx + np.log(np.sin(nu * phi) / np.sin(phi))) / one_nu
            r = np.exp(lr)
            h = -r * (np.sin(one_nu * phi) / np.sin(nu * phi))
            dl = cot_difference(nu, phi) / one_nu
            weight = np.exp(h - h0 + a * (lr - lr0))
            out = weight * (np.cos(a * phi) + dl * np.sin(a * phi))
        return np.where(weight == 0.0, 0.0, out)

    res = integrate_finite(integrand, 0.0, math.pi, spec, points=_peak_points(r0))
    # near a sign change of W (mu < 0) a relative target is out of reach; the
    # integrand is O(1)-normalized, so accept absolute accuracy on that scale
    near_root = res.err_estimate <= 1e-2 * spec.rel_tol * res.abs_integral
    if not near_root:
        _require_converged(res, f"contour W(-{nu},{mu})(-{x})")
    return _ContourValue(log_scale, res.value, res.err_estimate, res.evaluations)


def wright_neg(nu: float, mu: float, x, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """W_{-nu,mu}(-x) for an array of x >= 0 (float series where safe, contour elsewhere)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals, ok = specfun.wright_values(-nu, mu, -x)
    for i in np.flatnonzero(~ok):
        vals[i] = _wright_neg_contour(nu, mu, float(x[i]), spec).value()
    return vals


def f_values(nu: float, mu: float, t, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Array evaluator of f_{nu,mu}(t) for t > 0; zero for t == 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    x = tp ** (-nu)
    vals, ok = specfun.wright_values(-nu, mu, -x)
    with np.errstate(over="ignore", invalid="ignore"):
        res = np.where(ok, tp ** (mu - 1.0) * vals, 0.0)
    for j in np.flatnonzero(~ok):
        cv = _wright_neg_contour(nu, mu, float(x[j]), spec, extra_log=(mu - 1.0) * math.log(tp[j]))
        res[j] = cv.value((mu - 1.0) * math.log(tp[j]))
    out[pos] = res
    return out


def _eval_contour(p: KernelParams, t: float, spec: QuadratureSpec) -> KernelEval:
    extra = (p.mu - 1.0) * math.log(t)
    cv = _wright_neg_contour(p.nu, p.mu, t ** (-p.nu), spec, extra_log=extra)
    return KernelEval(t, p, cv.value(extra), cv.error(extra), Method.MIKUSINSKI_FINITE, cv.evaluations)


def eval_contour(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelEval:
    """Finite contour route for any real mu (tagged as the finite-interval method)."""
    return _eval_contour(p, _check_t(t), spec)


# series and asymptotic routes ------------------------------------------------


def eval_wright_route(p: KernelParams, t: float) -> KernelEval:
    """f = t^(mu-1) W_{-nu,mu}(-t^-nu) through the series; refuses cancelling sums."""
    t = _check_t(t)
    sr = specfun.wright(-p.nu, p.mu, -(t ** (-p.nu)))
    if sr.cancellation_flag:
        raise CancellationError(
            f"Wright series for nu={p.nu}, mu={p.mu}, t={t} lost more than 8 digits to cancellation"
        )
    scale = t ** (p.mu - 1.0)
    err = scale * (sr.truncation_bound + 4 * np.finfo(float).eps * abs(sr.value))
    return KernelEval(t, p, scale * sr.value, err, Method.WRIGHT_SERIES, sr.terms_used)


def _asymptotic_term(p: KernelParams, t: float, k: int) -> float:
    return (-1) ** k * specfun.recip_gamma(p.mu - k * p.nu) / math.factorial(k) * t ** (p.mu - 1.0 - k * p.nu)


def eval_asymptotic(p: KernelParams, t: float, n_terms: int = 3) -> KernelEval:
    """Large-t expansion truncated after ``n_terms`` terms (1 to 3).

    The error estimate is the first nonzero omitted term, since poles of
    1/Gamma can zero out individual terms.
    """
    t = _check_t(t)
    if n_terms not in (1, 2, 3):
        raise DomainError(f"n_terms must be 1, 2 or 3, got {n_terms}")
    value = math.fsum(_asymptotic_term(p, t, k) for k in range(n_terms))
    err = 0.0
    for k in range(n_terms, n_terms + 4):
        err = abs(_asymptotic_term(p, t, k))
        if err:
            break
    return KernelEval(t, p, value, err, Method.ASYMPTOTIC, n_terms)


# dispatch ----------------------------------------------------------------------


def eval_auto(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> KernelEval:
    """Pick the cheapest reliable route for f_{nu,mu}(t).

    Order: closed form, large-t expansion (only when its bound meets the
    tolerance), float Wright series when its terms stay within a safe dynamic
    range, otherwise the finite contour integral (any mu).
    """
    t = _check_t(t)
    cf = closed_form(p.nu, p.mu, t)
    if cf is not None:
        return KernelEval(t, p, cf, 4 * np.finfo(float).eps * abs(cf), Method.CLOSED_FORM, 1)
    if t >= ASYMPTOTIC_MIN_T:
        ae = eval_asymptotic(p, t, 3)
        if ae.err_estimate <= spec.target(ae.value):
            return ae
    x = t ** (-p.nu)
    vals, ok = specfun.wright_values(-p.nu, p.mu, np.array([-x]))
    if ok[0]:
        v = t ** (p.mu - 1.0) * float(vals[0])
        return KernelEval(t, p, v, 1e3 * 4 * np.finfo(float).eps * abs(v), Method.WRIGHT_SERIES, 400)
    return _eval_contour(p, t, spec)


def f(nu: float, mu: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Shorthand for ``eval_auto(KernelParams(nu, mu), t).value``."""
    return eval_auto(KernelParams(nu, mu), t, spec).value


def kernel_scaled(p: KernelParams, t: float, u, spec: QuadratureSpec = DEFAULT_SPEC):
    """Two-argument kernel K(t, u) = inverse transform of exp(-u s^nu)/s^mu at t.

    Equal to u^((mu-1)/nu) f_{nu,mu}(t u^(-1/nu)) = t^(mu-1) W_{-nu,mu}(-u t^-nu).
    Accepts scalar or array ``u``; u = 0 gives t^(mu-1)/Gamma(mu).
    """
    t = _check_t(t)
    scalar = np.isscalar(u)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u < 0):
        raise DomainError("kernel_scaled needs u >= 0")
    z = u * t ** (-p.nu)
    log_pref = (p.mu - 1.0) * math.log(t)
    vals, ok = specfun.wright_values(-p.nu, p.mu, -z)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(ok, math.exp(log_pref) * vals, 0.0)
    for j in np.flatnonzero(~ok):
        cv = _wright_neg_contour(p.nu, p.mu, float(z[j]), spec, extra_log=log_pref)
        out[j] = cv.value(log_pref)
    return float(out[0]) if scalar else out


# mu >= 1 extension and derived quantities -----------------------------------


def extension_split(rho: float) -> tuple[float, float]:
    """Default split rho = lam + mu' with mu' in [-0.5, 0.5)."""
    mu_inner = rho - math.floor(rho + 0.5)
    return rho - mu_inner, mu_inner


def eval_extended(
    p: KernelParams,
    t: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    split: Optional[float] = None,
) -> KernelEval:
    """f_{nu,rho} as the convolution (t^(lam-1)/Gamma(lam)) * f_{nu,rho-lam}.

    ``split`` overrides lam (must be > 0).  With rho == 1 and no override the
    running integral of f_{nu,0} over (0, t) is used instead.
    """
    t = _check_t(t)
    rho = p.mu
    if split is None:
        if rho < 1:
            raise DomainError(f"eval_extended targets mu >= 1 unless a split is given, got mu={rho}")
        if rho == 1.0:
            g = lambda u: f_values(p.nu, 0.0, u, spec)  # noqa: E731
            res = _require_converged(integrate_finite(g, 0.0, t, spec), "running integral of f_{nu,0}")
            return KernelEval(t, p, res.value, res.err_estimate, Method.EXTENDED_CONVOLUTION, res.evaluations)
        lam, mu_inner = extension_split(rho)
    else:
        lam = float(split)
        if not lam > 0:
            raise DomainError(f"split must be > 0, got {lam}")
        mu_inner = rho - lam
    rg = specfun.recip_gamma(lam)

    def power(x):
        return x ** (lam - 1.0) * rg

    def inner(x):
        return f_values(p.nu, mu_inner, x, spec)

    # f_{nu,mu'} vanishes faster than any power at 0, so only the power factor is singular
    res = _require_converged(convolve(inner, power, t, 0.0, min(lam - 1.0, 0.0), spec), "extended convolution")
    return KernelEval(t, p, res.value, res.err_estimate, Method.EXTENDED_CONVOLUTION, res.evaluations)


def derivative_n(p: KernelParams, t: float, n: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """n-th t-derivative of f_{nu,mu}, i.e. f_{nu,mu-n}, from the real-axis integral."""
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= 4):
        raise DomainError(f"n must be an integer in [0, 4], got {n}")
    return eval_stankovic(p.with_mu(p.mu - n), t, spec).value


def recurrence_residual(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """t f_{nu,mu-1} - (mu-1) f_{nu,mu} - nu f_{nu,mu-nu}; zero in exact arithmetic."""
    if not p.mu < 1:
        raise DomainError(f"recurrence_residual needs mu < 1, got {p.mu}")
    a = eval_stankovic(p.with_mu(p.mu - 1.0), t, spec).value
    b = eval_stankovic(p, t, spec).value
    c = eval_stankovic(p.with_mu(p.mu - p.nu), t, spec).value
    return t * a - (p.mu - 1.0) * b - p.nu * c


def antiderivative(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """int_0^t f_{nu,mu}(u) du = f_{nu,mu+1}(t), via the extension route."""
    if not p.mu < 1:
        raise DomainError(f"antiderivative needs mu < 1, got {p.mu}")
    return eval_extended(p.with_mu(p.mu + 1.0), t, spec).value


def _log_convolution(nu: float, mu_inner: float, t: float, spec: QuadratureSpec) -> float:
    def log_part(x):
        with np.errstate(divide="ignore"):
            return np.log(x)

    def inner(x):
        return f_values(nu, mu_inner, x, spec)

    res = _require_converged(convolve(log_part, inner, t, 0.0, 0.0, spec), "ln t convolution")
    return res.value


def d_dnu(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Partial derivative in nu: (ln t * f_{nu,mu-nu-1})(t) + gamma f_{nu,mu-nu}(t)."""
    t = _check_t(t)
    conv = _log_convolution(p.nu, p.mu - p.nu - 1.0, t, spec)
    return conv + EULER_GAMMA * f_values(p.nu, p.mu - p.nu, t, spec)[0]


def d_dmu(p: KernelParams, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Partial derivative in mu: (ln t * f_{nu,mu-1})(t) + gamma f_{nu,mu}(t)."""
    t = _check_t(t)
    conv = _log_convolution(p.nu, p.mu - 1.0, t, spec)
    return conv + EULER_GAMMA * f_values(p.nu, p.mu, t, spec)[0]
