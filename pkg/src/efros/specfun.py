"""Special functions: Gamma family, erf, Bessel K, Wright, Mittag-Leffler, Volterra.

The Gamma family, erf and K_nu delegate to ``scipy.special``.  The Wright and
Mittag-Leffler series are summed here in ``mpmath`` arithmetic whose working
precision grows with the dynamic range of the terms, so alternating series with
large arguments still come out accurate.  The ``*_values`` variants are fast
float64 array versions that report where they can be trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sc

from .errors import DomainError, NonConvergenceError, QuadratureError
from .quad import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite

SERIES_TOL = 1e-15
MAX_TERMS = 100_000
CANCELLATION_RATIO = 1e8
ML_MAX_ABS_Z = 40.0
# log of the smallest positive subnormal double
UNDERFLOW_LOG = -745.0


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma(x: float) -> float:
    """Gamma function; raises :class:`DomainError` at 0, -1, -2, ..."""
    x = float(x)
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at {x}")
    return float(sc.gamma(x))


def recip_gamma(x: float) -> float:
    """1/Gamma(x), exactly 0 at the poles of Gamma."""
    x = float(x)
    if _is_pole(x):
        return 0.0
    return float(sc.rgamma(x))


def digamma(x: float) -> float:
    x = float(x)
    if not x > 0:
        raise DomainError(f"digamma is only provided for x > 0, got {x}")
    return float(sc.digamma(x))


def erf(x: float) -> float:
    return float(sc.erf(float(x)))


def bessel_k(order: float, x: float) -> float:
    """Modified Bessel function of the second kind K_order(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"bessel_k needs x > 0, got {x}")
    return float(sc.kv(float(order), x))


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of a power-series evaluation.

    ``truncation_bound`` is the magnitude of the first omitted term and
    ``cancellation_flag`` marks sums whose largest term exceeded
    ``1e8 * |value|``.  ``working_digits`` records the decimal precision the
    terms were accumulated in; a flagged sum is still accurate when this
    exceeds the digits lost, but it is never certified at the default tolerance.
    """

    value: float
    terms_used: int
    truncation_bound: float
    cancellation_flag: bool
    working_digits: int = 0

    def __float__(self) -> float:
        return self.value


def _sum_series(term, z: float, peak_index: float, tol: float):
    """Sum ``sum_k term(k)`` in the current mpmath context.

    ``term(k)`` returns an mpf.  Stops once two consecutive terms past
    ``peak_index`` are below ``tol * |partial sum|``.
    """
    total = mpmath.mpf(0)
    max_abs = mpmath.mpf(0)
    prev_abs = None
    for k in range(MAX_TERMS):
        tk = term(k)
        total += tk
        ak = abs(tk)
        if ak > max_abs:
            max_abs = ak
        if k >= peak_index and prev_abs is not None:
            if prev_abs + ak <= tol * abs(total) or (prev_abs + ak == 0 and k > peak_index + 2):
                nxt = abs(term(k + 1)) or abs(term(k + 2))
                return total, k + 1, max_abs, nxt
        prev_abs = ak
    raise NonConvergenceError(f"series did not converge within {MAX_TERMS} terms (z={z})")


def _adaptive_sum(make_term, z: float, peak_index: float, tol: float):
    """Run :func:`_sum_series` with enough guard digits to absorb cancellation."""
    dps = 30
    for _ in range(12):
        with mpmath.workdps(dps):
            total, n, max_abs, nxt = _sum_series(make_term(), z, peak_index, tol)
            if max_abs == 0:
                return 0.0, n, 0.0, 0.0, dps
            lost = dps if total == 0 else float(mpmath.log10(max_abs / abs(total)))
            if lost + 20 <= dps:
                return float(total), n, float(nxt), float(max_abs), dps
        if lost + 5 >= dps:
            # pure rounding noise: first assume an O(1) result, then keep doubling
            with mpmath.workdps(dps):
                scale = float(mpmath.log10(max_abs))
            dps = max(2 * dps, int(scale) + 30)
        else:
            dps = int(lost) + 30
    raise NonConvergenceError(f"could not resolve cancellation in series (z={z})")


def _make_result(value, n, nxt, max_abs, dps) -> SeriesResult:
    flag = max_abs > CANCELLATION_RATIO * abs(value)
    return SeriesResult(value, max(n, 1), nxt, bool(flag), dps)


def wright(lam: float, mu: float, z: float, tol: float = SERIES_TOL) -> SeriesResult:
    """Wright function W_{lam,mu}(z) = sum_k z^k / (k! Gamma(lam k + mu)), lam > -1."""
    lam = float(lam)
    mu = float(mu)
    z = float(z)
    if not lam > -1:
        raise DomainError(f"wright needs lambda > -1, got {lam}")
    if z == 0.0:
        v = recip_gamma(mu)
        return SeriesResult(v, 1, 0.0, False, 17)
    if _wright_underflows(lam, mu, z):
        return SeriesResult(0.0, 0, 0.0, False, 17)
    # terms grow until k^(1+lam) ~ |z|
    peak = abs(z) ** (1.0 / (1.0 + lam)) + 2

    def make_term():
        zm = mpmath.mpf(z)
        lm = mpmath.mpf(lam)
        mm = mpmath.mpf(mu)

        def term(k):
            return zm**k * mpmath.rgamma(lm * k + mm) / mpmath.factorial(k)

        return term

    return _make_result(*_adaptive_sum(make_term, z, peak, tol))


def _wright_underflows(lam: float, mu: float, z: float) -> bool:
    """True when W_{lam,mu}(z), -1 < lam < 0, z < 0, is below the smallest double.

    Uses the saddle-point envelope |W| ~ Y^(1/2-mu) e^(-Y) with
    Y = (1-nu) nu^(nu/(1-nu)) |z|^(1/(1-nu)), nu = -lam.  The series is
    hopeless there anyway: its peak term sits near k = |z|^(1/(1-nu)).
    """
    if not (-1.0 < lam < 0.0 and z < 0.0):
        return False
    nu = -lam
    y = (1.0 - nu) * nu ** (nu / (1.0 - nu)) * (-z) ** (1.0 / (1.0 - nu))
    return y > 1e3 and -y + abs(0.5 - mu) * math.log(y) + 10.0 < UNDERFLOW_LOG


def mittag_leffler(alpha: float, beta: float, z: float, tol: float = SERIES_TOL) -> SeriesResult:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for |z| <= 40."""
    alpha = float(alpha)
    beta = float(beta)
    z = float(z)
    if not alpha > 0:
        raise DomainError(f"mittag_leffler needs alpha > 0, got {alpha}")
    if abs(z) > ML_MAX_ABS_Z:
        raise DomainError(f"mittag_leffler is limited to |z| <= {ML_MAX_ABS_Z}, got {z}")
    return _mittag_leffler_unchecked(alpha, beta, z, tol)


def _mittag_leffler_unchecked(alpha, beta, z, tol=SERIES_TOL) -> SeriesResult:
    if z == 0.0:
        return SeriesResult(recip_gamma(beta), 1, 0.0, False, 17)
    peak = abs(z) ** (1.0 / alpha) + 2

    def make_term():
        zm = mpmath.mpf(z)
        am = mpmath.mpf(alpha)
        bm = mpmath.mpf(beta)

        def term(k):
            return zm**k * mpmath.rgamma(am * k + bm)

        return term

    return _make_result(*_adaptive_sum(make_term, z, peak, tol))


def mainardi_f(nu: float, t: float) -> float:
    """Mainardi F_nu(t) = W_{-nu,0}(-t)."""
    _check_nu(nu)
    if t < 0:
        raise DomainError(f"mainardi_f needs t >= 0, got {t}")
    return wright(-nu, 0.0, -t).value


def mainardi_m(nu: float, t: float) -> float:
    """Mainardi M_nu(t) = W_{-nu,1-nu}(-t)."""
    _check_nu(nu)
    if t < 0:
        raise DomainError(f"mainardi_m needs t >= 0, got {t}")
    return wright(-nu, 1.0 - nu, -t).value


def _check_nu(nu: float) -> None:
    if not 0 < nu < 1:
        raise DomainError(f"nu must lie in (0, 1), got {nu}")


# float64 array versions ------------------------------------------------------

# a float64 sum is trusted when its largest term is at most this multiple of the result
FAST_DYNAMIC_RANGE = 1e3


def _log_abs_rgamma(x: np.ndarray) -> np.ndarray:
    """log|1/Gamma(x)|, -inf at poles."""
    x = np.asarray(x, dtype=float)
    out = -sc.gammaln(x)
    pole = (x <= 0) & (x == np.floor(x))
    out = np.where(pole, -np.inf, out)
    return out


def _gamma_sign(x: np.ndarray) -> np.ndarray:
    """Sign of Gamma(x), 0 at poles. rgamma underflows for large x, so not used here."""
    x = np.asarray(x, dtype=float)
    pole = (x <= 0) & (x == np.floor(x))
    return np.where(pole, 0.0, sc.gammasgn(np.where(pole, 0.5, x)))


def wright_values(lam: float, mu: float, z, max_terms: int = 400):
    """Vectorized float64 Wright series.

    Returns ``(values, ok)`` where ``ok`` is False wherever the float sum
    cannot be trusted (large dynamic range or too many terms).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    k = np.arange(max_terms, dtype=float)
    coef_log = _log_abs_rgamma(lam * k + mu) - sc.gammaln(k + 1)
    coef_sign = _gamma_sign(lam * k + mu)
    return _power_series_values(z, coef_log, coef_sign)


def mittag_leffler_values(alpha: float, beta: float, z, max_terms: int = 400):
    """Vectorized E_{alpha,beta}; entries the float sum cannot certify use mpmath.

    No |z| cap is applied here; callers own the domain.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    k = np.arange(max_terms, dtype=float)
    coef_log = _log_abs_rgamma(alpha * k + beta)
    coef_sign = _gamma_sign(alpha * k + beta)
    vals, ok = _power_series_values(z, coef_log, coef_sign)
    if not np.all(ok):
        closed = _mittag_leffler_elementary(alpha, beta, z[~ok])
        if closed is not None:
            vals[~ok] = closed
            return vals
    for i in np.flatnonzero(~ok):
        vals[i] = _mittag_leffler_unchecked(alpha, beta, float(z[i])).value
    return vals


def _mittag_leffler_elementary(alpha: float, beta: float, z: np.ndarray):
    """Elementary forms of E_{alpha,beta} for alpha in {1/2, 1}; None otherwise.

    Used only where the float series is unreliable (|z| not small), so the
    divisions by z below are safe.
    """
    with np.errstate(over="ignore"):
        if alpha == 1.0 and beta == 1.0:
            return np.exp(z)
        if alpha == 1.0 and beta == 2.0:
            return np.expm1(z) / z
        if alpha == 0.5:
            # e^{z^2} erfc(-z), stable for large negative z
            e = sc.erfcx(-z)
            if beta == 1.0:
                return e
            if beta == 0.5:
                return 1.0 / math.sqrt(math.pi) + z * e
            if beta == 1.5:
                return (e - 1.0) / z
    return None


def _power_series_values(z, coef_log, coef_sign):
    n = coef_log.size
    k = np.arange(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.log(np.abs(z))[:, None]
        log_terms = coef_log[None, :] + k[None, :] * logz
        log_terms[:, 0] = coef_log[0]
    sign = coef_sign[None, :] * np.where((z[:, None] < 0) & (k[None, :] % 2 == 1), -1.0, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.where(np.isfinite(log_terms), sign * np.exp(log_terms), 0.0)
    terms[z == 0, 1:] = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        values = terms.sum(axis=1)
        max_term = np.abs(terms).max(axis=1)
        tail = np.abs(terms[:, -3:]).sum(axis=1)
        ok = (
            np.isfinite(values)
            & np.isfinite(max_term)
            & (max_term <= FAST_DYNAMIC_RANGE * np.abs(values))
            & (tail <= 1e-17 * np.abs(values))
        )
    return values, ok


# Volterra functions ----------------------------------------------------------


def _volterra(t: float, beta: float, alpha: float, spec: QuadratureSpec) -> float:
    if not t > 0:
        raise DomainError(f"Volterra functions need t > 0, got {t}")
    if alpha < 0 or beta < 0:
        raise DomainError(f"Volterra functions need alpha, beta >= 0, got alpha={alpha}, beta={beta}")
    logt = math.log(t)
    lg_beta = math.lgamma(beta + 1.0)

    def integrand(u):
        with np.errstate(divide="ignore"):
            pw = beta * np.log(u) if beta else 0.0
        return np.exp(pw + (u + alpha) * logt - sc.gammaln(u + alpha + 1.0) - lg_beta)

    # the integrand peaks near u ~ t; scale the scan to that
    scale = max(1.0, t)
    res = integrate_semi_infinite(integrand, 0.0, spec, scale=scale, reach=1e4)
    if not res.converged:
        raise QuadratureError(f"Volterra integral at t={t} did not converge (err={res.err_estimate!r})")
    return res.value


def volterra_nu(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """nu(t) = int_0^inf t^u / Gamma(u+1) du."""
    return _volterra(t, 0.0, 0.0, spec)


def volterra_nu_alpha(t: float, alpha: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """nu(t, alpha) = int_0^inf t^(u+alpha) / Gamma(u+alpha+1) du."""
    return _volterra(t, 0.0, alpha, spec)


def volterra_mu(t: float, beta: float, alpha: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """mu(t, beta, alpha) = int_0^inf u^beta t^(u+alpha) / (Gamma(beta+1) Gamma(u+alpha+1)) du."""
    return _volterra(t, beta, alpha, spec)
