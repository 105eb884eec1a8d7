"""Adaptive quadrature engine used by every integral in the package.

All integrands are vectorized: they receive a 1-D ``numpy`` array of abscissae
and must return an array of the same shape.  Wrap scalar-only callables with
:func:`vectorize`.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, QuadratureError

Integrand = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

# Gauss-Kronrod 10/21 pair (QUADPACK qk21 constants).
_XK_POS = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WK_POS = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG_POS = np.array([
    0.0, 0.066671344308688137593568809893332,
    0.0, 0.149451349150580593145776339657697,
    0.0, 0.219086362515982043995534934228163,
    0.0, 0.269266719309996355091226921569469,
    0.0, 0.295524224714752870173892994651338,
    0.0,
])
_XK = np.concatenate([-_XK_POS[:-1], _XK_POS[::-1]])
_WK = np.concatenate([_WK_POS[:-1], _WK_POS[::-1]])
_WG = np.concatenate([_WG_POS[:-1], _WG_POS[::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits shared by every quadrature call."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    truncation_ratio: float = 1e-16

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if not 0 < self.truncation_ratio < 1:
            raise DomainError(f"truncation_ratio must lie in (0, 1), got {self.truncation_ratio}")

    def target(self, value: float) -> float:
        return max(self.rel_tol * abs(value), self.abs_tol)


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class QuadResult:
    value: float
    err_estimate: float
    evaluations: int
    converged: bool
    truncation_point: Optional[float] = None
    # integral of |f|; err_estimate can never honestly fall below ~eps * abs_integral
    abs_integral: float = 0.0

    def __float__(self) -> float:
        return self.value


def vectorize(fn: Callable[[float], float]) -> Integrand:
    """Lift a scalar callable to the array protocol expected by the engine."""
    vf = np.vectorize(fn, otypes=[float])
    return lambda x: vf(np.asarray(x, dtype=float))


def _eval(f: Integrand, x: np.ndarray) -> np.ndarray:
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape).astype(float)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise QuadratureError(f"integrand returned a non-finite value at x={bad!r}")
    return fx


def _gk21(f: Integrand, a: float, b: float):
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = _eval(f, center + half * _XK)
    hk = abs(half)
    res_k = float(np.dot(_WK, fx)) * half
    res_g = float(np.dot(_WG, fx)) * half
    res_abs = float(np.dot(_WK, np.abs(fx))) * hk
    mean = res_k / (2.0 * half) if half else 0.0
    res_asc = float(np.dot(_WK, np.abs(fx - mean))) * hk
    err = abs(res_k - res_g)
    if res_asc != 0.0 and err != 0.0:
        err = res_asc * min(1.0, (200.0 * err / res_asc) ** 1.5)
    if res_abs > _TINY / (50.0 * _EPS):
        err = max(50.0 * _EPS * res_abs, err)
    return res_k, err, res_abs


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    points: Optional[Sequence[float]] = None,
) -> QuadResult:
    """Adaptive Gauss-Kronrod integration of ``f`` over ``[a, b]``.

    The worst interval is bisected until the summed error estimate meets
    ``spec``.  Endpoints are never evaluated, so integrable endpoint
    singularities are resolved by repeated bisection toward them.  ``points``
    are optional interior breakpoints used for the initial partition.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"integrate_finite needs a < b, got a={a}, b={b}")
    edges = [a]
    if points is not None:
        edges += sorted(float(p) for p in points if a < p < b)
    edges.append(b)

    heap: list = []
    done: list = []  # intervals that cannot be split further
    evaluations = 0
    counter = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, l1 = _gk21(f, lo, hi)
        evaluations += 21
        heapq.heappush(heap, (-err, counter, lo, hi, val, err, l1))
        counter += 1

    total = math.fsum(item[4] for item in heap)
    err_total = math.fsum(item[5] for item in heap)
    subdivisions = 0
    converged = False
    while True:
        if err_total <= spec.target(total):
            converged = True
            break
        if subdivisions >= spec.max_subdivisions or not heap:
            break
        _, _, lo, hi, val, err, l1 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi or (hi - lo) <= 8 * _EPS * max(abs(lo), abs(hi), _TINY):
            done.append((lo, hi, val, err, l1))
            continue
        v1, e1, a1 = _gk21(f, lo, mid)
        v2, e2, a2 = _gk21(f, mid, hi)
        evaluations += 42
        subdivisions += 1
        total += v1 + v2 - val
        err_total += e1 + e2 - err
        if e1 + e2 >= err and e1 + e2 <= 50.5 * _EPS * (a1 + a2):
            # at the roundoff floor; splitting again cannot help
            done.append((lo, mid, v1, e1, a1))
            done.append((mid, hi, v2, e2, a2))
        else:
            heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1, a1))
            heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2, a2))
            counter += 2

    pieces = sorted([(it[2], it[4], it[5], it[6]) for it in heap] + [(d[0], d[2], d[3], d[4]) for d in done])
    value = math.fsum(p[1] for p in pieces)
    err_estimate = math.fsum(p[2] for p in pieces)
    abs_integral = math.fsum(p[3] for p in pieces)
    converged = converged or err_estimate <= spec.target(value)
    return QuadResult(value, err_estimate, evaluations, converged, None, abs_integral)


def find_truncation(
    f: Integrand,
    a: float = 0.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    scale: float = 1.0,
    reach: float = 1e8,
) -> tuple[float, float, int]:
    """Scan ``f`` outward from ``a`` on a geometric grid (4 points per octave).

    Samples are weighted by ``x - a`` so each one measures the integral's mass
    per octave; an integrable spike at ``a`` then cannot inflate the peak.
    Returns ``(cut, peak, evaluations)`` where ``cut`` is the start of the
    first two-octave run, after the largest weighted sample, over which every
    weighted sample is below ``truncation_ratio * peak``.
    """
    if scale <= 0:
        raise DomainError(f"scale must be > 0, got {scale}")
    lo_exp = -40.0
    hi_exp = math.log2(reach / scale)
    offsets = scale * np.exp2(np.arange(lo_exp, hi_exp + 0.25, 0.25))
    peak = 0.0
    run_start = None
    run_len = 0
    evaluations = 0
    for start in range(0, offsets.size, 16):
        x = a + offsets[start:start + 16]
        fx = np.abs(_eval(f, x)) * (x - a)
        evaluations += x.size
        for xi, fi in zip(x, fx):
            if fi > peak:
                peak = float(fi)
                run_start, run_len = None, 0
                continue
            if peak > 0 and fi < spec.truncation_ratio * peak:
                if run_start is None:
                    run_start = float(xi)
                run_len += 1
                if run_len >= 8:
                    return run_start, peak, evaluations
            else:
                run_start, run_len = None, 0
    if peak == 0.0:
        return a, 0.0, evaluations
    raise QuadratureError(
        f"integrand tail did not fall below {spec.truncation_ratio:g} x peak before x={a + reach:g}"
    )


def integrate_semi_infinite(
    f: Integrand,
    a: float = 0.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    scale: float = 1.0,
    reach: float = 1e8,
) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)`` by automatic truncation.

    ``scale`` is a hint for where the integrand lives; it sets the geometric
    scan grid and the initial panel breakpoints.
    """
    cut, peak, n_scan = find_truncation(f, a, spec, scale, reach)
    if peak == 0.0:
        return QuadResult(0.0, 0.0, n_scan, True, a, 0.0)
    width = cut - a
    points = [a + width * 4.0 ** (-k) for k in range(1, 12)]
    res = integrate_finite(f, a, cut, spec, points=points)
    res.evaluations += n_scan
    res.truncation_point = cut
    return res


def convolve(
    f: Integrand,
    g: Integrand,
    t: float,
    sing_f: float = 0.0,
    sing_g: float = 0.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuadResult:
    """Laplace convolution ``(f * g)(t) = int_0^t f(t - xi) g(xi) dxi``.

    Uses ``xi = t sin^2(theta)``, which turns ``xi**s`` endpoint behaviour into
    ``theta**(2 s + 1)``.  The range is split at ``pi/4`` and the upper half is
    reflected so that both halves are integrated toward a well-conditioned
    origin.  ``sing_f``/``sing_g`` are the power exponents of ``f`` and ``g``
    at 0; exponents below -1/2 trigger a power map that removes the singularity.
    """
    if not t > 0:
        raise DomainError(f"convolution needs t > 0, got {t}")
    for name, s in (("sing_f", sing_f), ("sing_g", sing_g)):
        if not s > -1:
            raise DomainError(f"{name}={s} is not integrable (must be > -1)")
    t = float(t)

    def lower(th):
        s = np.sin(th)
        c = np.cos(th)
        return f(t * c * c) * g(t * s * s) * (2.0 * t * s * c)

    def upper(ph):
        s = np.sin(ph)
        c = np.cos(ph)
        return f(t * s * s) * g(t * c * c) * (2.0 * t * s * c)

    quarter = 0.25 * math.pi
    results = []
    for integrand, sing in ((lower, sing_g), (upper, sing_f)):
        power = 1.0
        if 2 * sing + 1 < 0:
            # theta = quarter * w**power flattens theta**(2 s + 1) to w**0
            power = 1.0 / (2 * sing + 2)
        mapped = _power_mapped(integrand, quarter, power)
        points = [2.0 ** (-k) for k in range(1, 7)]
        r = integrate_finite(mapped, 0.0, 1.0, spec, points=points)
        results.append(r)
    lo, hi = results
    return QuadResult(
        lo.value + hi.value,
        lo.err_estimate + hi.err_estimate,
        lo.evaluations + hi.evaluations,
        lo.converged and hi.converged,
        None,
        lo.abs_integral + hi.abs_integral,
    )


def _power_mapped(fn: Integrand, length: float, power: float) -> Integrand:
    def mapped(w):
        return fn(length * w ** power) * (length * power * w ** (power - 1.0))

    return mapped


def _wynn_epsilon(seq: Sequence[float]) -> tuple[float, float]:
    """Wynn epsilon extrapolation of a sequence of partial sums.

    Returns the last even-column estimate and the gap to the previous one.
    """
    n = len(seq)
    prev = [0.0] * (n + 1)
    cur = list(seq)
    estimates = [seq[-1]]
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0.0:
                return cur[i + 1], 0.0
            nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            estimates.append(cur[-1])
    if len(estimates) < 2:
        return estimates[-1], abs(seq[-1] - seq[-2]) if n > 1 else float("inf")
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def integrate_fourier_cos(
    g: Integrand,
    omega: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    max_panels: int = 400,
) -> QuadResult:
    """``int_0^inf g(u) cos(omega u) du`` for a slowly decaying amplitude ``g``.

    The range is cut at the zeros of ``cos(omega u)``; the alternating
    sequence of partial sums is extrapolated with the Wynn epsilon algorithm.
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    period = math.pi / omega
    # the answer can be much smaller than the first panels, so panels get a stricter target
    panel_spec = QuadratureSpec(spec.rel_tol * 1e-2, spec.abs_tol * 1e-2, spec.max_subdivisions, spec.truncation_ratio)

    def integrand(u):
        return g(u) * np.cos(omega * u)

    partial = []
    total = 0.0
    evaluations = 0
    l1 = 0.0
    quad_err = 0.0
    best, best_err = 0.0, float("inf")
    history: list = []
    lo = 0.0
    for k in range(max_panels):
        hi = (k + 0.5) * period
        r = integrate_finite(integrand, lo, hi, panel_spec)
        evaluations += r.evaluations
        quad_err += r.err_estimate
        l1 += r.abs_integral
        total += r.value
        partial.append(total)
        lo = hi
        if k > 0 and abs(r.value) <= spec.truncation_ratio * l1:
            return QuadResult(total, quad_err, evaluations, True, hi, l1)
        if len(partial) >= 8:
            est, gap = _wynn_epsilon(partial[-40:])
            history.append(est)
            # an isolated small gap can be luck; require agreement with recent panels too
            drift = max((abs(est - h) for h in history[-4:-1]), default=float("inf"))
            err = max(gap, drift) + quad_err
            if err < best_err:
                best, best_err = est, err
            if err <= spec.target(est):
                return QuadResult(est, err, evaluations, True, hi, l1)
    return QuadResult(best, best_err, evaluations, best_err <= spec.target(best), lo, l1)
