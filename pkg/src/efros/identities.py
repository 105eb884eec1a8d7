"""Catalog of Efros-type integral identities for the kernel family, with a verifier.

Each identity pairs a left side (usually ``int g(u) K(t, u) du`` over a range,
with ``K(t, u) = inverse transform of exp(-u s^nu)/s^mu``) with an independently
evaluated right side (closed form, convolution or a kernel value at another
index).  ``verify_identity`` compares the two on a grid of parameter points.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
import scipy.special as sc

from . import specfun
from .errors import DomainError, EfrosError, QuadratureError
from .kernel import (
    EULER_GAMMA,
    KernelParams,
    eval_auto,
    eval_extended,
    f_values,
    kernel_scaled,
)
from .quad import DEFAULT_SPEC, QuadratureSpec, convolve, integrate_finite, integrate_semi_infinite

DEFAULT_TOL = 1e-6
NEAR_ZERO = 1e-10
POLE_MARGIN = 0.05

Params = Mapping[str, float]


@dataclass(frozen=True)
class Constraint:
    """A named validity condition on identity parameters."""

    name: str
    check: Callable[[Params], bool]

    def holds(self, params: Params) -> bool:
        try:
            return bool(self.check(params))
        except KeyError:
            return False


@dataclass(frozen=True)
class GridPoint:
    params: Mapping[str, float]
    t: float

    def as_dict(self) -> dict:
        return {"params": dict(self.params), "t": self.t}


@dataclass(frozen=True)
class Identity:
    """One catalog entry.

    ``lhs`` and the callables in ``rhs`` take ``(params, t, spec)``.  ``rhs``
    maps variant names to evaluators; ``default_variant`` is the form the
    identity is verified against.  Extra variants record misprinted readings so
    that their failure stays visible.
    """

    id: str
    formula: str
    weight_desc: str
    rhs_kind: str
    param_names: tuple[str, ...]
    domain: tuple[Constraint, ...]
    grid: tuple[GridPoint, ...]
    lhs: Callable[[Params, float, QuadratureSpec], float] = field(repr=False)
    rhs: Mapping[str, Callable[[Params, float, QuadratureSpec], float]] = field(repr=False)
    default_variant: str = "standard"

    @property
    def variants(self) -> tuple[str, ...]:
        return tuple(self.rhs)

    def check_domain(self, params: Params) -> None:
        missing = [n for n in self.param_names if n not in params]
        if missing:
            raise DomainError(f"{self.id}: missing parameters {missing}")
        for c in self.domain:
            if not c.holds(params):
                raise DomainError(f"{self.id}: parameters {dict(params)} violate constraint {c.name}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "formula": self.formula,
            "weight": self.weight_desc,
            "rhs_kind": self.rhs_kind,
            "params": list(self.param_names),
            "domain": [c.name for c in self.domain],
            "variants": list(self.variants),
            "default_variant": self.default_variant,
            "grid": [g.as_dict() for g in self.grid],
        }


@dataclass
class PointResult:
    params: dict
    t: float
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    passed: bool = False
    error: Optional[str] = None


@dataclass
class IdentityReport:
    id: str
    variant: str
    points: list[PointResult]
    max_rel_residual: float
    passed: bool
    tolerance_used: float
    elapsed: float = 0.0

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "variant": self.variant,
            "passed": self.passed,
            "tolerance_used": self.tolerance_used,
            "max_rel_residual": self.max_rel_residual,
            "points": [
                {
                    "params": p.params,
                    "t": p.t,
                    "lhs": p.lhs,
                    "rhs": p.rhs,
                    "abs_residual": p.abs_residual,
                    "rel_residual": p.rel_residual,
                    "passed": p.passed,
                    "error": p.error,
                }
                for p in self.points
            ],
        }


# numeric building blocks ------------------------------------------------------


def _checked(res, what: str) -> float:
    if not res.converged:
        raise QuadratureError(f"{what}: quadrature did not converge (value={res.value!r}, err={res.err_estimate!r})")
    return res.value


def _kernel(prm: Params) -> KernelParams:
    return KernelParams(prm["nu"], prm["mu"])


def _efros_integral(prm: Params, t: float, spec: QuadratureSpec, weight, lo: float, hi: float) -> float:
    """int_lo^hi weight(u) K(t, u) du."""
    p = _kernel(prm)

    def integrand(u):
        return weight(u) * kernel_scaled(p, t, u, spec)

    if math.isinf(hi):
        res = integrate_semi_infinite(integrand, lo, spec, scale=t ** p.nu)
    else:
        res = integrate_finite(integrand, lo, hi, spec)
    return _checked(res, "weighted kernel integral")


def _efros(weight_of: Callable[[Params], Callable], lo_of=lambda prm: 0.0, hi_of=lambda prm: math.inf):
    def lhs(prm: Params, t: float, spec: QuadratureSpec) -> float:
        return _efros_integral(prm, t, spec, weight_of(prm), lo_of(prm), hi_of(prm))

    return lhs


def _power(a: float) -> Callable:
    """x^(a-1)/Gamma(a) as an array function."""
    rg = specfun.recip_gamma(a)
    return lambda x: x ** (a - 1.0) * rg


def _power_conv(a: float, g, t: float, spec: QuadratureSpec, sing_g: float = 0.0) -> float:
    """(t^(a-1)/Gamma(a)) * g evaluated at t."""
    if not a > 0:
        raise DomainError(f"power convolution needs a > 0, got {a}")
    return _checked(convolve(_power(a), g, t, a - 1.0, sing_g, spec), "power convolution")


def _kernel_value(nu: float, m: float, x: float, spec: QuadratureSpec) -> float:
    """f_{nu,m}(x); indices m >= 1 go through the convolution extension."""
    p = KernelParams(nu, m)
    if m >= 1:
        return eval_extended(p, x, spec).value
    return eval_auto(p, x, spec).value


def _scaled_kernel(nu: float, m: float, a: float, x: float, spec: QuadratureSpec) -> float:
    """inverse transform of exp(-a s^nu)/s^m at x, i.e. a^((m-1)/nu) f_{nu,m}(x a^(-1/nu))."""
    return a ** ((m - 1.0) / nu) * _kernel_value(nu, m, x * a ** (-1.0 / nu), spec)


def _scaled_kernel_values(nu: float, m: float, a: float, spec: QuadratureSpec):
    c = a ** ((m - 1.0) / nu)
    s = a ** (-1.0 / nu)
    return lambda x: c * f_values(nu, m, np.asarray(x) * s, spec)


def _ml(alpha: float, beta: float, coef: float, power: float):
    """x -> E_{alpha,beta}(coef x^power)."""
    return lambda x: specfun.mittag_leffler_values(alpha, beta, coef * np.asarray(x) ** power)


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def _vec(fn):
    return np.vectorize(fn, otypes=[float])


def _gamma_ratio_power(c: float, a: float, t: float) -> float:
    """c t^(a-1)/Gamma(a)."""
    return c * t ** (a - 1.0) * specfun.recip_gamma(a)


# identity definitions -------------------------------------------------------------


def _c(name: str, check) -> Constraint:
    return Constraint(name, check)


NU_RANGE = _c("0 < nu < 1", lambda p: 0 < p["nu"] < 1)
LAM_POS = _c("lam > 0", lambda p: p["lam"] > 0)


def _positive(expr: str, fn) -> Constraint:
    return _c(f"{expr} > 0", lambda p: fn(p) > 0)


def _pole_distance(x: float) -> float:
    if x > 0:
        return x
    return abs(x - round(x))


# ID-01: power weight u^lam on (0, inf)
def _rhs_01(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    a = (lam + 1.0) * nu + mu
    return math.gamma(lam + 1.0) * t ** (a - 1.0) * specfun.recip_gamma(a)


# ID-02: indicator of (0, lam)
def _rhs_02(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _gamma_ratio_power(1.0, nu + mu, t) - _scaled_kernel(nu, nu + mu, lam, t, spec)


# ID-03: 1 - u on (0, 1)
def _rhs_03(prm, t, spec):
    nu, mu = prm["nu"], prm["mu"]
    return (
        _gamma_ratio_power(1.0, nu + mu, t)
        - _gamma_ratio_power(1.0, 2 * nu + mu, t)
        + _kernel_value(nu, 2 * nu + mu, t, spec)
    )


def _rhs_03_swapped(prm, t, spec):
    nu, mu = prm["nu"], prm["mu"]
    return (
        _gamma_ratio_power(1.0, 2 * nu + mu, t)
        - _gamma_ratio_power(1.0, nu + mu, t)
        + _kernel_value(nu, 2 * nu + mu, t, spec)
    )


# ID-04: (u - lam)^mu / Gamma(mu + 1) on (lam, inf)
def _rhs_04(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _scaled_kernel(nu, nu * mu + nu + mu, lam, t, spec)


# ID-05: exp(-alpha u)
def _rhs_05(prm, t, spec):
    nu, mu, alpha = prm["nu"], prm["mu"], prm["alpha"]
    return _power_conv(nu + mu - 1.0, _ml(nu, 1.0, -alpha, nu), t, spec)


# ID-06 / ID-07: shifted exponential weights on (lam, inf)
def _shifted_exp_rhs(prm, t, spec, m: float, exponent: float) -> float:
    nu, lam = prm["nu"], prm["lam"]
    s = lam ** (-1.0 / nu)

    def kern(x):
        return f_values(nu, m, np.asarray(x) * s, spec)

    res = convolve(_ml(nu, 1.0, -1.0, nu), kern, t, 0.0, 0.0, spec)
    return lam ** exponent * _checked(res, "Mittag-Leffler by kernel convolution")


def _rhs_06(prm, t, spec):
    nu, mu = prm["nu"], prm["mu"]
    return _shifted_exp_rhs(prm, t, spec, 2 * nu + mu - 1.0, (2 * nu + mu - 2.0) / nu)


def _rhs_06_printed(prm, t, spec):
    nu, mu = prm["nu"], prm["mu"]
    return _shifted_exp_rhs(prm, t, spec, 2 * nu + mu - 1.0, (nu + mu - 1.0) / nu)


def _rhs_07(prm, t, spec):
    nu, mu = prm["nu"], prm["mu"]
    return _shifted_exp_rhs(prm, t, spec, nu + mu - 1.0, (nu + mu - 2.0) / nu)


# ID-08: ln u
def _rhs_08(prm, t, spec):
    nu, mu = prm["nu"], prm["mu"]
    a = nu + mu
    return (nu - 1.0) * EULER_GAMMA * _gamma_ratio_power(1.0, a, t) + nu * _power_conv(a - 1.0, _log, t, spec)


# ID-09: u^(lam-1) ln u
def _rhs_09_with(prm, t, spec, log_factor: float) -> float:
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    a = lam * nu + mu
    g = math.gamma(lam)
    closed = g * (specfun.digamma(lam) + EULER_GAMMA * nu) * _gamma_ratio_power(1.0, a, t)
    return closed + g * nu * log_factor * _power_conv(a - 1.0, _log, t, spec)


def _rhs_09(prm, t, spec):
    return _rhs_09_with(prm, t, spec, 1.0)


def _rhs_09_printed(prm, t, spec):
    # convolving with ln(t^nu) instead of ln t
    return _rhs_09_with(prm, t, spec, prm["nu"])


# ID-10 .. ID-15: trigonometric and hyperbolic weights
def _trig_rhs(prm, t, spec, coef: float, a: float, ml_order: float, ml_coef: float) -> float:
    nu = prm["nu"]
    return coef * _power_conv(a, _ml(ml_order * nu, 1.0, ml_coef, ml_order * nu), t, spec)


def _rhs_10(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _trig_rhs(prm, t, spec, lam, 2 * nu + mu - 1.0, 2, -lam * lam)


def _rhs_11(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _trig_rhs(prm, t, spec, lam, 2 * nu + mu - 1.0, 2, lam * lam)


def _rhs_12(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _trig_rhs(prm, t, spec, 1.0, nu + mu - 1.0, 2, -lam * lam)


def _rhs_13(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _trig_rhs(prm, t, spec, 1.0, nu + mu - 1.0, 2, lam * lam)


def _rhs_14(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _trig_rhs(prm, t, spec, 2 * lam * lam, 3 * nu + mu - 1.0, 4, -4 * lam**4)


def _rhs_15(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    return _trig_rhs(prm, t, spec, 1.0, nu + mu - 1.0, 4, -4 * lam**4)


# ID-16: u^(beta-1) E_{alpha,beta}(+-lam u^alpha)
def _weight_16(prm):
    alpha, beta, lam, sign = prm["alpha"], prm["beta"], prm["lam"], prm["sign"]
    ml = _ml(alpha, beta, sign * lam, alpha)
    return lambda u: np.asarray(u) ** (beta - 1.0) * ml(u)


def _rhs_16_with(prm, t, spec, t_power: float) -> float:
    nu, mu, alpha, beta, lam, sign = (prm[k] for k in ("nu", "mu", "alpha", "beta", "lam", "sign"))
    a = beta * nu + mu
    e = specfun.mittag_leffler(alpha * nu, a, sign * lam * t**t_power).value
    return t ** (a - 1.0) * e


def _rhs_16(prm, t, spec):
    return _rhs_16_with(prm, t, spec, prm["alpha"] * prm["nu"])


def _rhs_16_printed(prm, t, spec):
    return _rhs_16_with(prm, t, spec, prm["alpha"])


# ID-17: erf(lam / (2 sqrt(u)))
def _weight_17(prm):
    lam = prm["lam"]
    return lambda u: sc.erf(lam / (2.0 * np.sqrt(u)))


def _rhs_17(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    m = nu + mu
    return _gamma_ratio_power(1.0, m, t) - _scaled_kernel(nu / 2.0, m, lam, t, spec)


def _rhs_17_printed(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    x = t ** (nu / 2.0) / lam ** (2.0 / nu)
    return _gamma_ratio_power(1.0, mu, t) - lam ** (2.0 * (mu - 1.0) / nu) * _kernel_value(nu / 2.0, mu, x, spec)


def _rhs_17_rescaled(prm, t, spec):
    # printed prefactors with the kernel argument t / lam^(2/nu)
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    x = t / lam ** (2.0 / nu)
    return _gamma_ratio_power(1.0, mu, t) - lam ** (2.0 * (mu - 1.0) / nu) * _kernel_value(nu / 2.0, mu, x, spec)


# ID-18 .. ID-20: Volterra weights
def _weight_18(prm):
    lam, spec = prm["lam"], DEFAULT_SPEC
    v = _vec(lambda x: specfun.volterra_nu(x, spec))
    return lambda u: v(lam * np.asarray(u))


def _rhs_18(prm, t, spec):
    nu, mu, lam = prm["nu"], prm["mu"], prm["lam"]
    s = lam ** (1.0 / nu)
    v = _vec(lambda x: specfun.volterra_nu(s * x, spec))
    return _power_conv(nu + mu - 1.0, v, t, spec) / nu


def _weight_19(prm):
    lam, rho = prm["lam"], prm["rho"]
    v = _vec(lambda x: specfun.volterra_nu_alpha(x, rho))
    return lambda u: v(lam * np.asarray(u))


def _rhs_19(prm, t, spec):
    nu, mu, lam, rho = prm["nu"], prm["mu"], prm["lam"], prm["rho"]
    s = lam ** (1.0 / nu)
    order = (rho + 1.0) * nu
    v = _vec(lambda x: specfun.volterra_nu_alpha(s * x, order, spec))
    return _power_conv(mu - 1.0, v, t, spec, sing_g=order) / (nu * lam)


def _weight_20(prm):
    lam, xi, rho = prm["lam"], prm["xi"], prm["rho"]
    v = _vec(lambda x: specfun.volterra_mu(x, xi, rho))
    return lambda u: v(lam * np.asarray(u))


def _rhs_20(prm, t, spec):
    nu, mu, lam, xi, rho = prm["nu"], prm["mu"], prm["lam"], prm["xi"], prm["rho"]
    s = lam ** (1.0 / nu)
    order = (rho + 1.0) * nu
    v = _vec(lambda x: specfun.volterra_mu(s * x, xi, order, spec))
    return _power_conv(mu - 1.0, v, t, spec, sing_g=order) / (lam * nu ** (xi + 1.0))


# ID-21: t nu(t, rho) recurrence
def _lhs_21(prm, t, spec):
    return t * specfun.volterra_nu_alpha(t, prm["rho"], spec)


def _rhs_21_with(prm, t, spec, order: float) -> float:
    rho = prm["rho"]
    return (rho + 1.0) * specfun.volterra_nu_alpha(t, order, spec) + specfun.volterra_mu(t, 1.0, order, spec)


def _rhs_21(prm, t, spec):
    return _rhs_21_with(prm, t, spec, prm["rho"] + 1.0)


def _rhs_21_printed(prm, t, spec):
    return _rhs_21_with(prm, t, spec, (prm["rho"] + 1.0) * prm["nu"])


# ID-22 .. ID-24: kernel convolutions
def _kernel_conv(nu: float, mu: float, a: float, rho: float, b: float, t: float, spec: QuadratureSpec) -> float:
    left = _scaled_kernel_values(nu, mu, a, spec)
    right = _scaled_kernel_values(nu, rho, b, spec)
    return _checked(convolve(left, right, t, 0.0, 0.0, spec), "kernel convolution")


def _lhs_22(prm, t, spec):
    return _kernel_conv(prm["nu"], prm["mu"], 1.0, prm["mu"], 1.0, t, spec)


def _rhs_22(prm, t, spec):
    return _scaled_kernel(prm["nu"], 2 * prm["mu"], 2.0, t, spec)


def _lhs_23(prm, t, spec):
    return _kernel_conv(prm["nu"], prm["mu"], 1.0, prm["rho"], 1.0, t, spec)


def _rhs_23(prm, t, spec):
    return _scaled_kernel(prm["nu"], prm["mu"] + prm["rho"], 2.0, t, spec)


def _lhs_24(prm, t, spec):
    return _kernel_conv(prm["nu"], prm["mu"], prm["alpha"], prm["rho"], prm["beta"], t, spec)


def _rhs_24(prm, t, spec):
    return _scaled_kernel(prm["nu"], prm["mu"] + prm["rho"], prm["alpha"] + prm["beta"], t, spec)


# grids ------------------------------------------------------------------------------

NU_GRID = (0.4, 0.5, 0.6)
T_GRID = (0.5, 1.0, 2.0)
MU_GRID = (0.0, 0.25, 0.5, 0.75)
LAM_GRID = (0.5, 1.0)
RHO_GRID = (0.5, 1.0)
GRID_SIZE = 6


def _make_grid(
    axes: Mapping[str, Sequence[float]],
    domain: Sequence[Constraint],
    gamma_args: Callable[[Params], Sequence[float]] = lambda p: (),
    seed: int = 0,
    n: int = GRID_SIZE,
    derived: Callable[[dict], dict] = lambda p: p,
    stratum: Optional[Callable[[Params], tuple]] = None,
    t_grid: Sequence[float] = T_GRID,
) -> tuple[GridPoint, ...]:
    """Pick ``n`` reproducible points from the product of ``axes`` (plus t).

    Candidates must satisfy ``domain`` and keep every Gamma argument at least
    ``POLE_MARGIN`` from a pole.  With ``stratum`` one point per stratum is taken.
    """
    names = list(axes)
    candidates = []
    for combo in itertools.product(*(axes[k] for k in names), t_grid):
        prm = derived(dict(zip(names, combo[:-1])))
        if not all(c.holds(prm) for c in domain):
            continue
        if any(_pole_distance(x) < POLE_MARGIN for x in gamma_args(prm)):
            continue
        candidates.append(GridPoint(prm, combo[-1]))
    rng = np.random.default_rng(seed)
    if stratum is not None:
        groups: dict = {}
        for c in candidates:
            groups.setdefault(stratum(c.params), []).append(c)
        return tuple(g[int(rng.integers(len(g)))] for _, g in sorted(groups.items()))
    if len(candidates) <= n:
        return tuple(candidates)
    picks = sorted(rng.choice(len(candidates), size=n, replace=False))
    return tuple(candidates[i] for i in picks)


def _build_catalog() -> tuple[Identity, ...]:
    entries = []

    def add(id_, formula, weight_desc, rhs_kind, axes, domain, lhs, rhs, default="standard", gamma_args=None, **grid_kw):
        domain = (NU_RANGE,) + tuple(domain)
        grid = _make_grid(axes, domain, gamma_args or (lambda p: ()), seed=len(entries) + 1, **grid_kw)
        rhs = rhs if isinstance(rhs, dict) else {"standard": rhs}
        names = tuple(grid[0].params)
        entries.append(Identity(id_, formula, weight_desc, rhs_kind, names, domain, grid, lhs, rhs, default))

    base = {"nu": NU_GRID, "mu": MU_GRID}

    add(
        "ID-01",
        "int_0^inf u^lam K(t,u) du = Gamma(lam+1) t^((lam+1)nu+mu-1) / Gamma((lam+1)nu+mu)",
        "u^lam on (0, inf)",
        "closed_form",
        {**base, "lam": (0.0, 0.5, 1.0)},
        [_c("lam > -1", lambda p: p["lam"] > -1), _positive("(lam+1)nu+mu", lambda p: (p["lam"] + 1) * p["nu"] + p["mu"])],
        _efros(lambda p: (lambda u, lam=p["lam"]: np.asarray(u) ** lam)),
        _rhs_01,
        gamma_args=lambda p: ((p["lam"] + 1) * p["nu"] + p["mu"],),
    )
    add(
        "ID-02",
        "int_0^lam K(t,u) du = t^(nu+mu-1)/Gamma(nu+mu) - lam^((mu-1)/nu+1) f_{nu,nu+mu}(t/lam^(1/nu))",
        "1 on (0, lam)",
        "kernel_value",
        {**base, "lam": LAM_GRID},
        [LAM_POS],
        _efros(lambda p: (lambda u: np.ones_like(np.asarray(u, dtype=float))), hi_of=lambda p: p["lam"]),
        _rhs_02,
        gamma_args=lambda p: (p["nu"] + p["mu"],),
    )
    add(
        "ID-03",
        "int_0^1 (1-u) K(t,u) du = t^(nu+mu-1)/Gamma(nu+mu) - t^(2nu+mu-1)/Gamma(2nu+mu) + f_{nu,2nu+mu}(t)",
        "1 - u on (0, 1)",
        "kernel_value",
        base,
        [],
        _efros(lambda p: (lambda u: 1.0 - np.asarray(u)), hi_of=lambda p: 1.0),
        {"standard": _rhs_03, "swapped_signs": _rhs_03_swapped},
        gamma_args=lambda p: (p["nu"] + p["mu"],),
    )
    add(
        "ID-04",
        "int_lam^inf (u-lam)^mu/Gamma(mu+1) K(t,u) du = lam^((1/nu+1)mu-1/nu+1) f_{nu,nu+nu mu+mu}(t/lam^(1/nu))",
        "(u - lam)^mu / Gamma(mu+1) on (lam, inf)",
        "kernel_value",
        {**base, "lam": LAM_GRID},
        [LAM_POS, _c("mu >= 0", lambda p: p["mu"] >= 0)],
        _efros(
            lambda p: (lambda u, lam=p["lam"], mu=p["mu"]: (np.asarray(u) - lam) ** mu / math.gamma(mu + 1.0)),
            lo_of=lambda p: p["lam"],
        ),
        _rhs_04,
    )
    add(
        "ID-05",
        "int_0^inf exp(-alpha u) K(t,u) du = t^(nu+mu-2)/Gamma(nu+mu-1) * E_nu(-alpha t^nu)",
        "exp(-alpha u) on (0, inf)",
        "convolution",
        {**base, "alpha": LAM_GRID},
        [_c("alpha > 0", lambda p: p["alpha"] > 0), _positive("nu+mu-1", lambda p: p["nu"] + p["mu"] - 1)],
        _efros(lambda p: (lambda u, a=p["alpha"]: np.exp(-a * np.asarray(u)))),
        _rhs_05,
        gamma_args=lambda p: (p["nu"] + p["mu"] - 1,),
    )
    add(
        "ID-06",
        "int_lam^inf (1-exp(-(u-lam))) K(t,u) du = lam^((2nu+mu-2)/nu) E_nu(-t^nu) * f_{nu,2nu+mu-1}(t/lam^(1/nu))",
        "1 - exp(-(u - lam)) on (lam, inf)",
        "convolution",
        {**base, "lam": (0.5,)},
        [LAM_POS],
        _efros(lambda p: (lambda u, lam=p["lam"]: -np.expm1(-(np.asarray(u) - lam))), lo_of=lambda p: p["lam"]),
        {"standard": _rhs_06, "printed_exponent": _rhs_06_printed},
    )
    add(
        "ID-07",
        "int_lam^inf exp(-(u-lam)) K(t,u) du = lam^((nu+mu-2)/nu) E_nu(-t^nu) * f_{nu,nu+mu-1}(t/lam^(1/nu))",
        "exp(-(u - lam)) on (lam, inf)",
        "convolution",
        {**base, "lam": LAM_GRID},
        [LAM_POS],
        _efros(lambda p: (lambda u, lam=p["lam"]: np.exp(-(np.asarray(u) - lam))), lo_of=lambda p: p["lam"]),
        _rhs_07,
    )
    add(
        "ID-08",
        "int_0^inf ln(u) K(t,u) du = (nu-1) gamma t^(nu+mu-1)/Gamma(nu+mu) + nu t^(nu+mu-2)/Gamma(nu+mu-1) * ln t",
        "ln u on (0, inf)",
        "convolution",
        base,
        [_positive("nu+mu-1", lambda p: p["nu"] + p["mu"] - 1)],
        _efros(lambda p: _log),
        _rhs_08,
        gamma_args=lambda p: (p["nu"] + p["mu"] - 1,),
    )
    add(
        "ID-09",
        "int_0^inf u^(lam-1) ln(u) K(t,u) du = Gamma(lam)(psi(lam)+gamma nu) t^(lam nu+mu-1)/Gamma(lam nu+mu)"
        " + Gamma(lam) nu t^(lam nu+mu-2)/Gamma(lam nu+mu-1) * ln t",
        "u^(lam-1) ln u on (0, inf)",
        "convolution",
        {**base, "lam": (1.0, 2.0)},
        [LAM_POS, _positive("lam nu+mu-1", lambda p: p["lam"] * p["nu"] + p["mu"] - 1)],
        _efros(lambda p: (lambda u, lam=p["lam"]: np.asarray(u) ** (lam - 1.0) * _log(u))),
        {"standard": _rhs_09, "log_of_t_nu": _rhs_09_printed},
        gamma_args=lambda p: (p["lam"] * p["nu"] + p["mu"] - 1,),
    )

    trig = [
        ("ID-10", "sin(lam u)", np.sin, "lam t^(2nu+mu-2)/Gamma(2nu+mu-1) * E_2nu(-lam^2 t^2nu)", _rhs_10, 2),
        ("ID-11", "sinh(lam u)", np.sinh, "lam t^(2nu+mu-2)/Gamma(2nu+mu-1) * E_2nu(lam^2 t^2nu)", _rhs_11, 2),
        ("ID-12", "cos(lam u)", np.cos, "t^(nu+mu-2)/Gamma(nu+mu-1) * E_2nu(-lam^2 t^2nu)", _rhs_12, 1),
        ("ID-13", "cosh(lam u)", np.cosh, "t^(nu+mu-2)/Gamma(nu+mu-1) * E_2nu(lam^2 t^2nu)", _rhs_13, 1),
        (
            "ID-14",
            "sin(lam u) sinh(lam u)",
            lambda x: np.sin(x) * np.sinh(x),
            "2 lam^2 t^(3nu+mu-2)/Gamma(3nu+mu-1) * E_4nu(-4 lam^4 t^4nu)",
            _rhs_14,
            3,
        ),
        (
            "ID-15",
            "cos(lam u) cosh(lam u)",
            lambda x: np.cos(x) * np.cosh(x),
            "t^(nu+mu-2)/Gamma(nu+mu-1) * E_4nu(-4 lam^4 t^4nu)",
            _rhs_15,
            1,
        ),
    ]
    for id_, wdesc, wfun, rdesc, rhs, k in trig:
        nus = (0.4, 0.5) if id_ in ("ID-14", "ID-15") else NU_GRID
        add(
            id_,
            f"int_0^inf {wdesc} K(t,u) du = {rdesc}",
            f"{wdesc} on (0, inf)",
            "convolution",
            {"nu": nus, "mu": MU_GRID, "lam": LAM_GRID},
            [LAM_POS, _positive(f"{k if k > 1 else ''}nu+mu-1", lambda p, k=k: k * p["nu"] + p["mu"] - 1)],
            _efros(lambda p, w=wfun: (lambda u, lam=p["lam"]: w(lam * np.asarray(u)))),
            rhs,
            gamma_args=lambda p, k=k: (k * p["nu"] + p["mu"] - 1,),
        )

    def beta_of(p):
        p = dict(p)
        p["beta"] = {0: 1.0, 1: p["alpha"], 2: p["alpha"] + 1.0}[int(p.pop("beta_case"))]
        return p

    add(
        "ID-16",
        "int_0^inf u^(beta-1) E_{alpha,beta}(+-lam u^alpha) K(t,u) du = t^(beta nu+mu-1) E_{alpha nu,beta nu+mu}(+-lam t^(alpha nu))",
        "u^(beta-1) E_{alpha,beta}(sign lam u^alpha) on (0, inf), beta in {1, alpha, alpha+1}",
        "closed_form",
        {**base, "lam": LAM_GRID, "alpha": (0.5, 1.0), "beta_case": (0, 1, 2), "sign": (-1.0, 1.0)},
        [
            LAM_POS,
            _c("alpha > 0", lambda p: p["alpha"] > 0),
            _c("beta > 0", lambda p: p["beta"] > 0),
            _c("sign in {-1, 1}", lambda p: p["sign"] in (-1.0, 1.0)),
        ],
        _efros(_weight_16),
        {"standard": _rhs_16, "argument_t_alpha": _rhs_16_printed},
        derived=beta_of,
        stratum=lambda p: (p["beta"] - p["alpha"], p["sign"]),
        # at t = 1 the two readings of the argument coincide
        t_grid=(0.5, 2.0),
    )
    add(
        "ID-17",
        "int_0^inf erf(lam/(2 sqrt u)) K(t,u) du = t^(nu+mu-1)/Gamma(nu+mu) - lam^(2(nu+mu-1)/nu) f_{nu/2,nu+mu}(t/lam^(2/nu))",
        "erf(lam / (2 sqrt(u))) on (0, inf)",
        "kernel_value",
        {"nu": NU_GRID, "mu": (0.25, 0.5, 0.75), "lam": LAM_GRID},
        [LAM_POS, _c("0 < mu < 1", lambda p: 0 < p["mu"] < 1)],
        _efros(_weight_17),
        {"standard": _rhs_17, "argument_t_half_nu": _rhs_17_printed, "index_mu": _rhs_17_rescaled},
    )
    add(
        "ID-18",
        "int_0^inf nu(lam u) K(t,u) du = t^(nu+mu-2)/(nu Gamma(nu+mu-1)) * nu(lam^(1/nu) t)",
        "Volterra nu(lam u) on (0, inf)",
        "convolution",
        {**base, "lam": LAM_GRID},
        [LAM_POS, _positive("nu+mu-1", lambda p: p["nu"] + p["mu"] - 1)],
        _efros(_weight_18),
        _rhs_18,
        gamma_args=lambda p: (p["nu"] + p["mu"] - 1,),
        n=4,
    )
    add(
        "ID-19",
        "int_0^inf nu(lam u, rho) K(t,u) du = t^(mu-2)/(Gamma(mu-1) nu lam) * nu(lam^(1/nu) t, (rho+1) nu)",
        "Volterra nu(lam u, rho) on (0, inf)",
        "convolution",
        {"nu": NU_GRID, "mu": (1.2, 1.5), "lam": LAM_GRID, "rho": RHO_GRID},
        [LAM_POS, _c("rho >= 0", lambda p: p["rho"] >= 0), _positive("mu-1", lambda p: p["mu"] - 1)],
        _efros(_weight_19),
        _rhs_19,
        gamma_args=lambda p: (p["mu"] - 1,),
        n=4,
    )
    add(
        "ID-20",
        "int_0^inf mu(lam u, xi, rho) K(t,u) du = t^(mu-2)/(Gamma(mu-1) lam nu^(xi+1)) * mu(lam^(1/nu) t, xi, (rho+1) nu)",
        "Volterra mu(lam u, xi, rho) on (0, inf)",
        "convolution",
        {"nu": NU_GRID, "mu": (1.2, 1.5), "lam": LAM_GRID, "xi": RHO_GRID, "rho": RHO_GRID},
        [
            LAM_POS,
            _c("rho >= 0", lambda p: p["rho"] >= 0),
            _c("xi >= 0", lambda p: p["xi"] >= 0),
            _positive("mu-1", lambda p: p["mu"] - 1),
        ],
        _efros(_weight_20),
        _rhs_20,
        gamma_args=lambda p: (p["mu"] - 1,),
        n=4,
    )
    add(
        "ID-21",
        "t nu(t, rho) = (rho+1) nu(t, rho+1) + mu(t, 1, rho+1)",
        "none (Volterra recurrence from differentiating the transform)",
        "volterra_recurrence",
        {"rho": RHO_GRID, "nu": NU_GRID},
        [_c("rho >= 0", lambda p: p["rho"] >= 0)],
        _lhs_21,
        {"standard": _rhs_21, "order_rho_plus_1_times_nu": _rhs_21_printed},
    )
    add(
        "ID-22",
        "f_{nu,mu} * f_{nu,mu} = 2^((2mu-1)/nu) f_{nu,2mu}(t/2^(1/nu))",
        "none (self-convolution of the kernel)",
        "kernel_value",
        base,
        [],
        _lhs_22,
        _rhs_22,
    )
    add(
        "ID-23",
        "f_{nu,mu} * f_{nu,rho} = 2^((mu+rho-1)/nu) f_{nu,mu+rho}(t/2^(1/nu))",
        "none (convolution of two kernel indices)",
        "kernel_value",
        {**base, "rho": (0.25, 0.5)},
        [],
        _lhs_23,
        _rhs_23,
    )
    add(
        "ID-24",
        "K(t; alpha, mu) * K(t; beta, rho) = (alpha+beta)^((mu+rho-1)/nu) f_{nu,mu+rho}(t/(alpha+beta)^(1/nu))",
        "none (convolution of two scaled kernels)",
        "kernel_value",
        {**base, "rho": (0.25, 0.5), "alpha": LAM_GRID, "beta": LAM_GRID},
        [_c("alpha > 0", lambda p: p["alpha"] > 0), _c("beta > 0", lambda p: p["beta"] > 0)],
        _lhs_24,
        _rhs_24,
    )
    return tuple(entries)


CATALOG: tuple[Identity, ...] = _build_catalog()
_BY_ID = {e.id: e for e in CATALOG}
assert len(CATALOG) == 24, "identity catalog must hold exactly 24 entries"


def get_identity(identity_id: str) -> Identity:
    try:
        return _BY_ID[identity_id]
    except KeyError:
        raise KeyError(f"unknown identity {identity_id!r}") from None


def catalog_json(indent: Optional[int] = 2) -> str:
    """Serialize the catalog (formulas, domains, grids) to JSON."""
    return json.dumps([e.to_json() for e in CATALOG], indent=indent)


# evaluation and verification ------------------------------------------------------


def _resolve(identity) -> Identity:
    return identity if isinstance(identity, Identity) else get_identity(identity)


def efros_lhs(identity, params: Params, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Left side of ``identity`` (the weighted kernel integral, or its convolution/recurrence form)."""
    ident = _resolve(identity)
    ident.check_domain(params)
    try:
        return float(ident.lhs(params, t, spec))
    except QuadratureError as exc:
        raise QuadratureError(f"{ident.id}: {exc}") from exc


def rhs_value(
    identity, params: Params, t: float, spec: QuadratureSpec = DEFAULT_SPEC, variant: Optional[str] = None
) -> float:
    ident = _resolve(identity)
    ident.check_domain(params)
    name = variant or ident.default_variant
    if name not in ident.rhs:
        raise KeyError(f"{ident.id} has no variant {name!r}; choose from {list(ident.rhs)}")
    try:
        return float(ident.rhs[name](params, t, spec))
    except QuadratureError as exc:
        raise QuadratureError(f"{ident.id}: {exc}") from exc


def _judge(points: list[PointResult], tol: float) -> None:
    finite = [abs(p.rhs) for p in points if p.error is None and math.isfinite(p.rhs)]
    scale = max(finite, default=0.0) or 1.0
    for p in points:
        if p.error is not None:
            p.passed = False
        elif abs(p.rhs) < NEAR_ZERO:
            p.passed = p.abs_residual <= tol * scale
        else:
            p.passed = p.rel_residual <= tol


def _evaluate_points(ident: Identity, grid, spec, variants: Sequence[str]) -> dict[str, list[PointResult]]:
    out: dict[str, list[PointResult]] = {v: [] for v in variants}
    for g in grid:
        prm = dict(g.params)
        ident.check_domain(prm)
        lhs_err = None
        try:
            lhs = efros_lhs(ident, prm, g.t, spec)
        except (EfrosError, ArithmeticError, ValueError) as exc:
            lhs, lhs_err = math.nan, f"lhs: {exc}"
        for v in variants:
            err = lhs_err
            rhs = math.nan
            if err is None:
                try:
                    rhs = rhs_value(ident, prm, g.t, spec, v)
                except (EfrosError, ArithmeticError, ValueError) as exc:
                    err = f"rhs: {exc}"
            diff = abs(lhs - rhs)
            rel = diff / abs(rhs) if rhs != 0 else (0.0 if diff == 0 else math.inf)
            if err is not None:
                diff = rel = math.inf
            out[v].append(PointResult(prm, g.t, lhs, rhs, diff, rel, error=err))
    return out


def _report(ident_id: str, variant: str, points: list[PointResult], tol: float, elapsed: float) -> IdentityReport:
    _judge(points, tol)
    max_rel = max((p.rel_residual for p in points), default=0.0)
    return IdentityReport(ident_id, variant, points, max_rel, all(p.passed for p in points), tol, elapsed)


def _as_grid(grid) -> tuple[GridPoint, ...]:
    pts = []
    for g in grid:
        if isinstance(g, GridPoint):
            pts.append(g)
        else:
            prm, t = g
            pts.append(GridPoint(dict(prm), float(t)))
    return tuple(pts)


def verify_identity(
    identity_id: str,
    grid=None,
    tol: float = DEFAULT_TOL,
    spec: QuadratureSpec = DEFAULT_SPEC,
    variant: Optional[str] = None,
) -> IdentityReport:
    """Compare both sides of one identity on its default grid (or ``grid``).

    ``grid`` entries are GridPoint objects or ``(params, t)`` pairs.  Evaluation
    failures are recorded on the point and fail the report; out-of-domain
    parameters raise DomainError before anything is evaluated.
    """
    ident = get_identity(identity_id)
    pts = ident.grid if grid is None else _as_grid(grid)
    for g in pts:
        ident.check_domain(g.params)
    name = variant or ident.default_variant
    if name not in ident.rhs:
        raise KeyError(f"{ident.id} has no variant {name!r}")
    start = time.perf_counter()
    results = _evaluate_points(ident, pts, spec, [name])[name]
    return _report(ident.id, name, results, tol, time.perf_counter() - start)


def compare_variants(
    identity_id: str, grid=None, tol: float = DEFAULT_TOL, spec: QuadratureSpec = DEFAULT_SPEC
) -> dict[str, IdentityReport]:
    """Reports for every variant of an identity, sharing one left-side evaluation per point."""
    ident = get_identity(identity_id)
    pts = ident.grid if grid is None else _as_grid(grid)
    start = time.perf_counter()
    by_variant = _evaluate_points(ident, pts, spec, ident.variants)
    elapsed = time.perf_counter() - start
    return {v: _report(ident.id, v, by_variant[v], tol, elapsed) for v in ident.variants}


def _verify_worker(args) -> IdentityReport:
    identity_id, tol, spec = args
    return verify_identity(identity_id, tol=tol, spec=spec)


def verify_all(
    tol: float = DEFAULT_TOL,
    spec: QuadratureSpec = DEFAULT_SPEC,
    workers: int = 1,
    ids: Optional[Sequence[str]] = None,
) -> list[IdentityReport]:
    """Verify every catalog identity on its default grid; reports come back in id order."""
    ids = [e.id for e in CATALOG] if ids is None else list(ids)
    for i in ids:
        get_identity(i)
    jobs = [(i, tol, spec) for i in sorted(ids)]
    if workers <= 1:
        return [_verify_worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_verify_worker, jobs))
