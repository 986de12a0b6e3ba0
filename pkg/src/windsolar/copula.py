"""Frank copula: evaluation, fitting, conditional sampling.

The copula couples wind speed (first argument, ``u``) with precipitation
(second argument, ``v``).  ``theta > 0`` gives positive dependence,
``theta < 0`` negative, and ``theta -> 0`` the independence copula.
Parameters are clamped to ``|theta| <= THETA_MAX`` to avoid overflow.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, stats

from .errors import EstimationError, ValidationError
from .rng import open_uniform

THETA_MAX = 50.0
THETA_ZERO = 1e-8
# below this |theta| the expm1/log1p forms are used; above, the
# cancellation-free exponential sum form
_DIRECT_FORM = 1.0


def _result(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _generator_sum(u, v, theta):
    """Return N = (e^-t - 1) + (e^-tu - 1)(e^-tv - 1), the bracket of C and c."""
    if theta >= _DIRECT_FORM:
        a = np.exp(-theta * u)
        b = np.exp(-theta * v)
        return math.exp(-theta) - a - b + a * b
    return math.expm1(-theta) + np.expm1(-theta * u) * np.expm1(-theta * v)


def copula_cdf(u, v, theta):
    """Frank copula C(u, v).

    ``-(1/theta) ln[1 + (e^-theta u - 1)(e^-theta v - 1) / (e^-theta - 1)]``;
    returns ``u v`` for ``|theta| < 1e-8``.  Results are clipped to the
    Frechet bounds, which only affects round-off.
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    theta = float(np.clip(theta, -THETA_MAX, THETA_MAX))
    if abs(theta) < THETA_ZERO:
        c = u * v
    else:
        d = math.expm1(-theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            if theta >= _DIRECT_FORM:
                c = -(np.log(_generator_sum(u, v, theta) / d)) / theta
            else:
                c = -np.log1p(np.expm1(-theta * u) * np.expm1(-theta * v) / d) / theta
    c = np.clip(c, np.maximum(u + v - 1.0, 0.0), np.minimum(u, v))
    return _result(c)


def copula_pdf(u, v, theta):
    """Frank copula density c(u, v) = d^2 C / du dv."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = float(np.clip(theta, -THETA_MAX, THETA_MAX))
    if abs(theta) < THETA_ZERO:
        return _result(np.ones(np.broadcast(u, v).shape))
    d = math.expm1(-theta)
    n = _generator_sum(u, v, theta)
    dens = -theta * d * np.exp(-theta * (u + v)) / (n * n)
    return _result(dens)


def copula_logpdf(u, v, theta):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(copula_pdf(u, v, theta), dtype=float))


def conditional_cdf(v, u, theta):
    """h(v | u) = dC/du, the distribution of V given U = u."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = float(np.clip(theta, -THETA_MAX, THETA_MAX))
    if abs(theta) < THETA_ZERO:
        return _result(np.clip(v + 0.0 * u, 0.0, 1.0))
    n = _generator_sum(u, v, theta)
    h = np.exp(-theta * u) * np.expm1(-theta * v) / n
    return _result(np.clip(h, 0.0, 1.0))


def conditional_quantile(w, u, theta):
    """Inverse of :func:`conditional_cdf` in ``v`` (closed form)."""
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    theta = float(np.clip(theta, -THETA_MAX, THETA_MAX))
    if abs(theta) < THETA_ZERO:
        return _result(np.clip(w + 0.0 * u, 0.0, 1.0))
    a = np.exp(-theta * u)
    if abs(theta) < _DIRECT_FORM:
        v = -np.log1p(w * math.expm1(-theta) / (w + (1.0 - w) * a)) / theta
    else:
        # 1 + w (e^-t - 1) / (w + (1-w) a) rewritten as a ratio of positive terms
        v = -(np.log(w * math.exp(-theta) + (1.0 - w) * a) - np.log(w + (1.0 - w) * a)) / theta
    return _result(np.clip(v, 0.0, 1.0))


def rectangle_probability(theta, u1, u2, v1, v2):
    """P(u1 < U <= u2, v1 < V <= v2) by inclusion-exclusion."""
    return _result(
        copula_cdf(u2, v2, theta)
        - copula_cdf(u1, v2, theta)
        - copula_cdf(u2, v1, theta)
        + copula_cdf(u1, v1, theta)
    )


def debye1(x):
    """First Debye function D1(x) = (1/x) int_0^x t / (e^t - 1) dt."""
    if x == 0:
        return 1.0
    if x < 0:
        return debye1(-x) - x / 2.0
    val, _ = integrate.quad(lambda t: t / math.expm1(t) if t > 0 else 1.0, 0.0, x, epsabs=1e-14, epsrel=1e-13)
    return val / x


def kendall_tau(theta):
    """Kendall's tau of the Frank copula: 1 - (4/theta)(1 - D1(theta))."""
    if abs(theta) < THETA_ZERO:
        return 0.0
    return 1.0 - 4.0 / theta * (1.0 - debye1(theta))


def theta_from_tau(tau):
    """Invert :func:`kendall_tau`; saturates at +-THETA_MAX."""
    if abs(tau) < 1e-12:
        return 0.0
    tau_hi = kendall_tau(THETA_MAX)
    if tau >= tau_hi:
        return THETA_MAX
    if tau <= -tau_hi:
        return -THETA_MAX
    if abs(tau) < kendall_tau(1e-6):
        # tau = theta / 9 + O(theta^3) near independence
        return 9.0 * tau
    f = lambda t: kendall_tau(t) - tau
    lo, hi = (1e-6, THETA_MAX) if tau > 0 else (-THETA_MAX, -1e-6)
    return optimize.brentq(f, lo, hi, xtol=1e-12)


def pseudo_observations(x):
    """Rank transform to (0, 1): rank / (n + 1), average ranks for ties."""
    x = np.asarray(x, dtype=float)
    return stats.rankdata(x) / (x.size + 1.0)


@dataclass(frozen=True)
class FrankCopula:
    theta: float
    report: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise ValidationError("copula parameter must be finite")

    def cdf(self, u, v):
        return copula_cdf(u, v, self.theta)

    def pdf(self, u, v):
        return copula_pdf(u, v, self.theta)

    def kendall_tau(self):
        return kendall_tau(self.theta)

    def rectangle_probability(self, u1, u2, v1, v2):
        return rectangle_probability(self.theta, u1, u2, v1, v2)

    def sample_uniforms(self, rng, n):
        return sample_uniforms(self.theta, rng, n)


def _empirical_tail_dependence(u, v, q=0.95):
    upper = np.mean(v[u > q] > q) if np.any(u > q) else float("nan")
    lower = np.mean(v[u < 1 - q] < 1 - q) if np.any(u < 1 - q) else float("nan")
    return float(upper), float(lower)


def fit_theta(wind, precip, wet_only=True, min_pairs=100):
    """Fit the Frank parameter by maximum pseudo-likelihood.

    Pairs with nonpositive precipitation are dropped when ``wet_only``.
    The Kendall-tau inversion centres a bounded scalar search.  The returned
    copula's ``report`` holds theta, tau, log-likelihood, AIC, n, flags and
    tail-dependence figures (the Frank family has none analytically).
    """
    x = np.asarray(wind, dtype=float).ravel()
    y = np.asarray(precip, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValidationError("wind and precipitation arrays differ in length")
    keep = np.isfinite(x) & np.isfinite(y)
    if wet_only:
        keep &= y > 0
    x, y = x[keep], y[keep]
    n = x.size
    if n < min_pairs:
        raise ValidationError(f"copula fit needs >= {min_pairs} pairs, got {n}")
    u = pseudo_observations(x)
    v = pseudo_observations(y)
    tau = float(stats.kendalltau(x, y).statistic)
    flags = []
    upper, lower = _empirical_tail_dependence(u, v)
    report = {
        "n": int(n),
        "kendall_tau": tau,
        "tail_dependence": {
            "analytic_upper": 0.0,
            "analytic_lower": 0.0,
            "empirical_upper_q95": upper,
            "empirical_lower_q95": lower,
        },
    }
    if not np.isfinite(tau):
        raise EstimationError("Kendall tau is undefined (constant input?)")
    if abs(tau) < 1e-3:
        flags.append("independence")
        theta = 0.0
        loglik = 0.0
    else:
        theta0 = theta_from_tau(tau)
        if abs(theta0) >= THETA_MAX:
            flags.append("saturated")
            theta = math.copysign(THETA_MAX, theta0)
            loglik = float(np.sum(copula_logpdf(u, v, theta)))
        else:

            def nll(t):
                ll = np.sum(copula_logpdf(u, v, t))
                return -ll if np.isfinite(ll) else 1e300

            # one-dimensional bounded search in a window around the tau start
            half = 2.0 + abs(theta0)
            lo, hi = max(-THETA_MAX, theta0 - half), min(THETA_MAX, theta0 + half)
            res = optimize.minimize_scalar(nll, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
            if not res.success or not np.isfinite(res.fun):
                raise EstimationError(f"Frank copula fit did not converge: {res.message}")
            theta = float(res.x)
            loglik = float(-res.fun)
            if abs(theta) >= THETA_MAX - 1e-9:
                flags.append("saturated")
    report.update(
        theta=theta,
        loglik=loglik,
        aic=2.0 * (0 if "independence" in flags else 1) - 2.0 * loglik,
        flags=flags,
    )
    return FrankCopula(theta=theta, report=report)


def report_json(cop):
    return json.dumps(cop.report, sort_keys=True)


def sample_uniforms(theta, rng, n):
    """(n, 2) array of copula draws via conditional inversion."""
    u = open_uniform(rng, n)
    w = open_uniform(rng, n)
    v = conditional_quantile(w, u, theta)
    return np.column_stack([u, v])


def sample_joint(theta, marginal_wind, marginal_precip, rng, n):
    """(n, 2) array of (wind, precip) draws with Frank dependence."""
    uv = sample_uniforms(theta, rng, int(n))
    eps = np.finfo(float).epsneg
    uv = np.clip(uv, np.finfo(float).tiny, 1.0 - eps)
    wind = marginal_wind.quantile(uv[:, 0])
    precip = marginal_precip.quantile(uv[:, 1])
    return np.column_stack([wind, precip])
