"""Parametric marginal models for wind speed, irradiance and precipitation.

Five model kinds are provided, each as a frozen dataclass carrying its
parameters plus an optional ``meta`` dict of fit metadata:

* :class:`WeibullParams` -- wind speed (m/s)
* :class:`BetaParams` -- normalized irradiance on [0, 1]
* :class:`GevParams` -- generalized extreme value
* :class:`GpParams` -- generalized Pareto
* :class:`GevGpSplice` -- GEV body below a threshold, GP tail above it

The shape parameter ``shape`` of GEV/GP follows the climatological sign
convention (``shape > 0`` is heavy tailed). Note that ``scipy.stats``
uses the opposite sign for ``genextreme``.

Module-level functions (``weibull_pdf``, ``gev_cdf`` ...) hold the math;
the dataclass methods delegate to them.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from .errors import (
    EstimationError,
    InfeasibleMomentsError,
    ParameterDomainError,
    TailSparsityError,
    ValidationError,
)
from .rng import open_uniform

# |shape| below this uses the Gumbel / exponential limit forms
SHAPE_ZERO = 1e-12

WEIBULL_SHAPE_EXPONENT = -1.086


class FitQualityWarning(UserWarning):
    """Fitted parameters are outside the range the estimator is meant for."""


def _scalar_or_array(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ParameterDomainError(f"{name} must be finite and > 0, got {value!r}")


# --------------------------------------------------------------------------
# Weibull


def weibull_pdf(v, p):
    v = np.asarray(v, dtype=float)
    k, c = p.k, p.c
    z = np.where(v > 0, v / c, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = (k / c) * z ** (k - 1.0) * np.exp(-(z**k))
    dens = np.where(v < 0, 0.0, dens)
    return _scalar_or_array(dens)


def weibull_logpdf(v, p):
    v = np.asarray(v, dtype=float)
    k, c = p.k, p.c
    with np.errstate(divide="ignore", invalid="ignore"):
        z = v / c
        out = math.log(k / c) + special.xlogy(k - 1.0, z) - z**k
    return _scalar_or_array(np.where(v < 0, -np.inf, out))


def weibull_cdf(v, p):
    v = np.asarray(v, dtype=float)
    z = np.where(v > 0, v / p.c, 0.0)
    with np.errstate(over="ignore"):
        return _scalar_or_array(-np.expm1(-(z**p.k)))


def weibull_quantile(prob, p):
    prob = np.asarray(prob, dtype=float)
    return _scalar_or_array(p.c * (-np.log1p(-prob)) ** (1.0 / p.k))


def weibull_from_mean_rayleigh(v_w):
    """Rayleigh (k = 2) Weibull whose mean equals ``v_w``.

    ``c = 2 v_w / sqrt(pi)`` because the k = 2 mean is ``c * Gamma(3/2)``.
    The resulting CDF is ``1 - exp(-(pi/4) (v / v_w)**2)``.
    """
    if not (np.isfinite(v_w) and v_w > 0):
        raise ParameterDomainError(f"mean wind speed must be > 0, got {v_w!r}")
    return WeibullParams(k=2.0, c=2.0 * v_w / math.sqrt(math.pi))


def weibull_fit_moments(mean, std):
    """Shape/scale from mean and standard deviation.

    Uses the empirical power law ``k = (std / mean) ** -1.086`` and then
    ``c = mean / Gamma(1 + 1/k)``, so the mean is reproduced exactly while
    the standard deviation is only approximate (about 1% for 1 <= k <= 10).
    """
    if not (np.isfinite(mean) and mean > 0 and np.isfinite(std) and std > 0):
        raise ParameterDomainError(f"mean and std must be > 0, got {mean!r}, {std!r}")
    if std >= 5.0 * mean:
        warnings.warn(
            f"std/mean = {std / mean:.3g} is outside the range of the power-law "
            "shape estimator",
            FitQualityWarning,
            stacklevel=2,
        )
    k = (std / mean) ** WEIBULL_SHAPE_EXPONENT
    c = mean / special.gamma(1.0 + 1.0 / k)
    return WeibullParams(k=float(k), c=float(c), meta={"method": "moments"})


def weibull_fit_mle(samples):
    """Two-parameter Weibull by maximum likelihood (location fixed at 0)."""
    x = _clean_samples(samples)
    if np.any(x <= 0):
        raise ValidationError("Weibull maximum likelihood needs strictly positive samples")
    k, _, c = stats.weibull_min.fit(x, floc=0.0)
    model = WeibullParams(k=float(k), c=float(c))
    ll = float(np.sum(weibull_logpdf(x, model)))
    return WeibullParams(k=model.k, c=model.c, meta={"method": "mle", "n": int(x.size), "loglik": ll})


# --------------------------------------------------------------------------
# Beta


def beta_pdf(s, p):
    s = np.asarray(s, dtype=float)
    a, b = p.alpha, p.beta
    inside = (s >= 0) & (s <= 1)
    sc = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logd = special.xlogy(a - 1.0, sc) + special.xlog1py(b - 1.0, -sc) - special.betaln(a, b)
        dens = np.exp(logd)
    return _scalar_or_array(np.where(inside, dens, 0.0))


def beta_logpdf(s, p):
    with np.errstate(divide="ignore"):
        return _scalar_or_array(np.log(np.asarray(beta_pdf(s, p), dtype=float)))


def beta_cdf(s, p):
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return _scalar_or_array(special.betainc(p.alpha, p.beta, s))


def beta_quantile(prob, p):
    return _scalar_or_array(special.betaincinv(p.alpha, p.beta, np.asarray(prob, dtype=float)))


def beta_fit_moments(mean, std):
    """Moment-matched Beta for a variable on [0, 1].

    ``alpha = mean * (mean (1 - mean) / var - 1)`` and
    ``beta = (1 - mean) * (mean (1 - mean) / var - 1)``.
    """
    if not (0.0 < mean < 1.0):
        raise InfeasibleMomentsError(f"Beta mean must lie in (0, 1), got {mean!r}")
    var = float(std) ** 2
    bound = mean * (1.0 - mean)
    if not (var > 0) or var >= bound:
        raise InfeasibleMomentsError(
            f"Beta variance {var!r} must lie in (0, mean(1-mean) = {bound!r})"
        )
    common = bound / var - 1.0
    return BetaParams(alpha=mean * common, beta=(1.0 - mean) * common, meta={"method": "moments"})


def beta_fit_mle(samples):
    x = _clean_samples(samples)
    if np.any((x <= 0) | (x >= 1)):
        raise ValidationError("Beta maximum likelihood needs samples strictly inside (0, 1)")
    a, b, _, _ = stats.beta.fit(x, floc=0.0, fscale=1.0)
    model = BetaParams(alpha=float(a), beta=float(b))
    ll = float(np.sum(beta_logpdf(x, model)))
    return BetaParams(alpha=model.alpha, beta=model.beta, meta={"method": "mle", "n": int(x.size), "loglik": ll})


# --------------------------------------------------------------------------
# GEV


def _gev_logt(x, loc, scale, shape):
    """Return (log t, in_support) with t = (1 + shape z)**(-1/shape)."""
    z = (np.asarray(x, dtype=float) - loc) / scale
    if abs(shape) < SHAPE_ZERO:
        return -z, np.ones_like(z, dtype=bool)
    arg = shape * z
    ok = arg > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        logt = -np.log1p(np.where(ok, arg, 0.0)) / shape
    return logt, ok


def gev_logpdf(x, p):
    logt, ok = _gev_logt(x, p.loc, p.scale, p.shape)
    with np.errstate(over="ignore"):
        out = -math.log(p.scale) + (p.shape + 1.0) * logt - np.exp(logt)
    return _scalar_or_array(np.where(ok, out, -np.inf))


def gev_pdf(x, p):
    return _scalar_or_array(np.exp(np.asarray(gev_logpdf(x, p))))


def gev_cdf(x, p):
    logt, ok = _gev_logt(x, p.loc, p.scale, p.shape)
    with np.errstate(over="ignore"):
        inside = np.exp(-np.exp(logt))
    # outside the support: below the lower endpoint (shape > 0) or above the upper one
    outside = 0.0 if p.shape > 0 else 1.0
    return _scalar_or_array(np.where(ok, inside, outside))


def gev_quantile(prob, p):
    y = -np.log(np.asarray(prob, dtype=float))
    if abs(p.shape) < SHAPE_ZERO:
        return _scalar_or_array(p.loc - p.scale * np.log(y))
    return _scalar_or_array(p.loc + p.scale * np.expm1(-p.shape * np.log(y)) / p.shape)


def _gev_pwm_start(x):
    """Probability-weighted-moment estimates (Hosking's approximation)."""
    x = np.sort(x)
    n = x.size
    i = np.arange(n, dtype=float)
    b0 = x.mean()
    b1 = np.sum(i / (n - 1) * x) / n
    b2 = np.sum(i * (i - 1) / ((n - 1) * (n - 2)) * x) / n
    denom = 3.0 * b2 - b0
    if denom == 0 or 2.0 * b1 - b0 <= 0:
        return b0, max(x.std(), 1e-12), 0.0
    cc = (2.0 * b1 - b0) / denom - math.log(2) / math.log(3)
    kh = 7.8590 * cc + 2.9554 * cc * cc
    kh = float(np.clip(kh, -0.95, 0.95))
    if abs(kh) < 1e-6:
        scale = (2.0 * b1 - b0) / math.log(2)
        return b0 - np.euler_gamma * scale, scale, 0.0
    g = special.gamma(1.0 + kh)
    scale = (2.0 * b1 - b0) * kh / (g * (1.0 - 2.0 ** (-kh)))
    loc = b0 + scale * (g - 1.0) / kh
    return loc, scale, -kh


def _simplex(x0, step):
    x0 = np.asarray(x0, dtype=float)
    return np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])


def _minimize_nm(fun, x0):
    opts = {"xatol": 1e-10, "fatol": 1e-10, "maxiter": 20000, "maxfev": 40000}
    res = optimize.minimize(
        fun, x0, method="Nelder-Mead", options={**opts, "initial_simplex": _simplex(x0, 0.1)}
    )
    # restart from the optimum; cheap insurance against a collapsed simplex
    res = optimize.minimize(
        fun, res.x, method="Nelder-Mead", options={**opts, "initial_simplex": _simplex(res.x, 0.01)}
    )
    if not np.isfinite(res.fun):
        raise EstimationError("maximum likelihood failed: objective is not finite")
    return res


def _gev_fit_standardized(z, upper=None, lower=None, n_censored=0):
    """MLE for GEV on standardized data.

    ``upper`` truncates the law above that point; ``n_censored``
    observations are known only to lie at or below ``lower``.
    """

    def nll(theta):
        m, log_s, xi = theta
        p = GevParams(m, math.exp(log_s), xi, _validate=False)
        lp = gev_logpdf(z, p)
        total = np.sum(lp)
        if not np.isfinite(total):
            return np.inf
        if upper is not None:
            gu = gev_cdf(upper, p)
            if gu <= 0:
                return np.inf
            total -= z.size * math.log(gu)
        if n_censored:
            gl = gev_cdf(lower, p)
            if gl <= 0:
                return np.inf
            total += n_censored * math.log(gl)
        return -total

    starts = []
    m0, s0, xi0 = _gev_pwm_start(z)
    if n_censored:
        # shift the start so the censoring point carries some probability
        m0 = min(m0, lower + s0)
    for xi in (xi0, 0.5 * xi0, 0.0):
        starts.append(np.array([m0, math.log(s0), xi]))
    for x0 in starts:
        if np.isfinite(nll(x0)):
            res = _minimize_nm(nll, x0)
            if not res.success:
                raise EstimationError(f"GEV fit did not converge: {res.message}")
            m, log_s, xi = res.x
            return m, math.exp(log_s), xi, -res.fun
    raise EstimationError("no feasible starting point for the GEV fit")


def gev_fit_mle(samples, censor_below=None):
    """Maximum-likelihood GEV (Nelder-Mead, PWM initialization).

    With ``censor_below`` set, samples at or below that value are treated
    as left-censored (e.g. calm hours recorded as 0 m/s).
    """
    x = _clean_samples(samples)
    n_cens = 0
    if censor_below is not None:
        cens = x <= censor_below
        n_cens = int(cens.sum())
        x = x[~cens]
    if x.size < 10:
        raise ValidationError("GEV fit needs at least 10 uncensored samples")
    loc0, scale0, _ = _gev_pwm_start(x)
    scale0 = scale0 if scale0 > 0 else max(x.std(), 1e-12)
    z = (x - loc0) / scale0
    lower = None if censor_below is None else (censor_below - loc0) / scale0
    m, s, xi, ll = _gev_fit_standardized(z, lower=lower, n_censored=n_cens)
    loglik = ll - x.size * math.log(scale0)
    meta = {"method": "mle", "n": int(x.size + n_cens), "loglik": float(loglik)}
    if censor_below is not None:
        meta["censor_below"] = float(censor_below)
        meta["n_censored"] = n_cens
    return GevParams(
        loc=float(loc0 + scale0 * m),
        scale=float(scale0 * s),
        shape=float(xi),
        meta=meta,
    )


# --------------------------------------------------------------------------
# GP


def _gp_logs(x, loc, scale, shape):
    """Return (log survival, in_support) for the GP distribution."""
    z = (np.asarray(x, dtype=float) - loc) / scale
    above = z >= 0
    if abs(shape) < SHAPE_ZERO:
        return -z, above, z
    arg = shape * z
    ok = above & (arg > -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = -np.log1p(np.where(ok, arg, 0.0)) / shape
    return logs, ok, z


def gp_logpdf(x, p):
    logs, ok, _ = _gp_logs(x, p.loc, p.scale, p.shape)
    out = -math.log(p.scale) + (p.shape + 1.0) * logs
    return _scalar_or_array(np.where(ok, out, -np.inf))


def gp_pdf(x, p):
    return _scalar_or_array(np.exp(np.asarray(gp_logpdf(x, p))))


def gp_cdf(x, p):
    logs, ok, z = _gp_logs(x, p.loc, p.scale, p.shape)
    inside = -np.expm1(logs)
    return _scalar_or_array(np.where(ok, inside, np.where(z < 0, 0.0, 1.0)))


def gp_quantile(prob, p):
    lq = np.log1p(-np.asarray(prob, dtype=float))
    if abs(p.shape) < SHAPE_ZERO:
        return _scalar_or_array(p.loc - p.scale * lq)
    return _scalar_or_array(p.loc + p.scale * np.expm1(-p.shape * lq) / p.shape)


def gp_fit_mle(samples, loc=None):
    """Maximum-likelihood GP with fixed location.

    ``loc`` defaults to the sample minimum, which is the likelihood
    maximizer for the location whenever the density is decreasing.
    """
    x = _clean_samples(samples)
    estimate_loc = loc is None
    if estimate_loc:
        loc = float(x.min())
    y = x - loc
    if np.any(y < 0):
        raise ValidationError("GP samples must not lie below the location")
    if y.size < 10:
        raise ValidationError("GP fit needs at least 10 samples")
    m, v = y.mean(), y.var()
    if m <= 0:
        raise EstimationError("GP fit needs exceedances above the location")
    ratio = m * m / v if v > 0 else 1.0
    xi0 = float(np.clip(0.5 * (1.0 - ratio), -0.45, 0.9))
    s0 = 0.5 * m * (ratio + 1.0)
    w = y / s0

    def nll(theta):
        log_s, xi = theta
        lp = gp_logpdf(w, GpParams(0.0, math.exp(log_s), xi, _validate=False))
        total = np.sum(lp)
        return -total if np.isfinite(total) else np.inf

    x0 = np.array([0.0, xi0])
    if not np.isfinite(nll(x0)):
        x0 = np.array([0.0, 0.0])
    res = _minimize_nm(nll, x0)
    log_s, xi = res.x
    scale = s0 * math.exp(log_s)
    loglik = -res.fun - y.size * math.log(s0)
    return GpParams(
        loc=float(loc),
        scale=float(scale),
        shape=float(xi),
        meta={
            "method": "mle",
            "n": int(x.size),
            "loglik": float(loglik),
            "n_params": 3 if estimate_loc else 2,
        },
    )


# --------------------------------------------------------------------------
# GEV body + GP tail splice


def splice_cdf(x, p):
    x = np.asarray(x, dtype=float)
    below = (1.0 - p.p_tail) * np.asarray(gev_cdf(x, p.body)) / p.body_mass
    above = 1.0 - p.p_tail * (1.0 - np.asarray(gp_cdf(x, p.tail)))
    return _scalar_or_array(np.where(x < p.threshold, np.minimum(below, 1.0 - p.p_tail), above))


def splice_pdf(x, p):
    x = np.asarray(x, dtype=float)
    below = (1.0 - p.p_tail) * np.asarray(gev_pdf(x, p.body)) / p.body_mass
    above = p.p_tail * np.asarray(gp_pdf(x, p.tail))
    return _scalar_or_array(np.where(x < p.threshold, below, above))


def splice_logpdf(x, p):
    with np.errstate(divide="ignore"):
        return _scalar_or_array(np.log(np.asarray(splice_pdf(x, p))))


def splice_quantile(prob, p):
    prob = np.asarray(prob, dtype=float)
    flat = prob.ravel()
    out = np.empty_like(flat)
    body_share = 1.0 - p.p_tail
    in_body = flat < body_share
    pb = flat[in_body] / body_share * p.body_mass
    out[in_body] = np.minimum(gev_quantile(pb, p.body), p.threshold)
    if p.p_tail > 0:
        pt = 1.0 - (1.0 - flat[~in_body]) / p.p_tail
        out[~in_body] = gp_quantile(np.clip(pt, 0.0, 1.0), p.tail)
    else:
        out[~in_body] = p.threshold
    return _scalar_or_array(out.reshape(prob.shape))


def splice_fit(samples, threshold_quantile=0.95, wet_only=True):
    """Fit a GEV body / GP tail splice.

    The threshold ``u`` is the empirical ``threshold_quantile`` of the
    samples. The GEV is fitted by maximum likelihood to the samples at or
    below ``u`` (truncated likelihood, so the renormalized body is the
    estimand) and the GP to the exceedances above ``u`` with location ``u``.
    With ``wet_only`` the nonpositive values (dry hours) are dropped first.
    """
    x = _clean_samples(samples)
    n_dry = 0
    if wet_only:
        n_dry = int(np.sum(x <= 0))
        x = x[x > 0]
    if x.size < 200:
        raise ValidationError(f"splice fit needs >= 200 samples, got {x.size}")
    if not (0.8 <= threshold_quantile <= 0.99):
        raise ParameterDomainError(f"threshold quantile must be in [0.8, 0.99], got {threshold_quantile!r}")
    u = float(np.quantile(x, threshold_quantile))
    tail = x[x > u]
    body = x[x <= u]
    if tail.size < 30:
        raise TailSparsityError(f"only {tail.size} exceedances above u={u!r}; need >= 30")
    p_tail = tail.size / x.size

    loc0, scale0, _ = _gev_pwm_start(body)
    scale0 = scale0 if scale0 > 0 else max(body.std(), 1e-12)
    m, s, xi, ll_body = _gev_fit_standardized((body - loc0) / scale0, upper=(u - loc0) / scale0)
    gev = GevParams(float(loc0 + scale0 * m), float(scale0 * s), float(xi))
    ll_body -= body.size * math.log(scale0)
    gp = gp_fit_mle(tail, loc=u)
    loglik = (
        ll_body
        + gp.meta["loglik"]
        + body.size * math.log(1.0 - p_tail)
        + tail.size * math.log(p_tail)
    )
    return GevGpSplice(
        body=gev,
        tail=GpParams(gp.loc, gp.scale, gp.shape),
        threshold=u,
        p_tail=float(p_tail),
        meta={
            "method": "mle",
            "n": int(x.size),
            "loglik": float(loglik),
            "threshold": u,
            "threshold_quantile": float(threshold_quantile),
            "wet_only": bool(wet_only),
            "n_dry_excluded": n_dry,
        },
    )


# --------------------------------------------------------------------------
# model classes


class _Marginal:
    kind = ""
    n_params = 0

    def pdf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return _scalar_or_array(np.log(np.asarray(self.pdf(x), dtype=float)))

    def loglik(self, samples):
        return float(np.sum(self.logpdf(np.asarray(samples, dtype=float))))

    def sample(self, rng, n):
        return self.quantile(open_uniform(rng, n))

    def support(self):
        """(lower, upper) endpoints, possibly infinite."""
        raise NotImplementedError

    def to_dict(self):
        return model_to_dict(self)


@dataclass(frozen=True)
class WeibullParams(_Marginal):
    k: float
    c: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "weibull"
    n_params = 2

    def __post_init__(self):
        _check_positive("Weibull shape k", self.k)
        _check_positive("Weibull scale c", self.c)

    def pdf(self, x):
        return weibull_pdf(x, self)

    def logpdf(self, x):
        return weibull_logpdf(x, self)

    def cdf(self, x):
        return weibull_cdf(x, self)

    def quantile(self, prob):
        return weibull_quantile(prob, self)

    def support(self):
        return 0.0, math.inf

    def mean(self):
        return self.c * special.gamma(1.0 + 1.0 / self.k)

    def std(self):
        g1 = special.gamma(1.0 + 1.0 / self.k)
        g2 = special.gamma(1.0 + 2.0 / self.k)
        return self.c * math.sqrt(g2 - g1 * g1)


@dataclass(frozen=True)
class BetaParams(_Marginal):
    """Beta law on [0, 1]; both parameters must be strictly positive."""

    alpha: float
    beta: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "beta"
    n_params = 2

    def __post_init__(self):
        _check_positive("Beta alpha", self.alpha)
        _check_positive("Beta beta", self.beta)

    def pdf(self, x):
        return beta_pdf(x, self)

    def logpdf(self, x):
        return beta_logpdf(x, self)

    def cdf(self, x):
        return beta_cdf(x, self)

    def quantile(self, prob):
        return beta_quantile(prob, self)

    def support(self):
        return 0.0, 1.0

    def mean(self):
        return self.alpha / (self.alpha + self.beta)

    def var(self):
        a, b = self.alpha, self.beta
        return a * b / ((a + b) ** 2 * (a + b + 1.0))


@dataclass(frozen=True)
class GevParams(_Marginal):
    loc: float
    scale: float
    shape: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)
    _validate: bool = field(default=True, compare=False, repr=False)

    kind = "gev"
    n_params = 3

    def __post_init__(self):
        if self._validate:
            _check_positive("GEV scale", self.scale)
            if not (np.isfinite(self.loc) and np.isfinite(self.shape)):
                raise ParameterDomainError("GEV location and shape must be finite")

    def pdf(self, x):
        return gev_pdf(x, self)

    def logpdf(self, x):
        return gev_logpdf(x, self)

    def cdf(self, x):
        return gev_cdf(x, self)

    def quantile(self, prob):
        return gev_quantile(prob, self)

    def support(self):
        if abs(self.shape) < SHAPE_ZERO:
            return -math.inf, math.inf
        end = self.loc - self.scale / self.shape
        return (end, math.inf) if self.shape > 0 else (-math.inf, end)


@dataclass(frozen=True)
class GpParams(_Marginal):
    loc: float
    scale: float
    shape: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)
    _validate: bool = field(default=True, compare=False, repr=False)

    kind = "gp"

    def __post_init__(self):
        if self._validate:
            _check_positive("GP scale", self.scale)
            if not (np.isfinite(self.loc) and np.isfinite(self.shape)):
                raise ParameterDomainError("GP location and shape must be finite")

    @property
    def n_params(self):
        return int(self.meta.get("n_params", 3))

    def pdf(self, x):
        return gp_pdf(x, self)

    def logpdf(self, x):
        return gp_logpdf(x, self)

    def cdf(self, x):
        return gp_cdf(x, self)

    def quantile(self, prob):
        return gp_quantile(prob, self)

    def support(self):
        if self.shape < -SHAPE_ZERO:
            return self.loc, self.loc - self.scale / self.shape
        return self.loc, math.inf


@dataclass(frozen=True)
class GevGpSplice(_Marginal):
    """GEV body renormalized below ``threshold`` with a GP tail above it.

    ``p_tail`` is the probability mass above the threshold; the tail's
    location must equal the threshold. ``p_tail = 0`` is accepted as the
    degenerate all-body case.
    """

    body: GevParams
    tail: GpParams
    threshold: float
    p_tail: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    kind = "gev_gp"
    # GEV (3) + GP scale and shape (2) + tail mass (1)
    n_params = 6

    def __post_init__(self):
        if not (0.0 <= self.p_tail < 1.0):
            raise ParameterDomainError(f"tail mass must be in [0, 1), got {self.p_tail!r}")
        if self.tail.loc != self.threshold:
            raise ParameterDomainError("GP tail location must equal the splice threshold")
        if self.body_mass <= 0:
            raise ParameterDomainError("GEV body has no mass below the threshold")

    @property
    def body_mass(self):
        return float(gev_cdf(self.threshold, self.body))

    def pdf(self, x):
        return splice_pdf(x, self)

    def logpdf(self, x):
        return splice_logpdf(x, self)

    def cdf(self, x):
        return splice_cdf(x, self)

    def quantile(self, prob):
        return splice_quantile(prob, self)

    def support(self):
        lo = self.body.support()[0]
        hi = self.tail.support()[1] if self.p_tail > 0 else self.threshold
        return lo, hi


MarginalModel = WeibullParams | BetaParams | GevParams | GpParams | GevGpSplice


# --------------------------------------------------------------------------
# generic operations


def quantile(model, prob):
    """Inverse CDF; ``prob`` must lie strictly inside (0, 1)."""
    arr = np.asarray(prob, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise ParameterDomainError("quantile probabilities must lie in (0, 1)")
    return model.quantile(arr if arr.ndim else float(arr))


def sample(model, rng, n):
    """``n`` inverse-CDF draws from ``model`` using the Generator ``rng``."""
    if n < 0:
        raise ParameterDomainError("sample size must be >= 0")
    return np.asarray(model.sample(rng, int(n)), dtype=float)


def _clean_samples(samples):
    x = np.asarray(samples, dtype=float).ravel()
    return x[np.isfinite(x)]


# --------------------------------------------------------------------------
# JSON round-trip


def _params_dict(model):
    if isinstance(model, WeibullParams):
        return {"k": model.k, "c": model.c}
    if isinstance(model, BetaParams):
        return {"alpha": model.alpha, "beta": model.beta}
    if isinstance(model, (GevParams, GpParams)):
        return {"loc": model.loc, "scale": model.scale, "shape": model.shape}
    if isinstance(model, GevGpSplice):
        return {
            "body": _params_dict(model.body),
            "tail": _params_dict(model.tail),
            "threshold": model.threshold,
            "p_tail": model.p_tail,
        }
    raise TypeError(f"not a marginal model: {model!r}")


def model_to_dict(model):
    meta = dict(model.meta)
    fit = {
        "n": meta.pop("n", None),
        "loglik": meta.pop("loglik", None),
        "threshold": meta.pop("threshold", getattr(model, "threshold", None)),
    }
    fit.update(meta)
    return {"kind": model.kind, "parameters": _params_dict(model), "fit": fit}


def model_from_dict(d):
    kind = d["kind"]
    p = d["parameters"]
    meta = {k: v for k, v in d.get("fit", {}).items() if v is not None}
    if kind == "weibull":
        return WeibullParams(p["k"], p["c"], meta=meta)
    if kind == "beta":
        return BetaParams(p["alpha"], p["beta"], meta=meta)
    if kind == "gev":
        return GevParams(p["loc"], p["scale"], p["shape"], meta=meta)
    if kind == "gp":
        return GpParams(p["loc"], p["scale"], p["shape"], meta=meta)
    if kind == "gev_gp":
        body = GevParams(**p["body"])
        tail = GpParams(**p["tail"])
        return GevGpSplice(body, tail, p["threshold"], p["p_tail"], meta=meta)
    raise ValidationError(f"unknown marginal kind {kind!r}")


def dumps(model):
    """Serialize to JSON; floats use shortest round-trip repr (bit exact)."""
    return json.dumps(model_to_dict(model), sort_keys=True, allow_nan=False)


def loads(text):
    return model_from_dict(json.loads(text))
