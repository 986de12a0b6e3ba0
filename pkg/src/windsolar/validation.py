"""Goodness-of-fit and scenario-fidelity diagnostics."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import marginals as M
from .errors import ParameterDomainError, ValidationError, WindSolarError

KS_CAVEAT = (
    "parameters were estimated from the same sample; the classical K-S "
    "p-value is conservative in that case"
)


@dataclass(frozen=True)
class GofReport:
    kind: str
    ks_d: float
    ks_pvalue: float
    aic: float
    n: int
    passed: bool
    alpha: float = 0.05
    loglik: float = float("nan")
    n_params: int = 0
    notes: tuple = ()

    def to_dict(self):
        d = asdict(self)
        d["notes"] = list(self.notes)
        return d


@dataclass(frozen=True)
class QqData:
    probabilities: np.ndarray
    reference: np.ndarray
    subject: np.ndarray
    r_squared: float
    slope: float
    intercept: float
    residuals: np.ndarray = field(repr=False, default=None)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "reference", "subject", "residual"])
        for row in zip(self.probabilities, self.reference, self.subject, self.residuals):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def ks_statistic(samples, cdf, censor_below=None):
    """Two-sided Kolmogorov-Smirnov distance between the ECDF and ``cdf``.

    Tied values form a single ECDF jump. With ``censor_below`` the model
    is read as left-censored: all of its mass at or below that point sits
    in an atom there, as with calm hours recorded as 0 m/s.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ParameterDomainError("K-S test needs a non-empty sample")
    u, counts = np.unique(x, return_counts=True)
    f = np.asarray(cdf(u), dtype=float)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    f_left = f if censor_below is None else np.where(u <= censor_below, 0.0, f)
    return float(max(np.max(upper - f), np.max(f_left - lower)))


def _censor_point(model):
    meta = getattr(model, "meta", None) or {}
    return meta.get("censor_below")


def ks_test(samples, model):
    """Return ``(D, p)``; p from the asymptotic Kolmogorov distribution.

    ``model`` may be a marginal model or any callable CDF. A model fitted
    with left-censoring is tested as censored at the same point.
    """
    cdf = model.cdf if hasattr(model, "cdf") else model
    x = np.asarray(samples, dtype=float).ravel()
    d = ks_statistic(x, cdf, _censor_point(model))
    p = float(stats.kstwobign.sf(np.sqrt(x.size) * d))
    return d, p


def aic(loglik, k_params):
    if not np.isfinite(loglik):
        raise ParameterDomainError("AIC needs a finite log-likelihood")
    return 2.0 * k_params - 2.0 * loglik


def _fit_kind(kind, x, threshold_quantile=0.95):
    if kind == "weibull":
        return M.weibull_fit_mle(x)
    if kind == "beta":
        return M.beta_fit_mle(x)
    if kind == "gev":
        return M.gev_fit_mle(x)
    if kind == "gp":
        return M.gp_fit_mle(x)
    if kind == "gev_gp":
        return M.splice_fit(x, threshold_quantile, wet_only=False)
    raise ValidationError(f"unknown model kind {kind!r}")


def gof_report(samples, model, alpha=0.05, fitted=True):
    x = np.asarray(samples, dtype=float).ravel()
    d, p = ks_test(x, model)
    c = _censor_point(model)
    if c is None:
        ll = model.loglik(x)
    else:
        cens = x <= c
        ll = model.loglik(x[~cens]) + int(cens.sum()) * float(np.log(model.cdf(c)))
    k = model.n_params
    return GofReport(
        kind=model.kind,
        ks_d=d,
        ks_pvalue=p,
        aic=aic(ll, k) if np.isfinite(ll) else float("inf"),
        n=int(x.size),
        passed=bool(p > alpha),
        alpha=alpha,
        loglik=ll,
        n_params=k,
        notes=(KS_CAVEAT,) if fitted else (),
    )


def model_comparison(samples, candidates=("gp", "gev_gp"), alpha=0.05, threshold_quantile=0.95):
    """Fit each candidate kind and rank by AIC (ascending).

    Returns ``(ranked_reports, excluded)`` where ``excluded`` maps a kind
    that failed to fit to the reason.
    """
    x = np.asarray(samples, dtype=float).ravel()
    x = x[np.isfinite(x)]
    if x.size < 200:
        raise ValidationError(f"model comparison needs >= 200 samples, got {x.size}")
    reports = []
    excluded = {}
    for kind in candidates:
        try:
            model = _fit_kind(kind, x, threshold_quantile)
        except (WindSolarError, ValueError) as exc:
            excluded[kind] = str(exc)
            continue
        reports.append(gof_report(x, model, alpha))
    reports.sort(key=lambda r: r.aic)
    return reports, excluded


def qq_data(reference, subject, k=100):
    """Quantile pairs at ``p = (i - 0.5)/k`` with the R^2 of a line fit.

    ``reference`` may be a sample array or a model with ``quantile``.
    Residuals are the subject quantiles minus the reference ones (the
    distance from the diagonal).
    """
    if k < 10:
        raise ParameterDomainError("QQ grid needs at least 10 points")
    p = (np.arange(1, k + 1) - 0.5) / k
    if hasattr(reference, "quantile") and not isinstance(reference, np.ndarray):
        ref_q = np.asarray(reference.quantile(p), dtype=float)
    else:
        ref_q = np.quantile(np.asarray(reference, dtype=float).ravel(), p)
    sub_q = np.quantile(np.asarray(subject, dtype=float).ravel(), p)
    if np.ptp(ref_q) == 0 or np.ptp(sub_q) == 0:
        same = np.allclose(ref_q, sub_q)
        r2, slope, icpt = (1.0 if same else 0.0), float("nan"), float("nan")
    else:
        fit = stats.linregress(ref_q, sub_q)
        r2, slope, icpt = float(fit.rvalue**2), float(fit.slope), float(fit.intercept)
    return QqData(p, ref_q, sub_q, r2, slope, icpt, sub_q - ref_q)


def ecdf_csv(samples, model=None):
    """Plot-ready ECDF steps, optionally with the model CDF alongside."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "ecdf"] + (["model_cdf"] if model is not None else []))
    mc = np.asarray(model.cdf(x)) if model is not None else None
    for i, xi in enumerate(x):
        row = [repr(float(xi)), repr((i + 1) / n)]
        if mc is not None:
            row.append(repr(float(mc[i])))
        w.writerow(row)
    return buf.getvalue()


def density_overlay_csv(samples, model, bins=50):
    """Histogram density next to the model pdf on a common grid."""
    x = np.asarray(samples, dtype=float).ravel()
    hist, edges = np.histogram(x, bins=bins, density=True)
    mids = 0.5 * (edges[:-1] + edges[1:])
    pdf = np.asarray(model.pdf(mids), dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "empirical_density", "model_pdf"])
    for row in zip(mids, hist, pdf):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def reports_json(reports):
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=1)
