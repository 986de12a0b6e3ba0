"""Monte-Carlo power scenarios and probability-distance reduction.

A :class:`ScenarioSet` stores ``n`` hourly profiles of wind and PV power
as ``(n, T)`` arrays together with their probability weights.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .copula import conditional_cdf, conditional_quantile, copula_cdf, sample_uniforms
from .errors import DataFormatError, DimensionError, InfeasibleMomentsError, ParameterDomainError
from .marginals import beta_fit_moments, weibull_from_mean_rayleigh
from .power import pv_power, wind_power
from .rng import as_generator, open_uniform

DEFAULT_SCENARIOS = 2000
REJECTION_MIN_ACCEPTANCE = 1e-4


@dataclass(frozen=True)
class HourlyMoments:
    """Per-hour inputs for normal-weather generation.

    ``wind_mean`` in m/s; ``ghi_mean`` and ``ghi_std`` in kW/m^2.
    """

    wind_mean: np.ndarray
    ghi_mean: np.ndarray
    ghi_std: np.ndarray

    def __post_init__(self):
        arrs = [np.asarray(a, dtype=float) for a in (self.wind_mean, self.ghi_mean, self.ghi_std)]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
            raise DimensionError("hourly moment arrays must be 1-D and of equal length")
        for name, a in zip(("wind_mean", "ghi_mean", "ghi_std"), arrs):
            object.__setattr__(self, name, a)
            if np.any(~np.isfinite(a)) or np.any(a < 0):
                raise ParameterDomainError(f"{name} must be finite and >= 0")

    def __len__(self):
        return self.wind_mean.size

    def take(self, horizon):
        """Moments for ``horizon`` hours, cycling the daily profile."""
        idx = np.arange(horizon) % len(self)
        return HourlyMoments(self.wind_mean[idx], self.ghi_mean[idx], self.ghi_std[idx])

    def to_dict(self):
        return {k: getattr(self, k).tolist() for k in ("wind_mean", "ghi_mean", "ghi_std")}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["wind_mean"]), np.array(d["ghi_mean"]), np.array(d["ghi_std"]))


@dataclass(frozen=True)
class Scenario:
    scenario_id: int
    wind_kw: np.ndarray
    pv_kw: np.ndarray
    weight: float
    tag: str = "normal"

    @property
    def horizon(self):
        return self.wind_kw.size

    @property
    def profile(self):
        return np.concatenate([self.wind_kw, self.pv_kw])


@dataclass
class ScenarioSet:
    wind_kw: np.ndarray
    pv_kw: np.ndarray
    weights: np.ndarray
    ids: np.ndarray = None
    tags: tuple = None
    metadata: dict = field(default_factory=dict)
    # sampled meteorology (wind m/s, irradiance kW/m^2, precip mm/h); not persisted
    drivers: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.wind_kw = np.atleast_2d(np.asarray(self.wind_kw, dtype=float))
        self.pv_kw = np.atleast_2d(np.asarray(self.pv_kw, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        n = self.wind_kw.shape[0]
        if self.pv_kw.shape != self.wind_kw.shape or self.weights.size != n:
            raise DimensionError("wind, PV and weight arrays disagree in shape")
        if self.ids is None:
            self.ids = np.arange(1, n + 1)
        self.ids = np.asarray(self.ids, dtype=int)
        if self.tags is None:
            self.tags = ("normal",) * n
        self.tags = tuple(self.tags)
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ParameterDomainError("scenario weights must be >= 0 and sum to 1")

    def __len__(self):
        return self.wind_kw.shape[0]

    @property
    def horizon(self):
        return self.wind_kw.shape[1]

    def scenario(self, i):
        return Scenario(int(self.ids[i]), self.wind_kw[i], self.pv_kw[i], float(self.weights[i]), self.tags[i])

    def __iter__(self):
        return (self.scenario(i) for i in range(len(self)))

    def profiles(self, components=("wind", "pv")):
        parts = {"wind": self.wind_kw, "pv": self.pv_kw}
        return np.hstack([parts[c] for c in components])

    def energy(self):
        """Total energy (kWh) per scenario, one-hour steps."""
        return self.wind_kw.sum(axis=1) + self.pv_kw.sum(axis=1)


def _irradiance_law(mean, std, ref, hour):
    """Return None for a deterministic hour or the normalized Beta model."""
    if mean <= 0:
        return None
    if std <= 0:
        return None
    try:
        return beta_fit_moments(mean / ref, std / ref)
    except InfeasibleMomentsError as exc:
        raise InfeasibleMomentsError(f"hour {hour}: {exc}") from None


def _draw_irradiance(hourly, n, rng, ref):
    T = len(hourly)
    s = np.zeros((n, T))
    laws = [_irradiance_law(hourly.ghi_mean[t], hourly.ghi_std[t], ref, t) for t in range(T)]
    u = open_uniform(rng, (n, T))
    for t, law in enumerate(laws):
        if law is None:
            s[:, t] = hourly.ghi_mean[t]
        else:
            s[:, t] = ref * law.quantile(u[:, t])
    return s


def generate_normal(hourly, turbine, pv, n=DEFAULT_SCENARIOS, rng=None, irradiance_ref=1.0, horizon=None):
    """Normal-weather scenarios with equal weights ``1/n``.

    Hour ``t`` draws wind speed from the Rayleigh (k = 2) Weibull with that
    hour's mean and normalized irradiance from the moment-matched Beta;
    both are converted through the power curves.
    """
    if n < 1:
        raise ParameterDomainError("number of scenarios must be >= 1")
    if horizon is not None:
        hourly = hourly.take(horizon)
    T = len(hourly)
    if T < 1:
        raise ParameterDomainError("horizon must be >= 1")
    rng = as_generator(rng)
    u = open_uniform(rng, (n, T))
    wind = np.zeros((n, T))
    for t in range(T):
        m = hourly.wind_mean[t]
        if m > 0:
            wind[:, t] = weibull_from_mean_rayleigh(m).quantile(u[:, t])
    s = _draw_irradiance(hourly, n, rng, irradiance_ref)
    return ScenarioSet(
        wind_kw=wind_power(wind, turbine),
        pv_kw=pv_power(s, pv),
        weights=np.full(n, 1.0 / n),
        tags=("normal",) * n,
        metadata={"kind": "normal", "n": n, "horizon": T, "hourly": hourly.to_dict()},
        drivers={"wind_ms": wind, "ghi_kwm2": s},
    )


def _restricted_u(theta, rect, rng, size):
    """Draw U from its marginal restricted to the copula rectangle."""
    u1, u2, v1, v2 = rect
    strip = lambda u: copula_cdf(u, v2, theta) - copula_cdf(u, v1, theta)
    lo_val = strip(u1)
    total = strip(u2) - lo_val
    target = lo_val + open_uniform(rng, size) * total
    lo = np.full(size, u1)
    hi = np.full(size, u2)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = strip(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample_cell_uniforms(theta, rect, rng, size, method="auto"):
    """Copula draws conditioned on the rectangle ``(u1, u2, v1, v2)``.

    ``method='rejection'`` samples the full copula and keeps draws inside
    the rectangle; ``'conditional'`` samples U from its restricted
    marginal and V by inverting the conditional CDF over the allowed
    range. ``'auto'`` uses rejection unless the acceptance rate would be
    below 1e-4. Returns ``(uv, method_used, acceptance)``.
    """
    u1, u2, v1, v2 = rect
    acceptance = float(
        copula_cdf(u2, v2, theta) - copula_cdf(u1, v2, theta) - copula_cdf(u2, v1, theta) + copula_cdf(u1, v1, theta)
    )
    if acceptance <= 0:
        raise ParameterDomainError("cell rectangle has zero copula mass")
    if method == "auto":
        method = "rejection" if acceptance >= REJECTION_MIN_ACCEPTANCE else "conditional"
    if method == "rejection":
        chunks = []
        have = 0
        while have < size:
            batch = int(math.ceil(1.2 * (size - have) / acceptance)) + 64
            uv = sample_uniforms(theta, rng, batch)
            inside = (uv[:, 0] > u1) & (uv[:, 0] <= u2) & (uv[:, 1] > v1) & (uv[:, 1] <= v2)
            chunks.append(uv[inside])
            have += int(inside.sum())
        return np.vstack(chunks)[:size], method, acceptance
    if method == "conditional":
        u = _restricted_u(theta, rect, rng, size)
        h1 = np.asarray(conditional_cdf(v1, u, theta))
        h2 = np.asarray(conditional_cdf(v2, u, theta))
        w = h1 + open_uniform(rng, size) * (h2 - h1)
        v = np.clip(conditional_quantile(w, u, theta), v1, v2)
        return np.column_stack([u, v]), method, acceptance
    raise ParameterDomainError(f"unknown sampling method {method!r}")


def generate_anomalous(
    cell,
    theta,
    wind_marginal,
    precip_marginal,
    hourly,
    turbine,
    pv,
    derating,
    n,
    rng=None,
    irradiance_ref=1.0,
    horizon=None,
    method="auto",
):
    """Scenarios for one tree cell.

    Every hour draws a (wind, precip) pair from the copula restricted to the
    cell, converts wind through the turbine curve (cut-out included) and
    scales a clear-sky PV draw by the cell's derating multiplier.
    """
    if n < 1:
        raise ParameterDomainError("number of scenarios must be >= 1")
    if horizon is not None:
        hourly = hourly.take(horizon)
    T = len(hourly)
    rng = as_generator(rng)
    uv, used, acceptance = sample_cell_uniforms(theta, cell.rectangle, rng, n * T, method)
    eps = np.finfo(float).epsneg
    uv = np.clip(uv, np.finfo(float).tiny, 1.0 - eps)
    wlo, whi, plo, phi = cell.box
    # keep round-off in the quantile functions from leaking across cell edges
    wind = np.clip(wind_marginal.quantile(uv[:, 0]), wlo, np.nextafter(whi, -np.inf)).reshape(n, T)
    precip = np.clip(precip_marginal.quantile(uv[:, 1]), plo, np.nextafter(phi, -np.inf)).reshape(n, T)
    s = _draw_irradiance(hourly, n, rng, irradiance_ref)
    tag = f"cell-{cell.scenario_id}"
    return ScenarioSet(
        wind_kw=wind_power(wind, turbine),
        pv_kw=pv_power(s, pv) * derating.multiplier(cell.precip_level),
        weights=np.full(n, 1.0 / n),
        tags=(tag,) * n,
        metadata={
            "kind": "anomalous",
            "cell": cell.scenario_id,
            "precip_level": cell.precip_level,
            "wind_level": cell.wind_level,
            "sampling": used,
            "acceptance": acceptance,
            "n": n,
            "horizon": T,
        },
        drivers={"wind_ms": wind, "precip_mmh": precip, "ghi_kwm2": s},
    )


# --------------------------------------------------------------------------
# distances and reduction


def distance(a, b):
    """Sum over hours of absolute differences of the wind||PV profiles."""
    if a.horizon != b.horizon:
        raise DimensionError(f"horizon mismatch: {a.horizon} vs {b.horizon}")
    return float(np.sum(np.abs(a.profile - b.profile)))


def distance_matrix(sset, components=("wind", "pv")):
    p = sset.profiles(components)
    return cdist(p, p, metric="cityblock")


def mean_distance(i, sset, components=("wind", "pv")):
    """``(1/m) sum_j d_ij`` over all m scenarios (the j = i term is zero)."""
    m = len(sset)
    if m < 2:
        raise ParameterDomainError("mean distance needs at least two scenarios")
    p = sset.profiles(components)
    return float(np.abs(p - p[i]).sum(axis=1).sum() / m)


def reduce(sset, target_count, components=("wind", "pv")):
    """Greedy backward merge down to ``target_count`` scenarios.

    Each step picks the surviving scenario with the smallest mean distance
    to the survivors, hands it the weight of its nearest survivor and
    deletes that neighbour. Profiles are never averaged; ties go to the
    smallest index. The step trace ``(representative_id, merged_id,
    weight_sum)`` is stored in ``metadata['reduction']``.
    """
    m = len(sset)
    if not (1 <= target_count):
        raise ParameterDomainError("target count must be >= 1")
    if target_count > m:
        raise ParameterDomainError(f"target count {target_count} exceeds set size {m}")
    d = distance_matrix(sset, components)
    w = sset.weights.copy()
    active = np.ones(m, dtype=bool)
    row_sum = d.sum(axis=1)
    trace = []
    count = m
    while count > target_count:
        score = np.where(active, row_sum, np.inf)
        # running sums drift by round-off; settle near-ties with exact sums
        cand = np.flatnonzero(score <= score.min() * (1.0 + 1e-9))
        if cand.size > 1:
            exact = d[np.ix_(cand, np.flatnonzero(active))].sum(axis=1)
            rep = int(cand[np.argmin(exact)])
        else:
            rep = int(cand[0])
        near = np.where(active, d[rep], np.inf)
        near[rep] = np.inf
        j = int(np.argmin(near))
        w[rep] += w[j]
        w[j] = 0.0
        active[j] = False
        row_sum -= d[:, j]
        count -= 1
        trace.append((int(sset.ids[rep]), int(sset.ids[j]), float(w[active].sum())))
    keep = np.flatnonzero(active)
    meta = dict(sset.metadata)
    meta["reduction"] = {
        "from": m,
        "to": int(target_count),
        "components": list(components),
        "trace": trace,
    }
    return ScenarioSet(
        wind_kw=sset.wind_kw[keep],
        pv_kw=sset.pv_kw[keep],
        weights=w[keep],
        ids=sset.ids[keep],
        tags=tuple(sset.tags[i] for i in keep),
        metadata=meta,
    )


def scenario_energy(s):
    """Total wind + PV energy (kWh) of one scenario at hourly resolution."""
    return float(np.sum(s.wind_kw) + np.sum(s.pv_kw))


def combine(sets, weights, metadata=None):
    """Stack single-scenario sets into one set with the given weights."""
    wind = np.vstack([s.wind_kw for s in sets])
    pv = np.vstack([s.pv_kw for s in sets])
    ids = np.concatenate([s.ids for s in sets])
    tags = sum((s.tags for s in sets), ())
    if len(ids) != len(weights):
        raise DimensionError("one weight per scenario is required")
    return ScenarioSet(wind, pv, np.asarray(weights, dtype=float), ids, tags, dict(metadata or {}))


# --------------------------------------------------------------------------
# persistence


def scenarios_csv(sset):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["scenario_id", "hour", "wind_kw", "pv_kw"])
    for i in range(len(sset)):
        sid = int(sset.ids[i])
        for t in range(sset.horizon):
            wr.writerow([sid, t, repr(float(sset.wind_kw[i, t])), repr(float(sset.pv_kw[i, t]))])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def scenarios_sidecar(sset, seed=None):
    doc = {
        "ids": [int(i) for i in sset.ids],
        "weights": [float(w) for w in sset.weights],
        "tags": list(sset.tags),
        "seed": seed,
        "metadata": _jsonable(sset.metadata),
    }
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def read_scenarios(csv_text, sidecar_text):
    side = json.loads(sidecar_text)
    ids = side["ids"]
    pos = {sid: k for k, sid in enumerate(ids)}
    rows = list(csv.DictReader(io.StringIO(csv_text)))
    if not rows:
        raise DataFormatError("scenario CSV has no rows")
    horizon = max(int(r["hour"]) for r in rows) + 1
    wind = np.full((len(ids), horizon), np.nan)
    pvv = np.full((len(ids), horizon), np.nan)
    for r in rows:
        k = pos[int(r["scenario_id"])]
        t = int(r["hour"])
        wind[k, t] = float(r["wind_kw"])
        pvv[k, t] = float(r["pv_kw"])
    if np.isnan(wind).any() or np.isnan(pvv).any():
        raise DataFormatError("scenario CSV is missing some (scenario, hour) rows")
    return ScenarioSet(wind, pvv, np.array(side["weights"]), np.array(ids), tuple(side["tags"]), side["metadata"])
