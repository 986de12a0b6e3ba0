"""Synthetic hourly weather with known marginals and dependence.

Used by the tests and demos in place of reanalysis exports. Wind speed
follows a GEV (negative draws become calm hours at 0 m/s), wet-hour
precipitation a GEV/GP splice coupled to wind through a Frank copula, and
irradiance a clear-sky arc with Beta-distributed attenuation.
"""
from __future__ import annotations

import numpy as np

from .copula import sample_uniforms
from .dataset import WeatherDataset, _find_gaps
from .marginals import BetaParams, GevGpSplice, GevParams, GpParams
from .rng import open_uniform, stream

# wind GEV parameters for a strong-wind regime
STRONG_WIND = GevParams(11.892, 8.0, -0.175)
# a wet-hour splice with support starting at 0 mm/h
DEFAULT_PRECIP = GevGpSplice(
    body=GevParams(1.0, 0.5, 0.5),
    tail=GpParams(4.4, 2.0, 0.1),
    threshold=4.4,
    p_tail=0.05,
)


def clear_sky(hours, peak=0.95):
    """Idealized clear-sky irradiance (kW/m^2) for hour-of-day values."""
    h = np.asarray(hours, dtype=float)
    arc = np.sin(np.pi * (h - 6.0) / 12.0)
    return np.where((h > 6) & (h < 18), peak * arc, 0.0)


def synthetic_dataset(
    n_hours,
    seed,
    wind=STRONG_WIND,
    precip=DEFAULT_PRECIP,
    theta=4.0,
    p_wet=0.3,
    start="2015-01-01T00:00",
    attenuation=BetaParams(8.0, 2.0),
):
    n_hours = int(n_hours)
    rng = stream(seed, "synthetic")
    wet = rng.random(n_hours) < p_wet
    uv = sample_uniforms(theta, rng, n_hours)
    wind_ms = np.asarray(wind.quantile(uv[:, 0]), dtype=float)
    precip_mmh = np.where(wet, np.asarray(precip.quantile(uv[:, 1]), dtype=float), 0.0)
    wind_ms = np.maximum(wind_ms, 0.0)
    precip_mmh = np.maximum(precip_mmh, 0.0)
    ts = np.datetime64(start, "s") + np.arange(n_hours) * np.timedelta64(3600, "s")
    hod = (ts.astype("datetime64[h]").astype(np.int64)) % 24
    ghi = clear_sky(hod) * attenuation.quantile(open_uniform(rng, n_hours))
    return WeatherDataset(ts, wind_ms, ghi, precip_mmh, source=f"synthetic(seed={seed})", gaps=_find_gaps(ts))
