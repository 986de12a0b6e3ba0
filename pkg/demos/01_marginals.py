"""
Marginal laws for wind, irradiance and rain
===========================================

Rayleigh wind from an hourly mean, a moment-matched Beta for normalized
irradiance, and a GEV body / GP tail splice for wet-hour precipitation.
"""

import numpy as np

from windsolar import marginals as M
from windsolar.rng import stream

# A 6.5 m/s hourly mean gives a k = 2 Weibull with c = 2 * 6.5 / sqrt(pi)
wind = M.weibull_from_mean_rayleigh(6.5)
print("Rayleigh wind:", wind, "mean check:", wind.mean())
print("P(v <= 6.5) =", wind.cdf(6.5), "vs 1 - exp(-pi/4) =", 1 - np.exp(-np.pi / 4))

# Irradiance normalized by 1 kW/m^2, mean 0.55 and std 0.18
sun = M.beta_fit_moments(0.55, 0.18)
print("Beta irradiance:", sun, "mean", sun.mean(), "std", np.sqrt(sun.var()))

# Strong-wind GEV (bounded above because the shape is negative)
gev = M.GevParams(11.892, 8.0, -0.175)
print("GEV support:", gev.support(), "99th percentile:", gev.quantile(0.99))

# Draw wet-hour rain from a known splice and fit it back
truth = M.GevGpSplice(M.GevParams(1.0, 0.5, 0.5), M.GpParams(4.4, 2.0, 0.1), 4.4, 0.05)
rain = truth.sample(stream(1, "demo-rain"), 50_000)
fit = M.splice_fit(rain, threshold_quantile=0.95)
print("fitted splice:", fit)
print("continuity at threshold:", fit.cdf(np.nextafter(fit.threshold, 0)), fit.cdf(fit.threshold))

# Fitted models serialize to JSON and reload bit for bit
text = M.dumps(fit)
assert M.loads(text) == fit
print(text[:120], "...")
