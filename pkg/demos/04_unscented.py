"""
Unscented propagation through the power curves
==============================================

Five sigma points carry the mean and covariance of (wind speed,
irradiance) through the turbine and PV models; a large Monte-Carlo run
serves as the reference.
"""

import numpy as np

from windsolar.power import PvSpec, TurbineSpec, pv_power, wind_power
from windsolar.rng import stream
from windsolar.unscented import InputMoments, propagate_power, sigma_points

turbine, pv = TurbineSpec(), PvSpec()
moments = InputMoments([10.0, 0.5], [[9.0, 0.05], [0.05, 0.01]])

sig = sigma_points(moments, w0=1 / 3)
print("sigma points:\n", sig.points, "\nweights:", sig.weights)

out = propagate_power(moments, turbine, pv)
print("UT mean (kW):", out.mean)
print("UT covariance:\n", out.cov)

x = stream(4, "demo-ut").multivariate_normal(moments.mean, moments.cov, 10**6)
mc = np.column_stack([wind_power(x[:, 0], turbine), pv_power(x[:, 1], pv)])
print("Monte-Carlo mean (kW):", mc.mean(axis=0))
