"""
Goodness of fit and scenario fidelity
=====================================

K-S and AIC for fitted marginals, GP against the splice for rain, and a
quantile-quantile comparison of two independently seeded PV ensembles.
"""

from windsolar import marginals as M
from windsolar import pipeline as P
from windsolar.rng import stream
from windsolar.scenarios import generate_normal
from windsolar.synthetic import synthetic_dataset
from windsolar.validation import gof_report, model_comparison, qq_data

truth = M.GevGpSplice(M.GevParams(1.0, 0.5, 0.5), M.GpParams(4.4, 2.0, 0.1), 4.4, 0.05)
rain = truth.sample(stream(5, "demo-val"), 10_000)

ranked, excluded = model_comparison(rain, ("gp", "gev_gp"))
for r in ranked:
    print(f"{r.kind:7s} AIC {r.aic:10.1f}  D {r.ks_d:.4f}  p {r.ks_pvalue:.3f}  pass {r.passed}")
print("note:", ranked[0].notes[0])

cfg = P.PipelineConfig(seed=5)
bundle = P.cmd_fit(synthetic_dataset(8760, 5), cfg)
print("wind GEV:", gof_report(synthetic_dataset(8760, 5).wind_ms, bundle.wind))

a = generate_normal(bundle.hourly, cfg.turbine, cfg.pv, n=2000, rng=stream(1, "qq"))
b = generate_normal(bundle.hourly, cfg.turbine, cfg.pv, n=2000, rng=stream(2, "qq"))
print("PV QQ R^2:", qq_data(a.pv_kw, b.pv_kw).r_squared)
print("wind QQ R^2:", qq_data(a.wind_kw, b.wind_kw).r_squared)
