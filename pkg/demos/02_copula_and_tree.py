"""
Wind-rain dependence and the anomalous-weather tree
===================================================

A Frank copula couples strong wind with heavy rain. Its rectangle masses
over 4 precipitation levels x 4 wind levels give the 16-cell tree.
"""

from scipy import stats

from windsolar import copula as C
from windsolar.marginals import GevGpSplice, GevParams, GpParams
from windsolar.rng import stream
from windsolar.tree import build_tree, classify, tree_text

theta = 5.0
print("Kendall tau from the Debye function:", C.kendall_tau(theta))

uv = C.sample_uniforms(theta, stream(2, "demo-copula"), 100_000)
print("sampled tau:", stats.kendalltau(uv[:, 0], uv[:, 1]).statistic)

# Fitting recovers theta from rank pseudo-observations
cop = C.fit_theta(uv[:, 0], uv[:, 1], wet_only=False)
print("fitted theta:", cop.theta, "flags:", cop.report["flags"])
print("tail dependence (Frank has none):", cop.report["tail_dependence"])

wind = GevParams(11.892, 8.0, -0.175)
rain = GevGpSplice(GevParams(1.0, 0.5, 0.5), GpParams(4.4, 2.0, 0.1), 4.4, 0.05)
tree = build_tree(cop.theta, wind, rain)
print(tree_text(tree))

# Shared endpoints go to the upper level
print(classify(28.5, 4.1666))
