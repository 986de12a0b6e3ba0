"""
Monte-Carlo scenarios and greedy reduction
==========================================

2000 normal-weather days are drawn hour by hour and merged down to 5
representatives. Each anomalous cell is then sampled and reduced to one.
"""

import numpy as np

from windsolar import pipeline as P
from windsolar.synthetic import synthetic_dataset

cfg = P.PipelineConfig(seed=42)
bundle = P.cmd_fit(synthetic_dataset(8760, 7), cfg)

raw, reduced = P.generate_normal_sets(bundle, cfg)
print(f"{len(raw)} raw scenarios -> {len(reduced)} kept")
for sid, w, e in zip(reduced.ids, reduced.weights, reduced.energy()):
    print(f"  scenario {sid:5d}  weight {w:.4f}  energy {e:10.1f} kWh")

anom = P.anomalous_representatives(bundle, cfg)
e = anom.energy()
print("anomalous representatives (weight = cell probability):")
for tag, w, en in zip(anom.tags, anom.weights, e):
    print(f"  {tag:8s} {w:.4f} {en:10.1f} kWh")
print("max energy:", anom.tags[int(np.argmax(e))], " min energy:", anom.tags[int(np.argmin(e))])
