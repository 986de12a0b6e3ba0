"""
The whole pipeline from the command line
========================================

Writes a synthetic year of hourly weather, then runs every verb into a
temporary directory and lists what each step produced.
"""

import os
import tempfile

from windsolar.cli import main
from windsolar.synthetic import synthetic_dataset

work = tempfile.mkdtemp(prefix="windsolar-demo-")
data = os.path.join(work, "weather.csv")
with open(data, "w") as fh:
    fh.write(synthetic_dataset(8760, 2015).to_csv())
moments = os.path.join(work, "moments.json")
with open(moments, "w") as fh:
    fh.write('{"mean": [10, 0.5], "cov": [[9, 0], [0, 0.01]]}')

out = os.path.join(work, "out")
steps = [
    ["ingest", "--data", data],
    ["fit", "--data", data],
    ["tree"],
    ["generate", "--seed", "1"],
    ["generate", "--seed", "1", "--mode", "anomalous"],
    ["ut", "--moments", moments],
    ["validate", "--data", data, "--seed", "1"],
]
for argv in steps:
    code = main(argv + ["--out", out])
    print("exit", code, "<-", " ".join(argv[:1]))

with open(os.path.join(out, "tree.txt")) as fh:
    print(fh.read())
