"""Dimension of a quasi-convergence class.

The equality constraints on gbar's initial data form a map from R^4 (R^3 for
A9ii, where A = B) to residuals.  Its Jacobian at gbar = g, by central
differences, has corank equal to the number of free initial-data parameters.

Run:  python3 demos/05_class_dimensions.py
"""

import numpy as np

from ricci_qc import class_dimension, dimension_probe
from ricci_qc.geometry import ClassId
from ricci_qc.sampling import random_init, random_params

rng = np.random.default_rng(1)
print(f"{'class':<6} {'expected':>8}  probes at 5 random base points")
for cls in ClassId:
    probes = []
    for _ in range(5):
        params = random_params(cls, rng)
        probes.append(dimension_probe(cls, params, random_init(cls, params, rng)))
    print(f"{cls!s:<6} {class_dimension(cls):>8}  {probes}")
