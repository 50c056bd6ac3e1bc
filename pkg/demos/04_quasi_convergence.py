"""Deciding whether two flows quasi-converge.

``analytic_membership`` checks the exact constraints on initial data and frame
differences; ``numeric_membership`` looks at the tail of |gbar(t) - g(t)|_g on
the grid t = 2^j.  The two are compared on pairs built to satisfy or to break
the constraints.

Run:  python3 demos/04_quasi_convergence.py
"""

import numpy as np

from ricci_qc import ClassParams, FrameParams, InitialData, analytic_membership, numeric_membership
from ricci_qc.geometry import ClassId
from ricci_qc.sampling import cross_cases

unit = InitialData(1, 1, 1, 1)

# --- 1. A3: only lam1 lam2 and lam3 matter -------------------------------------------
g, gbar = InitialData(1, 2, 5, 1), InitialData(2, 1, 5, 7)
m = analytic_membership("A3", ClassParams(k=1.0), g, gbar)
v = numeric_membership("A3", ClassParams(k=1.0), g, gbar)
print("A3:", m.member, m.residuals)
print("    numeric", v.decision, f"at T={v.horizon:g}; tail:")
for t, n in v.tail():
    print(f"      t={t:>10.0f}  n={n:.3e}")

# --- 2. A2iv: lam4 is free, the tail decays like 4 / (28 t) ----------------------------
v = numeric_membership("A2iv", ClassParams(k=2.0), unit, InitialData(1, 1, 1, 5))
t, n = v.samples[-1]
print(f"A2iv: {v.decision} via {v.path}; n(T) * 28 T / 4 = {n * 28 * t / 4:.6f}")

# --- 3. A8: a frame difference a != 0 keeps the flows apart -------------------------
frame = FrameParams.from_dict("A8", {"a": 0.5})
print("A8 with a=0.5:", analytic_membership("A8", ClassParams(), unit, unit, frame).member,
      numeric_membership("A8", ClassParams(), unit, unit, frame).decision)

# --- 4. a small cross-validation -------------------------------------------------------
rng = np.random.default_rng(7)
for cls in (ClassId.A5, ClassId.A7ii, ClassId.A9ii):
    agree = 0
    cases = cross_cases(cls, rng, 5, 5)
    for c in cases:
        a = analytic_membership(c.cls, c.params, c.init, c.init_bar, c.frame).member
        d = numeric_membership(c.cls, c.params, c.init, c.init_bar, c.frame).decision
        agree += (str(d) == "Converges") == a
    print(f"{cls}: analytic and numeric agree on {agree}/{len(cases)} pairs")
