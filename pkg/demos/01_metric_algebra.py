"""Metric algebra: frames, transition matrices and the norm of a metric difference.

Two diagonalizing frames of the same class differ by a transition matrix
``A = Lambda @ inv(Lambda')``.  A metric that is diagonal in the second frame
has components ``A diag(gbar) A^T`` in the first, and the distance between two
metrics is measured in the norm of ``g``.

Run:  python3 demos/01_metric_algebra.py
"""

import numpy as np

from ricci_qc.frames import displayed_terms, frame_matrix, reduced_params, transition_matrix
from ricci_qc.metric import DiagonalMetric, congruence_transport, frame_quotient, norm_sq

# --- 1. two A8 frames and their reduced difference parameters -----------------
lam = frame_matrix("A8", a3=1.0, a1=2.0, a6=5.0)
lam_prime = frame_matrix("A8", a3=0.25, a1=0.5, a6=1.0)
print("Lambda =\n", lam)
print("Lambda' =\n", lam_prime)

fp = reduced_params("A8", lam, lam_prime)
print("reduced parameters:", fp.as_dict())          # a=0.75, b=1.5, c=3.0625

# the parameterized matrix reproduces the numerically computed quotient
A = frame_quotient(lam, lam_prime)
print("max |A - A(a,b,c)| =", np.max(np.abs(A - transition_matrix(fp))))

# --- 2. transport a diagonal metric and measure the difference ------------------
g = DiagonalMetric(1.0, 2.0, 3.0, 4.0)
gbar = DiagonalMetric(1.5, 2.0, 2.5, 4.0)
gbar_alpha = congruence_transport(A, gbar)
print("gbar in frame alpha =\n", gbar_alpha.to_array())

h = gbar_alpha.minus_diagonal(g)
generic = norm_sq(g, h)
terms = displayed_terms(g, gbar, fp)
print(f"|gbar - g|_g^2 generic     = {generic:.15g}")
print(f"|gbar - g|_g^2 term by term = {sum(terms):.15g}  ({len(terms)} terms)")
