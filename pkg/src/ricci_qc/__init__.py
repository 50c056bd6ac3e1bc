"""Ricci flow on locally homogeneous 4-manifolds and quasi-convergence of its solutions.

The main entry points are re-exported here; see the submodules for details:

* :mod:`ricci_qc.metric` -- 4x4 metric algebra and the norm;
* :mod:`ricci_qc.geometry` -- the class catalog (ODEs, explicit solutions, invariants);
* :mod:`ricci_qc.frames` -- diagonalizing frames and frame-change parameters;
* :mod:`ricci_qc.integrate` -- adaptive Dormand-Prince integration;
* :mod:`ricci_qc.flow` -- drift, explicit-solution and asymptotics checks;
* :mod:`ricci_qc.quasiconv` -- membership tests and the dimension probe;
* :mod:`ricci_qc.scenario` -- JSON scenarios, reports and CSV output.
"""

__version__ = "0.1.0"

from .metric import (DiagonalMetric, DomainError, SingularFrameError, SymmetricMetric4,
                     congruence_transport, frame_quotient, norm_sq)
from .geometry import (ClassId, ClassParams, GeometrySpec, InitialData, Partial, Unavailable,
                       asymptotic_profile, class_dimension, closed_form, conserved, rhs)
from .frames import FrameParams, FrameShapeError, reduced_params, transition_matrix
from .integrate import IntegrationError, IntegratorConfig, Trajectory, evaluate_at, integrate
from .flow import conserved_drift, validate_asymptotics, validate_closed_form
from .quasiconv import (Decision, QCVerdict, analytic_membership, dimension_probe,
                        norm_timeseries, numeric_membership)

__all__ = [
    "DiagonalMetric", "DomainError", "SingularFrameError", "SymmetricMetric4",
    "congruence_transport", "frame_quotient", "norm_sq",
    "ClassId", "ClassParams", "GeometrySpec", "InitialData", "Partial", "Unavailable",
    "asymptotic_profile", "class_dimension", "closed_form", "conserved", "rhs",
    "FrameParams", "FrameShapeError", "reduced_params", "transition_matrix",
    "IntegrationError", "IntegratorConfig", "Trajectory", "evaluate_at", "integrate",
    "conserved_drift", "validate_asymptotics", "validate_closed_form",
    "Decision", "QCVerdict", "analytic_membership", "dimension_probe", "norm_timeseries",
    "numeric_membership",
]
