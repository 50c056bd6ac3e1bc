"""Checks of integrated flows against the catalog.

* :func:`conserved_drift` -- how far the conserved functionals wander along a trajectory;
* :func:`validate_closed_form` -- integrator versus explicit solution;
* :func:`validate_asymptotics` -- long-time behaviour versus the class's profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import (ClassId, ClassParams, Conserved, GrowthPower, InitialData, Limit,
                       LinearGrowth, LogGrowth, asymptotic_profile, closed_form, conserved,
                       has_full_closed_form)
from .integrate import IntegratorConfig, Trajectory, integrate
from .metric import DiagonalMetric, DomainError

__all__ = [
    "DriftSummary",
    "ClosedFormUnavailable",
    "AsymptoticCheck",
    "conserved_drift",
    "validate_closed_form",
    "validate_asymptotics",
    "component_value",
    "CLOSED_FORM_THRESHOLD",
]

# horizons at or beyond this use explicit solutions where they exist
CLOSED_FORM_THRESHOLD = 1e6


@dataclass(frozen=True)
class DriftSummary:
    """Drift of each conserved functional over the accepted grid.

    Drift is relative, ``max |q - q0| / |q0|``, except for functionals whose
    initial value is zero; those report absolute drift and are listed in
    ``absolute``.
    """

    max_drift: float
    per_name: dict[str, float] = field(default_factory=dict)
    absolute: tuple[str, ...] = ()

    def passes(self, threshold: float) -> bool:
        return self.max_drift < threshold


def conserved_drift(traj: Trajectory, quantities: Optional[Iterable[Conserved]] = None
                    ) -> DriftSummary:
    """Maximum drift of the conserved functionals along ``traj``.

    ``quantities`` defaults to the class's conserved set evaluated at the
    trajectory's initial data.
    """
    spec = traj.spec
    if quantities is None:
        quantities = conserved(spec.cls, spec.params, spec.init)
    quantities = list(quantities)
    if not quantities:
        raise DomainError(f"{spec.cls} has no conserved functionals")
    states = traj.states
    cols = [states[:, i] for i in range(4)]
    per_name: dict[str, float] = {}
    absolute = []
    for q in quantities:
        values = np.asarray(q.evaluate(*cols), dtype=float) * np.ones(len(states))
        dev = float(np.max(np.abs(values - q.value)))
        if q.value == 0.0:
            absolute.append(q.name)
            per_name[q.name] = dev
        else:
            per_name[q.name] = dev / abs(q.value)
    return DriftSummary(max(per_name.values()), per_name, tuple(absolute))


class ClosedFormUnavailable(DomainError):
    """The class (or these initial data) has no full explicit solution."""


def validate_closed_form(cls: ClassId, params: ClassParams, init: InitialData,
                         t_samples: Sequence[float],
                         config: Optional[IntegratorConfig] = None) -> float:
    """Largest componentwise relative error of the integrator at ``t_samples``.

    Raises
    ------
    ClosedFormUnavailable
        If the class has no full explicit solution for ``init``.
    """
    cls = ClassId.parse(cls)
    if not has_full_closed_form(cls, init):
        raise ClosedFormUnavailable(f"{cls} has no full explicit solution for {init}")
    samples = sorted(float(t) for t in t_samples)
    if not samples or samples[0] < 0:
        raise DomainError("t_samples must be nonempty and nonnegative")
    t_end = samples[-1]
    if t_end == 0.0:
        return 0.0
    cfg = replace(config, t_end=t_end) if config is not None else IntegratorConfig(t_end=t_end)
    traj = integrate(cls, params, init, cfg)
    worst = 0.0
    for t in samples:
        num = traj.state_tuple(t)
        ref = closed_form(cls, params, init, t).as_tuple()
        worst = max(worst, max(abs(x - r) / abs(r) for x, r in zip(num, ref)))
    return worst


@dataclass(frozen=True)
class AsymptoticCheck:
    component: str
    descriptor: object
    residual: float
    horizon: float
    path: str


def component_value(state: DiagonalMetric, component: str) -> float:
    """Value of ``"A"``..``"D"`` or of the ratio ``"B/C"``."""
    if component == "B/C":
        return state.b / state.c
    return state["ABCD".index(component)]


def _residual(descriptor, y_t: float, y_2t: float, horizon: float) -> float:
    if isinstance(descriptor, Limit):
        return abs(y_t / descriptor.value - 1.0)
    if isinstance(descriptor, GrowthPower):
        return abs(math.log(y_2t / y_t) / math.log(2.0) - descriptor.exponent)
    if isinstance(descriptor, LinearGrowth):
        return abs(y_t / (descriptor.slope * horizon) - 1.0)
    if isinstance(descriptor, LogGrowth):
        p = descriptor.power
        return abs((y_2t ** p - y_t ** p) / (descriptor.coefficient * math.log(2.0)) - 1.0)
    raise TypeError(f"unknown descriptor {descriptor!r}")


def validate_asymptotics(cls: ClassId, params: ClassParams, init: InitialData,
                         horizon: float, *, path: str = "auto",
                         config: Optional[IntegratorConfig] = None) -> list[AsymptoticCheck]:
    """Residual of every descriptor of the class's asymptotic profile at ``horizon``.

    Growth descriptors compare the states at ``horizon`` and ``2 * horizon``.
    With ``path="auto"`` explicit solutions are used for horizons of at least
    ``CLOSED_FORM_THRESHOLD`` when available and integration otherwise; the
    chosen path is recorded on each check.
    """
    cls = ClassId.parse(cls)
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    if path == "auto":
        path = ("closed-form" if has_full_closed_form(cls, init)
                and horizon >= CLOSED_FORM_THRESHOLD else "numeric")
    if path == "closed-form":
        if not has_full_closed_form(cls, init):
            raise ClosedFormUnavailable(f"{cls} has no full explicit solution for {init}")
        s_t = closed_form(cls, params, init, horizon)
        s_2t = closed_form(cls, params, init, 2.0 * horizon)
    elif path == "numeric":
        cfg = (replace(config, t_end=2.0 * horizon) if config is not None
               else IntegratorConfig(t_end=2.0 * horizon))
        traj = integrate(cls, params, init, cfg)
        s_t, s_2t = traj(horizon), traj.final
    else:
        raise ValueError(f"unknown evaluation path {path!r}")
    out = []
    for comp, desc in asymptotic_profile(cls, params, init):
        r = _residual(desc, component_value(s_t, comp), component_value(s_2t, comp), horizon)
        out.append(AsymptoticCheck(comp, desc, r, float(horizon), path))
    return out
