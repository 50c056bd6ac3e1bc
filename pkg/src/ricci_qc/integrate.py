"""Adaptive Dormand-Prince 5(4) integration of the class ODEs.

Steps are controlled by a PI controller on the mixed max-norm
``max |err_i| / (abs_tol + rel_tol |y_i|)``.  A step whose result (or any
stage) leaves the positive orthant is rejected and halved.  Every accepted step
stores the coefficients of the 4th-order continuous extension so the
trajectory can be evaluated anywhere in its time range.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .geometry import ClassId, ClassParams, GeometrySpec, InitialData, rhs_function
from .metric import DiagonalMetric, DomainError

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "IntegrationError",
    "MaxStepsExceeded",
    "StiffnessError",
    "integrate",
    "evaluate_at",
]

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_A71, _A73, _A74, _A75, _A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th minus embedded 4th order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                                22 / 525, -1 / 40)
# continuous extension
_D1, _D3, _D4, _D5, _D6, _D7 = (-12715105075 / 11282082432, 87487479700 / 32700410799,
                                -10690763975 / 1880347072, 701980252875 / 199316789632,
                                -1453857185 / 822651844, 69997945 / 29380423)

_SAFETY = 0.9
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA
_MAX_SHRINK = 5.0
_MIN_STEP = 1e-14


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 10_000_000
    initial_step: float = 1e-4
    max_growth: float = 1.5

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.t_end > 0:
            raise DomainError("t_end must be positive")
        if not self.initial_step > 0:
            raise DomainError("initial_step must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be at least 1")


class Trajectory:
    """Accepted steps of an integration plus their dense-output coefficients.

    Immutable once constructed; the arrays it exposes are read-only.
    """

    def __init__(self, spec: GeometrySpec, times, states, dense):
        self.spec = spec
        self._t = list(map(float, times))
        self._y = [tuple(map(float, s)) for s in states]
        self._dense = [tuple(tuple(map(float, r)) for r in block) for block in dense]
        self._times_arr = np.array(self._t)
        self._states_arr = np.array(self._y).reshape(-1, 4)
        self._times_arr.flags.writeable = False
        self._states_arr.flags.writeable = False

    @property
    def times(self) -> np.ndarray:
        return self._times_arr

    @property
    def states(self) -> np.ndarray:
        return self._states_arr

    @property
    def t_end(self) -> float:
        return self._t[-1]

    @property
    def n_steps(self) -> int:
        return len(self._t) - 1

    @property
    def final(self) -> DiagonalMetric:
        return DiagonalMetric(*self._y[-1])

    def state_tuple(self, t: float) -> tuple[float, float, float, float]:
        t = float(t)
        if not (self._t[0] <= t <= self._t[-1]):
            raise DomainError(f"t={t!r} outside trajectory range [{self._t[0]}, {self._t[-1]}]")
        i = bisect.bisect_left(self._t, t)
        if i < len(self._t) and self._t[i] == t:
            return self._y[i]
        i -= 1
        t0, t1 = self._t[i], self._t[i + 1]
        s = (t - t0) / (t1 - t0)
        s1 = 1.0 - s
        r1, r2, r3, r4, r5 = self._dense[i]
        return tuple(r1[k] + s * (r2[k] + s1 * (r3[k] + s * (r4[k] + s1 * r5[k])))
                     for k in range(4))

    def __call__(self, t: float) -> DiagonalMetric:
        return DiagonalMetric(*self.state_tuple(t))

    def __repr__(self):
        return (f"Trajectory({self.spec.cls}, steps={self.n_steps}, "
                f"t_end={self.t_end:g})")


class IntegrationError(RuntimeError):
    """Integration stopped early; ``trajectory`` holds the accepted part."""

    def __init__(self, message: str, trajectory: Trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class MaxStepsExceeded(IntegrationError):
    pass


class StiffnessError(IntegrationError):
    pass


def _positive(y) -> bool:
    # also rejects NaN
    return y[0] > 0.0 and y[1] > 0.0 and y[2] > 0.0 and y[3] > 0.0 and max(y) < math.inf


def integrate(cls: ClassId, params: ClassParams, init: InitialData,
              config: IntegratorConfig) -> Trajectory:
    """Integrate the class ODE from ``init`` over ``[0, config.t_end]``."""
    spec = GeometrySpec(ClassId.parse(cls), params, init)
    f = rhs_function(spec.cls, params)
    rtol, atol = config.rel_tol, config.abs_tol
    grow = config.max_growth
    t_end = float(config.t_end)

    t = 0.0
    y = init.as_tuple()
    times, states, dense = [t], [y], []
    k1 = f(*y)
    h = min(config.initial_step, t_end)
    facold = 1e-4
    last_rejected = False
    attempts = 0

    def partial():
        return Trajectory(spec, times, states, dense)

    while t < t_end:
        if attempts >= config.max_steps:
            raise MaxStepsExceeded(f"max_steps={config.max_steps} reached at t={t:g}", partial())
        attempts += 1
        if h < _MIN_STEP * max(1.0, t):
            raise StiffnessError(f"step size {h:.3e} below minimum at t={t:g}", partial())
        if t + 1.01 * h >= t_end:
            h = t_end - t

        stage_ok = True
        ks = [k1]
        coeffs = ((_A21,), (_A31, _A32), (_A41, _A42, _A43), (_A51, _A52, _A53, _A54),
                  (_A61, _A62, _A63, _A64, _A65))
        for row in coeffs:
            ys = tuple(y[i] + h * sum(a * k[i] for a, k in zip(row, ks)) for i in range(4))
            if not _positive(ys):
                stage_ok = False
                break
            ks.append(f(*ys))
        if stage_ok:
            _, k2, k3, k4, k5, k6 = ks
            ynew = tuple(y[i] + h * (_A71 * k1[i] + _A73 * k3[i] + _A74 * k4[i]
                                     + _A75 * k5[i] + _A76 * k6[i]) for i in range(4))
            stage_ok = _positive(ynew)
        if not stage_ok:
            h *= 0.5
            last_rejected = True
            continue

        k7 = f(*ynew)
        err = 0.0
        for i in range(4):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err = max(err, abs(e) / sc)
        if not math.isfinite(err):
            h *= 0.5
            last_rejected = True
            continue

        fac11 = err ** _EXPO
        if err <= 1.0:
            fac = fac11 / facold ** _BETA
            fac = max(1.0 / grow, min(_MAX_SHRINK, fac / _SAFETY))
            hnew = h / fac
            if last_rejected:
                hnew = min(hnew, h)
            facold = max(err, 1e-4)
            # dense output coefficients for this step
            ydiff = tuple(ynew[i] - y[i] for i in range(4))
            bspl = tuple(h * k1[i] - ydiff[i] for i in range(4))
            dense.append((
                y,
                ydiff,
                bspl,
                tuple(ydiff[i] - h * k7[i] - bspl[i] for i in range(4)),
                tuple(h * (_D1 * k1[i] + _D3 * k3[i] + _D4 * k4[i] + _D5 * k5[i]
                           + _D6 * k6[i] + _D7 * k7[i]) for i in range(4)),
            ))
            t = t_end if h == t_end - t else t + h
            y = ynew
            k1 = k7
            times.append(t)
            states.append(y)
            h = hnew
            last_rejected = False
        else:
            h = h / min(_MAX_SHRINK, fac11 / _SAFETY)
            last_rejected = True

    return Trajectory(spec, times, states, dense)


def evaluate_at(traj: Trajectory, t: float) -> DiagonalMetric:
    """Metric on the trajectory at time ``t`` (exact at accepted grid points)."""
    return traj(t)
