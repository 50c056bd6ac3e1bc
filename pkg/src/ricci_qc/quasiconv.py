"""Quasi-convergence of two flows of the same geometry class.

Two solutions g and gbar are quasi-convergent when ``|gbar - g|_g`` eventually
stays below every epsilon.  Here gbar is diagonal in its own frame beta and is
carried into g's frame alpha by the transition matrix of :mod:`ricci_qc.frames`.

Two deciders are provided:

* :func:`analytic_membership` checks the exact per-class constraints on the
  initial data and on the frame difference;
* :func:`numeric_membership` evaluates the norm on a geometric time grid and
  applies a tail test.

:func:`dimension_probe` estimates the dimension of an equivalence class as the
corank of the Jacobian of the equality constraints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .frames import FrameParams, PARAM_NAMES, reduced_params, transition_matrix
from .geometry import (ClassId, ClassParams, GeometrySpec, InitialData, a9ii_c1, closed_form,
                       has_full_closed_form, validate)
from .integrate import IntegrationError, IntegratorConfig, Trajectory, integrate
from .metric import DiagonalMetric, DomainError, congruence_transport, norm_sq, norm_sq_full

__all__ = [
    "Decision",
    "ConstraintKind",
    "MembershipConstraint",
    "Membership",
    "QCVerdict",
    "FramePair",
    "constraints",
    "transported_params",
    "analytic_membership",
    "numeric_membership",
    "norm_timeseries",
    "sample_grid",
    "dimension_probe",
    "tail_decision",
    "EQUALITY_RTOL",
    "TAIL_LENGTH",
    "CLOSED_FORM_HORIZON",
    "NUMERIC_HORIZON",
    "NUMERIC_SCHEDULE",
]

EQUALITY_RTOL = 1e-12
TAIL_LENGTH = 8
DIVERGENCE_FACTOR = 10.0
BLOWUP_NORM = 1e6
# samples at or below this fraction of epsilon count as "still decreasing";
# two identical flows give n == 0 exactly
NOISE_FLOOR_FRACTION = 1e-4
CLOSED_FORM_HORIZON = 1e8
NUMERIC_HORIZON = 1e5
# later horizons are integrated only while the verdict stays Inconclusive
NUMERIC_SCHEDULE = (NUMERIC_HORIZON, 1e6, 1e7)
DEFAULT_EPSILON = 1e-2


class Decision(str, enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


class ConstraintKind(str, enum.Enum):
    EQUALITY = "equality-on-initial-data"
    FRAME_EXCLUSION = "frame-exclusion"


Residual = Callable[[InitialData, InitialData, FrameParams, ClassParams], float]


@dataclass(frozen=True)
class MembershipConstraint:
    """One condition for ``gbar`` to lie in the quasi-convergence class of ``g``.

    Equality residuals are scale free (a ratio minus one); exclusion residuals
    are the value of a frame parameter that has to vanish.
    """

    name: str
    kind: ConstraintKind
    residual: Residual = field(compare=False, repr=False)

    def __call__(self, init, init_bar, frame, params) -> float:
        return float(self.residual(init, init_bar, frame, params))


def _eq(name: str, fn: Residual) -> MembershipConstraint:
    return MembershipConstraint(name, ConstraintKind.EQUALITY, fn)


def _excl(param: str) -> MembershipConstraint:
    return MembershipConstraint(f"{param} = 0", ConstraintKind.FRAME_EXCLUSION,
                                lambda l, lb, fr, p: fr[param])


def _ratio(i: int) -> MembershipConstraint:
    return _eq(f"lam{i}_bar/lam{i} = 1",
               lambda l, lb, fr, p: lb.as_tuple()[i - 1] / l.as_tuple()[i - 1] - 1.0)


def _a6_invariants(lam: InitialData) -> tuple[float, float]:
    l1, l2, l3, l4 = lam.as_tuple()
    return l2 / (l1 * l4), l3 / (l2 * l4)


def _a6(which: int):
    # limits of the component ratios, written cubed to avoid cube roots
    def res(l, lb, fr, p):
        e0, f0 = _a6_invariants(l)
        eb, fb = _a6_invariants(lb)
        r = [b / a for a, b in zip(l.as_tuple(), lb.as_tuple())]
        if which == 1:
            return r[0] ** 3 * (eb / e0) - 1.0
        if which == 2:
            return r[1] ** 3 * (fb / f0) * (e0 / eb) - 1.0
        if which == 3:
            return r[2] ** 3 * (f0 / fb) - 1.0
        return r[3] ** 3 * (eb / e0) * (fb / f0) - 1.0
    return res


def _a7ii_bar_a2(params: ClassParams, frame: FrameParams) -> float:
    return params.a2 - frame["b"]


def _a7ii_consistency(l, lb, fr, p) -> float:
    s = 1.0 - _a7ii_bar_a2(p, fr) ** 2
    return lb.lam2 / (s * lb.lam3) - 1.0


def _prod(*idx: int):
    def value(lam: InitialData) -> float:
        t = lam.as_tuple()
        out = 1.0
        for i in idx:
            out *= t[i - 1]
        return out
    return value


def _product_constraint(name: str, *idx: int) -> MembershipConstraint:
    f = _prod(*idx)
    return _eq(name, lambda l, lb, fr, p: f(lb) / f(l) - 1.0)


_CONSTRAINTS: dict[ClassId, tuple[MembershipConstraint, ...]] = {
    ClassId.A1: tuple(_ratio(i) for i in range(1, 5)),
    ClassId.A2iv: (_ratio(1), _ratio(2), _ratio(3)),
    ClassId.A3: (_product_constraint("lam1 lam2", 1, 2), _ratio(3)),
    ClassId.A4: (_ratio(3),
                 _product_constraint("lam1 lam2", 1, 2),
                 _eq("lam4/lam1", lambda l, lb, fr, p: (lb.lam4 * l.lam1) / (l.lam4 * lb.lam1) - 1.0),
                 _excl("d")),
    ClassId.A5: (_product_constraint("lam1 lam2", 1, 2), _ratio(3)),
    ClassId.A6: tuple(_eq(f"{n} ratio limit", _a6(i)) for i, n in enumerate("ABCD", 1)),
    ClassId.A7i: (_product_constraint("lam2 lam3 lam4^2", 2, 3, 4, 4),),
    ClassId.A7ii: (_product_constraint("lam2 lam4", 2, 4),
                   _eq("lam2 = (1 - a2^2) lam3", _a7ii_consistency),
                   _excl("b")),
    ClassId.A8: (_product_constraint("lam2 lam3 lam4^2", 2, 3, 4, 4),
                 _eq("lam1 lam4 (lam2 + lam3)",
                     lambda l, lb, fr, p: (lb.lam1 * lb.lam4 * (lb.lam2 + lb.lam3))
                     / (l.lam1 * l.lam4 * (l.lam2 + l.lam3)) - 1.0),
                 _excl("a"), _excl("b")),
    ClassId.A9ii: (_eq("lam2 = lam1", lambda l, lb, fr, p: lb.lam2 / lb.lam1 - 1.0),
                   _eq("c1", lambda l, lb, fr, p: a9ii_c1(lb.lam1, lb.lam3)
                       / a9ii_c1(l.lam1, l.lam3) - 1.0),
                   _excl("a")),
}


def constraints(cls: ClassId) -> tuple[MembershipConstraint, ...]:
    """The membership constraints of a class (equalities first, then exclusions)."""
    return _CONSTRAINTS[ClassId.parse(cls)]


def transported_params(cls: ClassId, params: ClassParams, frame: FrameParams) -> ClassParams:
    """Class parameters of ``gbar``.

    The structure constants entering the A7ii and A9ii flows are themselves
    frame entries, so a frame difference changes them: ``a2' = a2 - b`` (A7ii)
    and ``a3' = a3 - a`` (A9ii).  Every other class shares ``params``.
    """
    cls = ClassId.parse(cls)
    if cls is ClassId.A7ii:
        return replace(params, a2=_a7ii_bar_a2(params, frame))
    if cls is ClassId.A9ii:
        return replace(params, a3=params.a3 - frame["a"])
    return params


class Membership(NamedTuple):
    member: bool
    residuals: dict[str, float]


def _check_frame(cls: ClassId, frame: Optional[FrameParams]) -> FrameParams:
    if frame is None:
        return FrameParams.zero(cls)
    if frame.cls is not cls:
        raise DomainError(f"frame parameters belong to {frame.cls}, not {cls}")
    return frame


def analytic_membership(cls: ClassId, params: ClassParams, init: InitialData,
                        init_bar: InitialData, frame: Optional[FrameParams] = None) -> Membership:
    """Decide ``gbar in [g]`` from the exact per-class constraints.

    Equality residuals must be below ``EQUALITY_RTOL`` in absolute value and
    excluded frame parameters must be exactly zero.  The residuals are returned
    whatever the outcome.
    """
    cls = ClassId.parse(cls)
    validate(cls, params, init)
    frame = _check_frame(cls, frame)
    residuals: dict[str, float] = {}
    member = True
    for c in constraints(cls):
        r = c(init, init_bar, frame, params)
        residuals[c.name] = r
        if c.kind is ConstraintKind.EQUALITY:
            member &= abs(r) < EQUALITY_RTOL
        else:
            member &= r == 0.0
    return Membership(bool(member), residuals)


# --- numeric decision -------------------------------------------------------

@dataclass(frozen=True)
class QCVerdict:
    """Outcome of :func:`numeric_membership`.

    ``samples`` are ``(t, n(t))`` pairs on the geometric grid up to ``horizon``;
    ``path`` is ``"closed-form"`` or ``"numeric"``.
    """

    decision: Decision
    samples: tuple[tuple[float, float], ...]
    residuals: dict[str, float]
    horizon: float
    path: str
    epsilon: float
    message: str = ""
    g_states: tuple[tuple[float, float, float, float], ...] = ()

    @property
    def final_norm(self) -> float:
        return self.samples[-1][1] if self.samples else math.nan

    def tail(self, m: int = TAIL_LENGTH) -> tuple[tuple[float, float], ...]:
        return self.samples[-m:]


@dataclass(frozen=True)
class FramePair:
    """Two class-shaped frame matrices (for g and for gbar)."""

    cls: ClassId
    lam: np.ndarray
    lam_prime: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cls", ClassId.parse(self.cls))
        object.__setattr__(self, "lam", np.array(self.lam, dtype=float))
        object.__setattr__(self, "lam_prime", np.array(self.lam_prime, dtype=float))
        self.params  # validates both shapes

    @property
    def params(self) -> FrameParams:
        return reduced_params(self.cls, self.lam, self.lam_prime)


def sample_grid(horizon: float, t0: float = 1.0) -> list[float]:
    """``t0 * 2**j`` below ``horizon``, followed by ``horizon`` itself."""
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    grid = []
    t = t0
    while t < horizon:
        grid.append(t)
        t *= 2.0
    grid.append(float(horizon))
    return grid


def _closed_form_available(cls, init, init_bar) -> bool:
    return has_full_closed_form(cls, init) and has_full_closed_form(cls, init_bar)


class _Sources(NamedTuple):
    g: Callable[[float], DiagonalMetric]
    gbar: Callable[[float], DiagonalMetric]
    path: str
    reach: float            # largest time both sources can evaluate
    error: Optional[IntegrationError]


def _sources(cls, params, params_bar, init, init_bar, t_max, path, config) -> _Sources:
    if path == "auto":
        path = "closed-form" if _closed_form_available(cls, init, init_bar) else "numeric"
    if path == "closed-form":
        if not _closed_form_available(cls, init, init_bar):
            raise DomainError(f"{cls} has no explicit solution for these initial data")
        return _Sources(lambda t: closed_form(cls, params, init, t),
                        lambda t: closed_form(cls, params_bar, init_bar, t),
                        path, t_max, None)
    if path != "numeric":
        raise ValueError(f"unknown evaluation path {path!r}")
    cfg = replace(config, t_end=t_max) if config is not None else IntegratorConfig(t_end=t_max)
    trajs: list[Trajectory] = []
    error = None
    for p, lam in ((params, init), (params_bar, init_bar)):
        try:
            trajs.append(integrate(cls, p, lam, cfg))
        except IntegrationError as exc:
            trajs.append(exc.trajectory)
            error = error or exc
    reach = min(tr.t_end for tr in trajs)
    return _Sources(trajs[0], trajs[1], path, reach, error)


def _norm_at(g: DiagonalMetric, gbar: DiagonalMetric, tmat, norm: str) -> float:
    transported = congruence_transport(tmat, gbar)
    h = transported.minus_diagonal(g)
    if norm == "g":
        return math.sqrt(norm_sq(g, h))
    if norm == "gbar":
        return math.sqrt(norm_sq_full(transported, h))
    raise ValueError(f"norm must be 'g' or 'gbar', got {norm!r}")


def _prepare(cls, params, init, init_bar, frame, params_bar):
    cls = ClassId.parse(cls)
    frame = _check_frame(cls, frame)
    if params_bar is None:
        params_bar = transported_params(cls, params, frame)
    GeometrySpec(cls, params, init)
    GeometrySpec(cls, params_bar, init_bar)
    return cls, frame, params_bar


def norm_timeseries(cls: ClassId, params: ClassParams, init: InitialData, init_bar: InitialData,
                    frame: Optional[FrameParams], grid: Sequence[float], *,
                    params_bar: Optional[ClassParams] = None, norm: str = "g",
                    path: str = "auto", config: Optional[IntegratorConfig] = None
                    ) -> list[tuple[float, float]]:
    """``(t, |gbar_alpha(t) - g(t)|)`` at each time of ``grid``.

    ``norm="g"`` measures the difference with g (the default), ``norm="gbar"``
    with the transported gbar.
    """
    cls, frame, params_bar = _prepare(cls, params, init, init_bar, frame, params_bar)
    grid = [float(t) for t in grid]
    if any(t < 0 for t in grid):
        raise DomainError("grid times must be nonnegative")
    t_max = max(grid) if grid else 0.0
    if t_max == 0.0:
        tmat = transition_matrix(frame)
        return [(t, _norm_at(init.metric(), init_bar.metric(), tmat, norm)) for t in grid]
    src = _sources(cls, params, params_bar, init, init_bar, t_max, path, config)
    if src.error is not None:
        raise src.error
    tmat = transition_matrix(frame)
    return [(t, _norm_at(src.g(t), src.gbar(t), tmat, norm)) for t in grid]


def tail_decision(values: Sequence[float], epsilon: float) -> Decision:
    """Apply the tail test to norm samples on a geometric grid."""
    values = list(values)
    if not values:
        return Decision.INCONCLUSIVE
    if any(not math.isfinite(v) or v > BLOWUP_NORM for v in values):
        return Decision.DIVERGES
    quarter = values[-max(1, len(values) // 4):]
    if min(quarter) > DIVERGENCE_FACTOR * epsilon:
        return Decision.DIVERGES
    floor = NOISE_FLOOR_FRACTION * epsilon
    tail = values[-TAIL_LENGTH:]
    decreasing = len(tail) == TAIL_LENGTH and all(
        b < a or b <= floor for a, b in zip(tail, tail[1:]))
    if decreasing and values[-1] < epsilon:
        return Decision.CONVERGES
    return Decision.INCONCLUSIVE


def numeric_membership(cls: ClassId, params: ClassParams, init: InitialData,
                       init_bar: InitialData, frame: Optional[FrameParams] = None,
                       epsilon: float = DEFAULT_EPSILON,
                       horizon_schedule: Optional[Sequence[float]] = None, *,
                       params_bar: Optional[ClassParams] = None, norm: str = "g",
                       path: str = "auto", config: Optional[IntegratorConfig] = None
                       ) -> QCVerdict:
    """Decide ``gbar in [g]`` from the long-time behaviour of ``|gbar - g|_g``.

    The norm is sampled at ``t = 2**j`` and at each horizon of the schedule.
    Horizons are tried in increasing order and the first decisive verdict is
    returned; otherwise the verdict at the largest horizon.

    Parameters
    ----------
    epsilon : float
        Convergence threshold; divergence needs the tail to stay above ``10 * epsilon``.
    horizon_schedule : sequence of float, optional
        Defaults to ``(1e8,)`` when both flows have explicit solutions and
        ``NUMERIC_SCHEDULE = (1e5, 1e6, 1e7)`` otherwise.  Numeric flows are
        integrated only as far as the horizon currently being tried.
    params_bar : ClassParams, optional
        Class parameters of gbar; by default derived from ``frame`` with
        :func:`transported_params`.
    norm : {"g", "gbar"}
        Which metric measures the difference.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    cls, frame, params_bar = _prepare(cls, params, init, init_bar, frame, params_bar)
    residuals = analytic_membership(cls, params, init, init_bar, frame).residuals
    if path == "auto":
        path = "closed-form" if _closed_form_available(cls, init, init_bar) else "numeric"
    if horizon_schedule is None:
        horizon_schedule = ((CLOSED_FORM_HORIZON,) if path == "closed-form"
                            else NUMERIC_SCHEDULE)
    schedule = sorted(float(h) for h in horizon_schedule)
    if not schedule or schedule[0] <= 0:
        raise DomainError("horizon schedule must hold positive horizons")

    tmat = transition_matrix(frame)
    src = None
    cache: dict[float, float] = {}
    states: dict[float, tuple] = {}

    def n(t: float) -> float:
        if t not in cache:
            g = src.g(t)
            states[t] = g.as_tuple()
            cache[t] = _norm_at(g, src.gbar(t), tmat, norm)
        return cache[t]

    verdict = None
    for horizon in schedule:
        if src is None or (src.error is None and horizon > src.reach):
            src = _sources(cls, params, params_bar, init, init_bar, horizon, path, config)
            cache.clear()
            states.clear()
        if horizon > src.reach:
            grid = [t for t in sample_grid(horizon) if t <= src.reach]
            samples = tuple((t, n(t)) for t in grid)
            return QCVerdict(Decision.INCONCLUSIVE, samples, residuals, horizon, src.path,
                             epsilon, f"integration stopped at t={src.reach:g}: {src.error}",
                             tuple(states[t] for t, _ in samples))
        samples = tuple((t, n(t)) for t in sample_grid(horizon))
        decision = tail_decision([v for _, v in samples], epsilon)
        verdict = QCVerdict(decision, samples, residuals, horizon, src.path, epsilon,
                            g_states=tuple(states[t] for t, _ in samples))
        if decision is not Decision.INCONCLUSIVE:
            break
    return verdict


# --- dimension --------------------------------------------------------------

FD_STEP = 1e-6
RANK_RTOL = 1e-8


def _equality_map(cls: ClassId, params: ClassParams, init: InitialData):
    """Equality residuals as a function of gbar's free initial-data coordinates."""
    eqs = [c for c in constraints(cls) if c.kind is ConstraintKind.EQUALITY]
    frame = FrameParams.zero(cls)
    if cls is ClassId.A9ii:
        # A = B is built in: coordinates (lam1, lam3, lam4)
        eqs = [c for c in eqs if c.name != "lam2 = lam1"]
        x0 = np.array([init.lam1, init.lam3, init.lam4], dtype=float)

        def lift(x):
            return InitialData(x[0], x[0], x[1], x[2])
    else:
        x0 = np.array(init.as_tuple(), dtype=float)

        def lift(x):
            return InitialData(*map(float, x))

    def F(x):
        lb = lift(x)
        return np.array([c(init, lb, frame, params) for c in eqs])

    return F, x0


def dimension_probe(cls: ClassId, params: ClassParams, init: InitialData) -> int:
    """Corank of the Jacobian of the equality constraints at ``gbar = g``.

    Central differences with relative step ``FD_STEP``; singular values below
    ``RANK_RTOL`` times the largest count as zero.  Frame exclusions do not
    enter the count.
    """
    cls = ClassId.parse(cls)
    validate(cls, params, init)
    F, x0 = _equality_map(cls, params, init)
    n = x0.size
    if F(x0).size == 0:
        return n
    cols = []
    for i in range(n):
        h = FD_STEP * max(abs(x0[i]), 1e-300)
        xp, xm = x0.copy(), x0.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((F(xp) - F(xm)) / (2.0 * h))
    J = np.column_stack(cols)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return n
    rank = int(np.sum(sv > RANK_RTOL * sv[0]))
    return n - rank


def frame_param_names(cls: ClassId) -> tuple[str, ...]:
    return PARAM_NAMES[ClassId.parse(cls)]
