"""Catalog of the category-A homogeneous 4-geometries handled here.

For every class this module knows the reduced Ricci flow ODE for the metric
coefficients (A, B, C, D), the explicit solution where one exists, the
functionals conserved along the flow, the long-time behaviour, and the
dimension of the quasi-convergence class.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .metric import DiagonalMetric, DomainError

__all__ = [
    "ClassId",
    "ClassParams",
    "InitialData",
    "GeometrySpec",
    "Conserved",
    "Partial",
    "Unavailable",
    "Limit",
    "GrowthPower",
    "LinearGrowth",
    "LogGrowth",
    "validate",
    "rhs",
    "rhs_function",
    "closed_form",
    "has_full_closed_form",
    "conserved",
    "class_dimension",
    "asymptotic_profile",
    "a9ii_c1",
    "a9ii_c_of_a",
    "a8_k4",
]


class ClassId(str, enum.Enum):
    A1 = "A1"
    A2iv = "A2iv"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7i = "A7i"
    A7ii = "A7ii"
    A8 = "A8"
    A9ii = "A9ii"

    @classmethod
    def parse(cls, text: Union[str, "ClassId"]) -> "ClassId":
        if isinstance(text, ClassId):
            return text
        key = str(text).strip()
        for member in cls:
            if member.value.lower() == key.lower():
                return member
        raise DomainError(f"unknown geometry class {text!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ClassParams:
    """Class parameters; only the ones relevant to a class are set."""

    k: Optional[float] = None
    a2: Optional[float] = None
    a3: Optional[float] = None

    def as_dict(self) -> dict:
        return {n: v for n, v in (("k", self.k), ("a2", self.a2), ("a3", self.a3)) if v is not None}


@dataclass(frozen=True)
class InitialData:
    lam1: float
    lam2: float
    lam3: float
    lam4: float

    def __post_init__(self):
        for name in ("lam1", "lam2", "lam3", "lam4"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def of(cls, values) -> "InitialData":
        l1, l2, l3, l4 = (float(v) for v in values)
        return cls(l1, l2, l3, l4)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam1, self.lam2, self.lam3, self.lam4)

    def metric(self) -> DiagonalMetric:
        return DiagonalMetric(*self.as_tuple())


@dataclass(frozen=True)
class GeometrySpec:
    cls: ClassId
    params: ClassParams = field(default_factory=ClassParams)
    init: InitialData = field(default_factory=lambda: InitialData(1.0, 1.0, 1.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "cls", ClassId.parse(self.cls))
        validate(self.cls, self.params, self.init)


# --- validation -------------------------------------------------------------

_CONSISTENCY_RTOL = 1e-12


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def validate(cls: ClassId, params: ClassParams, init: Optional[InitialData] = None) -> None:
    """Raise :class:`DomainError` unless ``params`` (and ``init``) are valid for ``cls``."""
    cls = ClassId.parse(cls)
    if cls in (ClassId.A2iv, ClassId.A3):
        _require(params.k is not None and math.isfinite(params.k), f"{cls} needs a finite k")
    if cls is ClassId.A2iv:
        _require(params.k not in (0.0, 1.0, -0.5), "A2iv requires k not in {0, 1, -1/2}")
    if cls is ClassId.A7ii:
        _require(params.a2 is not None and math.isfinite(params.a2), "A7ii needs a finite a2")
        _require(params.a2 * params.a2 < 1.0, "A7ii requires a2^2 < 1")
    if cls is ClassId.A9ii:
        _require(params.a3 is not None and math.isfinite(params.a3), "A9ii needs a finite a3")
        _require(params.a3 != 0.0, "A9ii requires a3 != 0")
    if init is None:
        return
    for i, v in enumerate(init.as_tuple(), 1):
        _require(math.isfinite(v) and v > 0.0, f"lambda{i}={v!r} must be positive and finite")
    if cls is ClassId.A9ii:
        _require(init.lam1 == init.lam2, "A9ii requires lambda1 == lambda2 (A = B)")
    if cls is ClassId.A7ii:
        s = 1.0 - params.a2 * params.a2
        lhs, rhs_ = init.lam2, s * init.lam3
        _require(abs(lhs - rhs_) <= _CONSISTENCY_RTOL * max(lhs, rhs_),
                 f"A7ii requires lambda2 = (1 - a2^2) lambda3; got {lhs!r} vs {rhs_!r}")


# --- ODE right-hand sides ---------------------------------------------------

def rhs_function(cls: ClassId, params: ClassParams) -> Callable[[float, float, float, float], tuple]:
    """Return an unchecked ``f(A, B, C, D) -> (A', B', C', D')`` for the class."""
    cls = ClassId.parse(cls)
    validate(cls, params)

    if cls is ClassId.A1:
        return lambda A, B, C, D: (0.0, 0.0, 0.0, 0.0)

    if cls is ClassId.A2iv:
        rate = 4.0 * (params.k * params.k + params.k + 1.0)
        return lambda A, B, C, D: (0.0, 0.0, 0.0, rate)

    if cls is ClassId.A3:
        k2 = 12.0 * params.k * params.k

        def f(A, B, C, D):
            d = A * A - B * B
            return (-d / (B * D), d / (A * D), 0.0, ((A - B) ** 2 + k2 * A * B) / (A * B))
        return f

    if cls is ClassId.A4:
        # time derivative of the explicit solution, rewritten in terms of the state
        return lambda A, B, C, D: (B / D, -B * B / (A * D), 0.0, B / A)

    if cls is ClassId.A5:
        return lambda A, B, C, D: (B / D, -B * B / (A * D), 0.0, 3.0 + B / A)

    if cls is ClassId.A6:
        return lambda A, B, C, D: (B / D, (A * C - B * B) / (A * D), -C * C / (B * D), B / A + C / B)

    if cls is ClassId.A7i:
        def f(A, B, C, D):
            return (B / C + C / B + 2.0,
                    C / A + D / C - B * B / (A * C),
                    B / A + D / B - C * C / (A * B),
                    -D * D / (B * C))
        return f

    if cls is ClassId.A7ii:
        a2sq = params.a2 * params.a2
        s2 = (1.0 - a2sq) ** 2
        mix = 2.0 * (1.0 + a2sq)

        def f(A, B, C, D):
            return ((B * B + mix * B * C + s2 * C * C) / (B * C),
                    (A * D - B * B + s2 * C * C) / (A * C),
                    (A * D + B * B - s2 * C * C) / (A * B),
                    -D * D / (B * C))
        return f

    if cls is ClassId.A8:
        def f(A, B, C, D):
            return (C / B + B / C - 2.0,
                    -B * B / (A * C) + C / A + D / C,
                    -C * C / (A * B) + B / A + D / B,
                    -D * D / (B * C))
        return f

    if cls is ClassId.A9ii:
        d_rate = 4.0 * params.a3 * params.a3

        def f(A, B, C, D):
            da = C / A + 2.0
            return (da, da, -C * C / (A * A), d_rate)
        return f

    raise AssertionError(cls)


def rhs(cls: ClassId, params: ClassParams, state) -> tuple[float, float, float, float]:
    """Time derivative (A', B', C', D') of the metric coefficients."""
    if not isinstance(state, DiagonalMetric):
        state = DiagonalMetric.of(state)
    return rhs_function(cls, params)(*state.as_tuple())


# --- explicit solutions -----------------------------------------------------

@dataclass(frozen=True)
class Partial:
    """Explicit solution for a subset of the components (``None`` where unknown)."""

    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    d: Optional[float] = None

    def known(self) -> dict[str, float]:
        return {n: v for n, v in zip("ABCD", (self.a, self.b, self.c, self.d)) if v is not None}


@dataclass(frozen=True)
class Unavailable:
    reason: str

    def __bool__(self):
        return False


_FULL = {ClassId.A1, ClassId.A2iv, ClassId.A4, ClassId.A6, ClassId.A7ii}


def has_full_closed_form(cls: ClassId, init: InitialData) -> bool:
    cls = ClassId.parse(cls)
    return cls in _FULL or (cls is ClassId.A3 and init.lam1 == init.lam2)


def _cube_decay_d(init: InitialData, t: float) -> float:
    l2, l3, l4 = init.lam2, init.lam3, init.lam4
    return l4 * (1.0 + 3.0 * l4 * t / (l2 * l3)) ** (-1.0 / 3.0)


def closed_form(cls: ClassId, params: ClassParams, init: InitialData, t: float
                ) -> Union[DiagonalMetric, Partial, Unavailable]:
    cls = ClassId.parse(cls)
    validate(cls, params, init)
    if not t >= 0.0:
        raise DomainError(f"closed form requested at negative time t={t!r}")
    l1, l2, l3, l4 = init.as_tuple()

    if cls is ClassId.A1:
        return DiagonalMetric(l1, l2, l3, l4)
    if cls is ClassId.A2iv:
        k = params.k
        return DiagonalMetric(l1, l2, l3, l4 + 4.0 * (k * k + k + 1.0) * t)
    if cls is ClassId.A3:
        if l1 != l2:
            return Unavailable("A3 has no explicit solution unless lambda1 == lambda2")
        return DiagonalMetric(l1, l2, l3, l4 + 12.0 * params.k * params.k * t)
    if cls is ClassId.A4:
        u = 1.0 + 3.0 * l2 * t / (l1 * l4)
        r = u ** (1.0 / 3.0)
        return DiagonalMetric(l1 * r, l2 / r, l3, l4 * r)
    if cls is ClassId.A5:
        return Unavailable("A5 has no explicit solution")
    if cls is ClassId.A6:
        e0 = l2 / (l1 * l4)
        f0 = l3 / (l2 * l4)
        ue = (3.0 * e0 * t + 1.0) ** (1.0 / 3.0)
        uf = (3.0 * f0 * t + 1.0) ** (1.0 / 3.0)
        return DiagonalMetric(l1 * ue, l2 * uf / ue, l3 / uf, l4 * ue * uf)
    if cls is ClassId.A7i:
        return Partial(d=_cube_decay_d(init, t))
    if cls is ClassId.A7ii:
        s = 1.0 - params.a2 * params.a2
        w = (l2 ** 3 + 3.0 * s * l2 * l4 * t) ** (1.0 / 3.0)
        return DiagonalMetric(l1 + 4.0 * t, w, w / s, l2 * l4 / w)
    if cls is ClassId.A8:
        return Partial(d=_cube_decay_d(init, t))
    if cls is ClassId.A9ii:
        return Partial(d=l4 + 4.0 * params.a3 * params.a3 * t)
    raise AssertionError(cls)


def a9ii_c1(A: float, C: float) -> float:
    """Invariant ``c1 = (A + C) / (A C^2)`` of the reduced A9ii flow."""
    return (A + C) / (A * C * C)


def a9ii_c_of_a(c1: float, A: float) -> float:
    """C as a function of A along an A9ii solution with invariant ``c1``."""
    return (1.0 + math.sqrt(1.0 + 4.0 * c1 * A * A)) / (2.0 * c1 * A)


def a8_k4(init: InitialData) -> float:
    """``A D (B + C) / (sqrt(BC) D)`` at t=0; constant along A8 solutions."""
    l1, l2, l3, _ = init.as_tuple()
    return l1 * (l2 + l3) / math.sqrt(l2 * l3)


# --- conserved functionals --------------------------------------------------

@dataclass(frozen=True)
class Conserved:
    name: str
    value: float
    evaluate: Callable[[float, float, float, float], float] = field(compare=False, repr=False)

    def __call__(self, state) -> float:
        return self.evaluate(*tuple(state))


def _q(name, fn, init):
    return Conserved(name, fn(*init.as_tuple()), fn)


def conserved(cls: ClassId, params: ClassParams, init: InitialData) -> list[Conserved]:
    """Functionals of (A, B, C, D) constant along the class's flow, with their values."""
    cls = ClassId.parse(cls)
    validate(cls, params, init)
    if cls is ClassId.A1:
        return [_q(n, (lambda i: lambda *s: s[i])(i), init) for i, n in enumerate("ABCD")]
    if cls is ClassId.A2iv:
        return [_q(n, (lambda i: lambda *s: s[i])(i), init) for i, n in enumerate("ABC")]
    if cls is ClassId.A3:
        return [_q("AB", lambda A, B, C, D: A * B, init), _q("C", lambda A, B, C, D: C, init)]
    if cls is ClassId.A4:
        return [_q("AB", lambda A, B, C, D: A * B, init),
                _q("C", lambda A, B, C, D: C, init),
                _q("D/A", lambda A, B, C, D: D / A, init)]
    if cls is ClassId.A5:
        return [_q("AB", lambda A, B, C, D: A * B, init), _q("C", lambda A, B, C, D: C, init)]
    if cls is ClassId.A6:
        return [_q("ABC", lambda A, B, C, D: A * B * C, init),
                _q("CD/A", lambda A, B, C, D: C * D / A, init)]
    if cls is ClassId.A7i:
        return [_q("BCD²", lambda A, B, C, D: B * C * D * D, init),
                _q("AD(B−C)", lambda A, B, C, D: A * D * (B - C), init)]
    if cls is ClassId.A7ii:
        return [_q("BD", lambda A, B, C, D: B * D, init),
                _q("B/C", lambda A, B, C, D: B / C, init)]
    if cls is ClassId.A8:
        return [_q("BCD²", lambda A, B, C, D: B * C * D * D, init),
                _q("AD(B+C)", lambda A, B, C, D: A * D * (B + C), init)]
    if cls is ClassId.A9ii:
        return [_q("(A+C)/(AC²)", lambda A, B, C, D: (A + C) / (A * C * C), init)]
    raise AssertionError(cls)


# --- equivalence-class dimension ---------------------------------------------

_DIMENSION = {
    ClassId.A1: 0, ClassId.A2iv: 1, ClassId.A3: 2, ClassId.A4: 1, ClassId.A5: 2,
    ClassId.A6: 2, ClassId.A7i: 3, ClassId.A7ii: 2, ClassId.A8: 2, ClassId.A9ii: 2,
}


def class_dimension(cls: ClassId) -> int:
    return _DIMENSION[ClassId.parse(cls)]


# --- long-time behaviour ----------------------------------------------------

@dataclass(frozen=True)
class Limit:
    value: float


@dataclass(frozen=True)
class GrowthPower:
    exponent: float


@dataclass(frozen=True)
class LinearGrowth:
    slope: float


@dataclass(frozen=True)
class LogGrowth:
    """``y**power`` grows like ``coefficient * log t``."""

    coefficient: float
    power: float = 1.0


Descriptor = Union[Limit, GrowthPower, LinearGrowth, LogGrowth]


def asymptotic_profile(cls: ClassId, params: ClassParams, init: InitialData
                       ) -> list[tuple[str, Descriptor]]:
    """Machine-checkable long-time behaviour per component.

    Components are ``"A"``..``"D"`` or the ratio ``"B/C"``.
    """
    cls = ClassId.parse(cls)
    validate(cls, params, init)
    l1, l2, l3, l4 = init.as_tuple()
    third = 1.0 / 3.0
    if cls is ClassId.A1:
        return [(n, Limit(v)) for n, v in zip("ABCD", init.as_tuple())]
    if cls is ClassId.A2iv:
        k = params.k
        return [("A", Limit(l1)), ("B", Limit(l2)), ("C", Limit(l3)),
                ("D", LinearGrowth(4.0 * (k * k + k + 1.0)))]
    if cls is ClassId.A3:
        m = math.sqrt(l1 * l2)
        return [("A", Limit(m)), ("B", Limit(m)), ("C", Limit(l3)), ("D", GrowthPower(1.0))]
    if cls is ClassId.A4:
        return [("A", GrowthPower(third)), ("B", GrowthPower(-third)), ("C", Limit(l3)),
                ("D", GrowthPower(third))]
    if cls is ClassId.A5:
        p = l1 * l2
        # AB = p and dD/dt -> 3 give d(A^2)/dt ~ 2p/(3t)
        return [("A", LogGrowth(2.0 * p / 3.0, 2.0)), ("B", LogGrowth(2.0 / (3.0 * p), -2.0)),
                ("C", Limit(l3)), ("D", LinearGrowth(3.0))]
    if cls is ClassId.A6:
        e0, f0 = l2 / (l1 * l4), l3 / (l2 * l4)
        return [("A", GrowthPower(third)), ("B", Limit(l2 * (f0 / e0) ** third)),
                ("C", GrowthPower(-third)), ("D", GrowthPower(2.0 * third))]
    if cls is ClassId.A7i:
        return [("A", LinearGrowth(4.0)), ("B", GrowthPower(third)), ("C", GrowthPower(third)),
                ("D", GrowthPower(-third)), ("B/C", Limit(1.0))]
    if cls is ClassId.A7ii:
        return [("A", LinearGrowth(4.0)), ("B", GrowthPower(third)), ("C", GrowthPower(third)),
                ("D", GrowthPower(-third))]
    if cls is ClassId.A8:
        return [("A", Limit(a8_k4(init) / 2.0)), ("B", GrowthPower(third)),
                ("C", GrowthPower(third)), ("D", GrowthPower(-third)), ("B/C", Limit(1.0))]
    if cls is ClassId.A9ii:
        c1 = a9ii_c1(l1, l3)
        return [("A", LinearGrowth(2.0)), ("B", LinearGrowth(2.0)),
                ("C", Limit(1.0 / math.sqrt(c1))), ("D", LinearGrowth(4.0 * params.a3 ** 2))]
    raise AssertionError(cls)
