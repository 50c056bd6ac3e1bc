"""Seeded generators of valid geometries and of member / non-member pairs.

All functions take a :class:`numpy.random.Generator`, so a run is reproduced by
its seed.  Satisfying pairs keep perturbations small enough that the slowest
classes (A3, A5, A8) settle below ``epsilon = 1e-2`` within the default
horizons; violating pairs break a single constraint by a factor in
``[1.5, 2.5]`` (or its inverse), or set one excluded frame parameter to a value
of magnitude ``[0.3, 0.6]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .frames import FrameParams, PARAM_NAMES
from .geometry import ClassId, ClassParams, InitialData, a9ii_c1, a9ii_c_of_a, validate

__all__ = [
    "Case",
    "random_params",
    "random_init",
    "satisfying_case",
    "violating_case",
    "cross_cases",
]


@dataclass(frozen=True)
class Case:
    cls: ClassId
    params: ClassParams
    init: InitialData
    init_bar: InitialData
    frame: FrameParams
    violated: Optional[str] = None   # name of the perturbation, None for members

    @property
    def expected_member(self) -> bool:
        return self.violated is None


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def _jitter(rng: np.random.Generator, delta: float) -> float:
    """Multiplicative factor ``exp(U(-delta, delta))``."""
    return float(math.exp(rng.uniform(-delta, delta)))


def random_params(cls: ClassId, rng: np.random.Generator) -> ClassParams:
    cls = ClassId.parse(cls)
    if cls is ClassId.A2iv:
        while True:
            k = float(rng.uniform(-3.0, 3.0))
            if min(abs(k), abs(k - 1.0), abs(k + 0.5)) > 0.1:
                return ClassParams(k=k)
    if cls is ClassId.A3:
        # the A, B relaxation rate is t**(-1/(3 k^2)); k = +-1 keeps it observable
        return ClassParams(k=float(rng.choice([-1.0, 1.0])))
    if cls is ClassId.A7ii:
        return ClassParams(a2=float(rng.uniform(-0.5, 0.5)))
    if cls is ClassId.A9ii:
        return ClassParams(a3=float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5)))
    return ClassParams()


def random_init(cls: ClassId, params: ClassParams, rng: np.random.Generator,
                lo: float = 0.5, hi: float = 2.0) -> InitialData:
    """Log-uniform initial data in ``[lo, hi]`` adjusted to the class's side conditions."""
    cls = ClassId.parse(cls)
    lam = [_log_uniform(rng, lo, hi) for _ in range(4)]
    if cls is ClassId.A9ii:
        lam[1] = lam[0]
    if cls is ClassId.A7ii:
        lam[1] = (1.0 - params.a2 ** 2) * lam[2]
    init = InitialData(*lam)
    validate(cls, params, init)
    return init


# largest free frame entries for which members settle within the default horizon
_FREE_FRAME = {
    ClassId.A2iv: {"a": 0.5, "b": 0.5, "c": 0.5},
    ClassId.A3: {"a": 0.5, "b": 0.5, "c": 0.5},
    ClassId.A4: {n: 0.05 for n in "abcef"},
    ClassId.A5: {"a": 0.005, "b": 0.5, "c": 0.5, "d": 0.5},
    ClassId.A6: {n: 0.05 for n in "abcde"},
    ClassId.A7i: {n: 0.1 for n in "abc"},
    ClassId.A7ii: {"a": 0.5, "c": 0.5, "d": 0.5},
    ClassId.A8: {"c": 0.03},
}


def _free_frame(cls: ClassId, rng: np.random.Generator) -> FrameParams:
    widths = _FREE_FRAME.get(cls, {})
    return FrameParams.from_dict(cls, {n: float(rng.uniform(-w, w)) for n, w in widths.items()})


def _member_bar(cls: ClassId, params: ClassParams, init: InitialData,
                rng: np.random.Generator) -> InitialData:
    l1, l2, l3, l4 = init.as_tuple()
    if cls is ClassId.A1:
        return init
    if cls is ClassId.A2iv:
        return InitialData(l1, l2, l3, l4 * _jitter(rng, 1.0))
    if cls is ClassId.A3:
        # A, B relax like a power of t: keep lam1 close
        b1 = l1 * _jitter(rng, 0.05)
        return InitialData(b1, l1 * l2 / b1, l3, l4 * _jitter(rng, 0.5))
    if cls is ClassId.A5:
        # A^2 ~ lam1^2 + (2/3) lam1 lam2 log(1 + 3t/lam4): offsets in lam1 and lam4
        # fade only logarithmically
        b1 = l1 * _jitter(rng, 0.02)
        return InitialData(b1, l1 * l2 / b1, l3, l4 * _jitter(rng, 0.02))
    if cls is ClassId.A4:
        k = _jitter(rng, 0.5)
        return InitialData(k * l1, l2 / k, l3, k * l4)
    if cls is ClassId.A6:
        r1, r2 = _jitter(rng, 0.5), _jitter(rng, 0.5)
        return InitialData(r1 * l1, r2 * l2, l3 / (r1 * r2), r1 * r1 * r2 * l4)
    if cls is ClassId.A7i:
        r2, r4 = _jitter(rng, 0.5), _jitter(rng, 0.5)
        return InitialData(l1 * _jitter(rng, 0.5), r2 * l2, l3 / (r2 * r4 * r4), r4 * l4)
    if cls is ClassId.A7ii:
        r2 = _jitter(rng, 0.5)
        b2 = r2 * l2
        return InitialData(l1 * _jitter(rng, 0.5), b2, b2 / (1.0 - params.a2 ** 2), l4 / r2)
    if cls is ClassId.A8:
        b2, b3 = l2 * _jitter(rng, 0.3), l3 * _jitter(rng, 0.3)
        b4 = math.sqrt(l2 * l3 * l4 * l4 / (b2 * b3))
        b1 = l1 * l4 * (l2 + l3) / (b4 * (b2 + b3))
        return InitialData(b1, b2, b3, b4)
    if cls is ClassId.A9ii:
        b1 = l1 * _jitter(rng, 0.5)
        b3 = a9ii_c_of_a(a9ii_c1(l1, l3), b1)
        return InitialData(b1, b1, b3, l4 * _jitter(rng, 0.5))
    raise AssertionError(cls)


def satisfying_case(cls: ClassId, rng: np.random.Generator,
                    params: Optional[ClassParams] = None,
                    init: Optional[InitialData] = None) -> Case:
    """A pair that satisfies every membership constraint of the class."""
    cls = ClassId.parse(cls)
    params = params if params is not None else random_params(cls, rng)
    init = init if init is not None else random_init(cls, params, rng)
    return Case(cls, params, init, _member_bar(cls, params, init, rng), _free_frame(cls, rng))


def _factor(rng: np.random.Generator) -> float:
    f = float(rng.uniform(1.5, 2.5))
    return f if rng.random() < 0.5 else 1.0 / f


def _scale(lam: InitialData, i: int, f: float) -> InitialData:
    v = list(lam.as_tuple())
    v[i - 1] *= f
    return InitialData(*v)


# perturbations that break exactly one constraint where the constraint set allows it
_MOVES: dict[ClassId, tuple[str, ...]] = {
    ClassId.A1: ("lam1", "lam2", "lam3", "lam4"),
    ClassId.A2iv: ("lam1", "lam2", "lam3"),
    ClassId.A3: ("lam1", "lam3"),
    ClassId.A4: ("lam2", "lam3", "lam4", "frame d"),
    ClassId.A5: ("lam1", "lam3"),
    ClassId.A6: ("lam1", "lam2", "lam3", "lam4"),
    ClassId.A7i: ("lam3",),
    ClassId.A7ii: ("lam4", "frame b"),
    ClassId.A8: ("lam1", "frame a", "frame b"),
    ClassId.A9ii: ("lam3", "frame a"),
}


def violating_case(cls: ClassId, rng: np.random.Generator, move: Optional[str] = None) -> Case:
    """A satisfying pair with one perturbation that breaks membership."""
    cls = ClassId.parse(cls)
    base = satisfying_case(cls, rng)
    move = move if move is not None else str(rng.choice(_MOVES[cls]))
    if move not in _MOVES[cls]:
        raise ValueError(f"{cls} has no perturbation {move!r}; choose from {_MOVES[cls]}")
    init_bar, frame = base.init_bar, base.frame
    if move.startswith("lam"):
        f = _factor(rng)
        if cls is ClassId.A8 and move == "lam1":
            # log(B/C) relaxes at rate ~4/A; with A small the explicit integrator is
            # pinned to its stability limit unless B and C have merged bitwise
            f = max(f, 1.0 / f)
        init_bar = _scale(init_bar, int(move[3]), f)
    else:
        name = move.split()[1]
        size = float(rng.uniform(0.3, 0.6))
        if cls is ClassId.A7ii:
            # same sign as a2 keeps |a2 - b| < 1; gbar's data must match its own a2
            sign = 1.0 if base.params.a2 >= 0 else -1.0
            frame = frame.replace(b=sign * size)
            s_bar = 1.0 - (base.params.a2 - frame["b"]) ** 2
            init_bar = InitialData(init_bar.lam1, init_bar.lam2, init_bar.lam2 / s_bar,
                                   init_bar.lam4)
        elif cls is ClassId.A9ii:
            # opposite sign to a3 keeps a3 - a away from zero
            sign = -1.0 if base.params.a3 > 0 else 1.0
            frame = frame.replace(a=sign * size)
        else:
            frame = frame.replace(**{name: float(rng.choice([-1.0, 1.0])) * size})
    return Case(cls, base.params, base.init, init_bar, frame, violated=move)


def cross_cases(cls: ClassId, rng: np.random.Generator, n_member: int = 25,
                n_violating: int = 25) -> list[Case]:
    return ([satisfying_case(cls, rng) for _ in range(n_member)]
            + [violating_case(cls, rng) for _ in range(n_violating)])


def frame_names(cls: ClassId) -> tuple[str, ...]:
    return PARAM_NAMES[ClassId.parse(cls)]
