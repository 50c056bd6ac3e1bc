"""Diagonalizing frames per geometry class and the frame-change algebra.

A frame ``Y_i = Lambda_i^k X_k`` is described by a 4x4 matrix whose free
entries are named ``a1``..``a6``.  Two frames of the same class differ by the
transition matrix ``Lambda @ inv(Lambda')``, which in every class is fixed by a
handful of reduced parameters (:class:`FrameParams`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .geometry import ClassId
from .metric import DiagonalMetric, DomainError, frame_quotient

__all__ = [
    "FrameShapeError",
    "FrameParams",
    "PARAM_NAMES",
    "frame_symbols",
    "frame_matrix",
    "frame_entries",
    "reduced_params",
    "transition_matrix",
    "displayed_terms",
    "displayed_norm_sq",
    "DISPLAYED_TERM_COUNT",
]

SHAPE_ATOL = 1e-12


class FrameShapeError(DomainError):
    """A frame matrix does not have the class's diagonalizing-frame shape."""


PARAM_NAMES: dict[ClassId, tuple[str, ...]] = {
    ClassId.A1: (),
    ClassId.A2iv: ("a", "b", "c"),
    ClassId.A3: ("a", "b", "c"),
    ClassId.A4: ("a", "b", "c", "d", "e", "f"),
    ClassId.A5: ("a", "b", "c", "d"),
    ClassId.A6: ("a", "b", "c", "d", "e"),
    ClassId.A7i: ("a", "b", "c"),
    ClassId.A7ii: ("a", "b", "c", "d"),
    ClassId.A8: ("a", "b", "c"),
    ClassId.A9ii: ("a",),
}


@dataclass(frozen=True)
class FrameParams:
    """Reduced frame-difference parameters of a class, in the order of ``PARAM_NAMES``."""

    cls: ClassId
    values: tuple[float, ...] = ()

    def __post_init__(self):
        cls = ClassId.parse(self.cls)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(PARAM_NAMES[cls]):
            raise DomainError(f"{cls} frame parameters have arity {len(PARAM_NAMES[cls])}, "
                              f"got {len(vals)}")
        object.__setattr__(self, "cls", cls)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, geometry: ClassId) -> "FrameParams":
        geometry = ClassId.parse(geometry)
        return cls(geometry, (0.0,) * len(PARAM_NAMES[geometry]))

    @classmethod
    def from_dict(cls, geometry: ClassId, values: Mapping[str, float]) -> "FrameParams":
        geometry = ClassId.parse(geometry)
        names = PARAM_NAMES[geometry]
        unknown = set(values) - set(names)
        if unknown:
            raise DomainError(f"{geometry} has no frame parameters {sorted(unknown)}")
        return cls(geometry, tuple(float(values.get(n, 0.0)) for n in names))

    @property
    def names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self.cls]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def __getitem__(self, name: str) -> float:
        return self.as_dict()[name]

    def replace(self, **changes: float) -> "FrameParams":
        d = self.as_dict()
        d.update(changes)
        return FrameParams.from_dict(self.cls, d)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)


# --- frame shapes -------------------------------------------------------------

# (row, col) -> (symbol, sign); every other off-diagonal entry is 0 and the diagonal is 1
_BOTTOM_ROW = {(3, 0): ("a4", 1), (3, 1): ("a5", 1), (3, 2): ("a6", 1)}
_SHAPES: dict[ClassId, dict[tuple[int, int], tuple[str, int]]] = {
    ClassId.A1: {},
    ClassId.A2iv: dict(_BOTTOM_ROW),
    ClassId.A3: dict(_BOTTOM_ROW),
    ClassId.A4: {(0, 1): ("a2", 1), (0, 2): ("a3", 1), (2, 1): ("a1", 1), **_BOTTOM_ROW},
    ClassId.A5: {(0, 1): ("a2", 1), **_BOTTOM_ROW},
    ClassId.A6: {(0, 1): ("a1", 1), (0, 2): ("a3", 1), (1, 2): ("a1", 1), **_BOTTOM_ROW},
    ClassId.A7i: {(0, 1): ("a3", -1), (0, 2): ("a1", 1), (0, 3): ("a6", 1),
                  (1, 3): ("a3", 1), (2, 3): ("a1", 1)},
    ClassId.A7ii: {(0, 1): ("a3", -1), (0, 3): ("a6", 1), (1, 2): ("a2", 1), (1, 3): ("a3", 1)},
    ClassId.A8: {(0, 1): ("a3", 1), (0, 2): ("a1", 1), (0, 3): ("a6", 1),
                 (1, 3): ("a3", 1), (2, 3): ("a1", 1)},
    ClassId.A9ii: {(3, 2): ("a3", 1)},
}


def frame_symbols(cls: ClassId) -> tuple[str, ...]:
    """Names of the free entries of the class's frame, sorted."""
    return tuple(sorted({sym for sym, _ in _SHAPES[ClassId.parse(cls)].values()}))


def frame_matrix(cls: ClassId, **entries: float) -> np.ndarray:
    """Build the class's frame matrix from its free entries (missing ones default to 0)."""
    cls = ClassId.parse(cls)
    allowed = set(frame_symbols(cls))
    extra = set(entries) - allowed
    if extra:
        raise FrameShapeError(f"{cls} frame has no entries {sorted(extra)}; allowed {sorted(allowed)}")
    m = np.eye(4)
    for (i, j), (sym, sign) in _SHAPES[cls].items():
        m[i, j] = sign * float(entries.get(sym, 0.0))
    return m


def frame_entries(cls: ClassId, lam) -> dict[str, float]:
    """Read the free entries of a class-shaped frame, checking every fixed entry."""
    cls = ClassId.parse(cls)
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4, 4):
        raise FrameShapeError(f"expected a 4x4 frame matrix, got shape {lam.shape}")
    shape = _SHAPES[cls]
    found: dict[str, float] = {}
    for i in range(4):
        for j in range(4):
            v = float(lam[i, j])
            if (i, j) in shape:
                sym, sign = shape[(i, j)]
                val = sign * v
                if sym in found and abs(found[sym] - val) > SHAPE_ATOL:
                    raise FrameShapeError(
                        f"{cls} frame entry ({i + 1},{j + 1})={v!r} must equal "
                        f"{'-' if sign < 0 else ''}{sym}={found[sym]!r}")
                found.setdefault(sym, val)
            else:
                want = 1.0 if i == j else 0.0
                if abs(v - want) > SHAPE_ATOL:
                    raise FrameShapeError(
                        f"{cls} frame entry ({i + 1},{j + 1})={v!r} must be {want:g}")
    return found


# --- reduced parameters -----------------------------------------------------

def _reduced(cls: ClassId, x: dict[str, float], p: dict[str, float]) -> tuple[float, ...]:
    g = lambda s: x.get(s, 0.0)      # noqa: E731
    q = lambda s: p.get(s, 0.0)      # noqa: E731
    a1, a2, a3, a4, a5, a6 = (g(f"a{i}") for i in range(1, 7))
    b1, b2, b3, b4, b5, b6 = (q(f"a{i}") for i in range(1, 7))

    if cls is ClassId.A1:
        return ()
    if cls in (ClassId.A2iv, ClassId.A3):
        return (a4 - b4, a5 - b5, a6 - b6)
    if cls is ClassId.A4:
        return (a1 - b1,
                a2 - b2 + b1 * b3 - b1 * a3,
                a3 - b3,
                a4 - b4,
                a5 - b5 + b2 * b4 - b2 * a4 + b1 * b6 - b1 * a6 + b1 * b3 * a4 - b1 * b3 * b4,
                a6 - b6 + b3 * b4 - b3 * a4)
    if cls is ClassId.A5:
        return (a2 - b2, a4 - b4, a5 - b5 + b2 * b4 - b2 * a4, a6 - b6)
    if cls is ClassId.A6:
        return (a1 - b1,
                a4 - b4,
                a5 - b5 + b1 * b4 - b1 * a4,
                a6 - b6 + b1 * b5 - b1 * a5 + b1 * b1 * a4 - b1 * b1 * b4 + b3 * b4 - b3 * a4,
                a3 - b3 + b1 * b1 - a1 * b1)
    if cls is ClassId.A7i:
        return (-a3 + b3, a1 - b1, a6 - b6 + a3 * b3 - a1 * b1 - b3 * b3 + b1 * b1)
    if cls is ClassId.A7ii:
        return (b3 - a3, a2 - b2, b2 * a3 - b2 * b3, a6 - b6 + a3 * b3 - b3 * b3)
    if cls is ClassId.A8:
        return (a3 - b3, a1 - b1, a6 - b6 - a1 * b1 - a3 * b3 + b1 * b1 + b3 * b3)
    if cls is ClassId.A9ii:
        return (a3 - b3,)
    raise AssertionError(cls)


def transition_matrix(frame: FrameParams) -> np.ndarray:
    """The parameterized transition matrix built from reduced parameters."""
    cls = frame.cls
    v = frame.as_dict()
    m = np.eye(4)
    if cls is ClassId.A1:
        return m
    if cls in (ClassId.A2iv, ClassId.A3):
        m[3, :3] = v["a"], v["b"], v["c"]
    elif cls is ClassId.A4:
        m[0, 1], m[0, 2], m[2, 1] = v["b"], v["c"], v["a"]
        m[3, :3] = v["d"], v["e"], v["f"]
    elif cls is ClassId.A5:
        m[0, 1] = v["a"]
        m[3, :3] = v["b"], v["c"], v["d"]
    elif cls is ClassId.A6:
        m[0, 1], m[0, 2], m[1, 2] = v["a"], v["e"], v["a"]
        m[3, :3] = v["b"], v["c"], v["d"]
    elif cls is ClassId.A7i:
        m[0, 1:] = v["a"], v["b"], v["c"]
        m[1, 3], m[2, 3] = -v["a"], v["b"]
    elif cls is ClassId.A7ii:
        m[0, 1:] = v["a"], v["c"], v["d"]
        m[1, 2], m[1, 3] = v["b"], -v["a"]
    elif cls is ClassId.A8:
        m[0, 1:] = v["a"], v["b"], v["c"]
        m[1, 3], m[2, 3] = v["a"], v["b"]
    elif cls is ClassId.A9ii:
        m[3, 2] = v["a"]
    return m


def reduced_params(cls: ClassId, lam, lam_prime, *, check: bool = True) -> FrameParams:
    """Reduced parameters of the transition between two class-shaped frames.

    With ``check`` the parameterized matrix is compared against the numerically
    computed quotient ``lam @ inv(lam_prime)``.
    """
    cls = ClassId.parse(cls)
    x = frame_entries(cls, lam)
    p = frame_entries(cls, lam_prime)
    fp = FrameParams(cls, _reduced(cls, x, p))
    if check:
        quotient = frame_quotient(lam, lam_prime)
        built = transition_matrix(fp)
        scale = max(1.0, float(np.max(np.abs(quotient))))
        err = float(np.max(np.abs(quotient - built)))
        if err > 1e-10 * scale:
            raise FrameShapeError(f"{cls} reduced parameters disagree with the frame quotient "
                                  f"(max deviation {err:.3e})")
    return fp


# --- the per-class expansions of |gbar - g|_g^2 ------------------------------

DISPLAYED_TERM_COUNT = {
    ClassId.A2iv: 7, ClassId.A3: 7, ClassId.A4: 10, ClassId.A5: 8, ClassId.A6: 10,
    ClassId.A7i: 10, ClassId.A7ii: 9, ClassId.A8: 10, ClassId.A9ii: 5,
}


def displayed_terms(g: DiagonalMetric, gbar: DiagonalMetric, frame: FrameParams) -> list[float]:
    """Term-by-term expansion of ``|gbar_alpha - g|_g^2`` written out per class."""
    A, B, C, D = g.as_tuple()
    Ab, Bb, Cb, Db = gbar.as_tuple()
    cls = frame.cls
    v = frame.as_dict()

    if cls in (ClassId.A2iv, ClassId.A3):
        a, b, c = v["a"], v["b"], v["c"]
        return [((A - Ab) / A) ** 2, ((B - Bb) / B) ** 2, ((C - Cb) / C) ** 2,
                2 * (Ab * a) ** 2 / (A * D),
                2 * (Bb * b) ** 2 / (B * D),
                2 * (Cb * c) ** 2 / (C * D),
                ((a * a * Ab + b * b * Bb + c * c * Cb + Db - D) / D) ** 2]
    if cls is ClassId.A4:
        a, b, c, d, e, f = (v[n] for n in "abcdef")
        return [((Ab + b * b * Bb + c * c * Cb - A) / A) ** 2,
                ((B - Bb) / B) ** 2,
                ((C - Cb - a * a * Bb) / C) ** 2,
                ((d * d * Ab + e * e * Bb + f * f * Cb + Db - D) / D) ** 2,
                2 * (b * Bb) ** 2 / (A * B),
                2 * (b * Bb * a + c * Cb) ** 2 / (A * C),
                2 * (d * Ab + b * Bb * e + c * Cb * f) ** 2 / (A * D),
                2 * (a * Bb) ** 2 / (B * C),
                2 * (e * Bb) ** 2 / (B * D),
                2 * (a * Bb * e + f * Cb) ** 2 / (C * D)]
    if cls is ClassId.A5:
        a, b, c, d = (v[n] for n in "abcd")
        return [((A - Ab - a * a * Bb) / A) ** 2,
                ((B - Bb) / B) ** 2,
                ((C - Cb) / C) ** 2,
                ((b * b * Ab + c * c * Bb + d * d * Cb + Db - D) / D) ** 2,
                2 * (a * Bb) ** 2 / (A * B),
                2 * (b * Ab + a * c * Bb) ** 2 / (A * D),
                2 * (c * Bb) ** 2 / (B * D),
                2 * (d * Cb) ** 2 / (C * D)]
    if cls is ClassId.A6:
        a, b, c, d, e = (v[n] for n in "abcde")
        return [((A - Ab - a * a * Bb - e * e * Cb) / A) ** 2,
                ((B - Bb - a * a * Cb) / B) ** 2,
                ((C - Cb) / C) ** 2,
                ((b * b * Ab + c * c * Bb + d * d * Cb + Db - D) / D) ** 2,
                2 * (a * Bb + a * e * Cb) ** 2 / (A * B),
                2 * (e * Cb) ** 2 / (A * C),
                2 * (b * Ab + a * c * Bb + d * e * Cb) ** 2 / (A * D),
                2 * (a * Cb) ** 2 / (B * C),
                2 * (c * Bb + a * d * Cb) ** 2 / (B * D),
                2 * (d * Cb) ** 2 / (C * D)]
    if cls is ClassId.A7i:
        a, b, c = v["a"], v["b"], v["c"]
        return [((A - Ab - a * a * Bb - b * b * Cb - c * c * Db) / A) ** 2,
                ((B - Bb - a * a * Db) / B) ** 2,
                ((C - Cb - b * b * Db) / C) ** 2,
                ((D - Db) / D) ** 2,
                2 * (a * Bb - a * c * Db) ** 2 / (A * B),
                2 * (b * Cb + b * c * Db) ** 2 / (A * C),
                2 * (c * Db) ** 2 / (A * D),
                2 * (a * b * Db) ** 2 / (B * C),
                2 * (a * Db) ** 2 / (B * D),
                2 * (b * Db) ** 2 / (C * D)]
    if cls is ClassId.A7ii:
        a, b, c, d = (v[n] for n in "abcd")
        return [((A - Ab - a * a * Bb - c * c * Cb - d * d * Db) / A) ** 2,
                ((B - Bb - b * b * Cb - a * a * Db) / B) ** 2,
                ((C - Cb) / C) ** 2,
                ((D - Db) / D) ** 2,
                2 * (a * Bb + b * c * Cb - a * d * Db) ** 2 / (A * B),
                2 * (c * Cb) ** 2 / (A * C),
                2 * (d * Db) ** 2 / (A * D),
                2 * (b * Cb) ** 2 / (B * C),
                2 * (a * Db) ** 2 / (B * D)]
    if cls is ClassId.A8:
        a, b, c = v["a"], v["b"], v["c"]
        return [((A - Ab - a * a * Bb - b * b * Cb - c * c * Db) / A) ** 2,
                ((B - Bb - a * a * Db) / B) ** 2,
                ((C - Cb - b * b * Db) / C) ** 2,
                ((D - Db) / D) ** 2,
                2 * (a * Bb + a * c * Db) ** 2 / (A * B),
                2 * (b * Cb + b * c * Db) ** 2 / (A * C),
                2 * (c * Db) ** 2 / (A * D),
                2 * (a * b * Db) ** 2 / (B * C),
                2 * (a * Db) ** 2 / (B * D),
                2 * (b * Db) ** 2 / (C * D)]
    if cls is ClassId.A9ii:
        a = v["a"]
        return [((A - Ab) / A) ** 2, ((B - Bb) / B) ** 2, ((C - Cb) / C) ** 2,
                ((D - Db - a * a * Cb) / D) ** 2,
                2 * (a * Cb) ** 2 / (C * D)]
    raise DomainError(f"no written-out expansion for class {cls}")


def displayed_norm_sq(g: DiagonalMetric, gbar: DiagonalMetric, frame: FrameParams) -> float:
    return sum(displayed_terms(g, gbar, frame))
