"""Fixed-size 4x4 metric algebra.

Metrics that stay diagonal along the flow are carried as :class:`DiagonalMetric`;
a metric transported into another frame becomes a :class:`SymmetricMetric4`,
which keeps only its upper triangle so symmetry cannot drift.

Frame and transition matrices are plain ``(4, 4)`` float arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "SingularFrameError",
    "DiagonalMetric",
    "SymmetricMetric4",
    "as_frame_matrix",
    "solve4",
    "det4",
    "frame_quotient",
    "congruence_transport",
    "norm_sq",
    "norm_sq_full",
    "dense_contraction",
    "leading_minors",
]

# index pairs of the stored upper triangle, row-major
_TRIU = tuple((i, j) for i in range(4) for j in range(i, 4))
_SLOT = {ij: k for k, ij in enumerate(_TRIU)}


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SingularFrameError(DomainError):
    """A frame matrix is (numerically) singular."""


@dataclass(frozen=True)
class DiagonalMetric:
    """Metric coefficients (A, B, C, D) along an adapted frame."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"metric coefficient {name.upper()}={v!r} is not finite")
            if v <= 0.0:
                raise DomainError(f"metric coefficient {name.upper()}={v!r} is not positive")

    @classmethod
    def of(cls, values: Iterable[float]) -> "DiagonalMetric":
        a, b, c, d = (float(v) for v in values)
        return cls(a, b, c, d)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __iter__(self):
        return iter(self.as_tuple())

    def __getitem__(self, i: int) -> float:
        return self.as_tuple()[i]

    def to_symmetric(self) -> "SymmetricMetric4":
        return SymmetricMetric4.diagonal(self.as_tuple())


class SymmetricMetric4:
    """Symmetric 4x4 matrix stored as its 10 upper-triangle entries."""

    __slots__ = ("_u",)

    def __init__(self, upper: Sequence[float]):
        if len(upper) != 10:
            raise ValueError("expected 10 upper-triangle entries")
        self._u = tuple(float(x) for x in upper)

    @classmethod
    def from_matrix(cls, m) -> "SymmetricMetric4":
        """Build from a full matrix, reading its upper triangle only."""
        m = np.asarray(m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        return cls([m[i, j] for i, j in _TRIU])

    @classmethod
    def diagonal(cls, diag: Sequence[float]) -> "SymmetricMetric4":
        u = [0.0] * 10
        for i in range(4):
            u[_SLOT[(i, i)]] = float(diag[i])
        return cls(u)

    @property
    def upper(self) -> tuple[float, ...]:
        return self._u

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        if i > j:
            i, j = j, i
        return self._u[_SLOT[(i, j)]]

    def to_array(self) -> np.ndarray:
        m = np.empty((4, 4))
        for (i, j), v in zip(_TRIU, self._u):
            m[i, j] = m[j, i] = v
        return m

    def minus_diagonal(self, g: DiagonalMetric) -> "SymmetricMetric4":
        """Return ``self - diag(g)``."""
        u = list(self._u)
        for i, gi in enumerate(g.as_tuple()):
            u[_SLOT[(i, i)]] -= gi
        return SymmetricMetric4(u)

    def __eq__(self, other):
        return isinstance(other, SymmetricMetric4) and self._u == other._u

    def __hash__(self):
        return hash(self._u)

    def __repr__(self):
        return f"SymmetricMetric4({list(self._u)!r})"


def as_frame_matrix(m) -> np.ndarray:
    m = np.array(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("frame matrix has non-finite entries")
    return m


def _eliminate(m: np.ndarray, rhs: np.ndarray | None):
    """Gaussian elimination with partial pivoting on copies of ``m`` and ``rhs``.

    Returns ``(upper, rhs, det)``; ``det`` includes the pivot sign.
    """
    u = [list(map(float, row)) for row in m]
    r = None if rhs is None else [list(map(float, row)) for row in rhs]
    det = 1.0
    for col in range(4):
        piv = max(range(col, 4), key=lambda i: abs(u[i][col]))
        if u[piv][col] == 0.0:
            return u, r, 0.0
        if piv != col:
            u[col], u[piv] = u[piv], u[col]
            if r is not None:
                r[col], r[piv] = r[piv], r[col]
            det = -det
        p = u[col][col]
        det *= p
        for i in range(col + 1, 4):
            f = u[i][col] / p
            if f == 0.0:
                continue
            ui, uc = u[i], u[col]
            for j in range(col, 4):
                ui[j] -= f * uc[j]
            if r is not None:
                ri, rc = r[i], r[col]
                for j in range(len(rc)):
                    ri[j] -= f * rc[j]
    return u, r, det


def _check_nonsingular(m: np.ndarray, det: float) -> None:
    scale = float(np.max(np.abs(m)))
    if scale == 0.0 or abs(det) <= 1e-12 * scale**4:
        raise SingularFrameError(f"matrix is singular (det={det:.3e}, max entry={scale:.3e})")


def det4(m) -> float:
    _, _, det = _eliminate(np.asarray(m, dtype=float), None)
    return det


def solve4(m, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` for a 4x4 ``m``; ``rhs`` may be a vector or a 4xk block."""
    m = np.asarray(m, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    vec = rhs.ndim == 1
    block = rhs.reshape(4, -1)
    u, r, det = _eliminate(m, block)
    _check_nonsingular(m, det)
    k = block.shape[1]
    x = [[0.0] * k for _ in range(4)]
    for i in range(3, -1, -1):
        for j in range(k):
            s = r[i][j]
            for c in range(i + 1, 4):
                s -= u[i][c] * x[c][j]
            x[i][j] = s / u[i][i]
    out = np.array(x)
    return out[:, 0] if vec else out


def frame_quotient(lam, lam_prime) -> np.ndarray:
    """Transition matrix ``lam @ inv(lam_prime)`` taking frame beta to frame alpha.

    Computed as the solution of ``lam_prime.T @ X.T = lam.T``; no explicit inverse.
    """
    lam = as_frame_matrix(lam)
    lam_prime = as_frame_matrix(lam_prime)
    _check_nonsingular(lam, det4(lam))
    return solve4(lam_prime.T, lam.T).T


def congruence_transport(t_matrix, d: DiagonalMetric) -> SymmetricMetric4:
    """Components ``T diag(d) T^T`` of a beta-diagonal metric in frame alpha."""
    t = np.asarray(t_matrix, dtype=float)
    dv = d.as_tuple()
    u = []
    for i, j in _TRIU:
        ti, tj = t[i], t[j]
        u.append(ti[0] * dv[0] * tj[0] + ti[1] * dv[1] * tj[1]
                 + ti[2] * dv[2] * tj[2] + ti[3] * dv[3] * tj[3])
    return SymmetricMetric4(u)


def norm_sq(g: DiagonalMetric, h: SymmetricMetric4) -> float:
    """Squared norm of ``h`` measured by the diagonal metric ``g``.

    ``sum_i (h_ii/g_ii)^2 + 2 sum_{i<j} h_ij^2 / (g_ii g_jj)``.
    """
    if not isinstance(g, DiagonalMetric):
        g = DiagonalMetric.of(g)
    gv = g.as_tuple()
    total = 0.0
    for (i, j), v in zip(_TRIU, h.upper):
        if i == j:
            total += (v / gv[i]) ** 2
        else:
            total += 2.0 * v * v / (gv[i] * gv[j])
    return total


def norm_sq_full(gmat: SymmetricMetric4, h: SymmetricMetric4) -> float:
    """Squared norm ``tr(G^-1 h G^-1 h)`` for a general positive-definite ``G``."""
    # G is a metric, not a frame: its conditioning is judged by LAPACK, not the frame guard
    p = np.linalg.solve(gmat.to_array(), h.to_array())
    return float(np.einsum("ij,ji->", p, p))


def dense_contraction(g, h) -> float:
    """Reference ``g^{ik} g^{jl} h_ij h_kl`` by explicit 4-index loops.

    Independent of :func:`norm_sq`; intended as a test oracle.
    """
    ginv = np.linalg.inv(np.asarray(g, dtype=float))
    hm = np.asarray(h, dtype=float)
    total = 0.0
    for i in range(4):
        for j in range(4):
            for k in range(4):
                for l in range(4):
                    total += ginv[i, k] * ginv[j, l] * hm[i, j] * hm[k, l]
    return total


def leading_minors(m) -> list[float]:
    m = np.asarray(m, dtype=float)
    return [float(np.linalg.det(m[:k, :k])) for k in range(1, 5)]
