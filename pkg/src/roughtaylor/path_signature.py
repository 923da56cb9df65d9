"""Signatures of piecewise-linear paths and degree-2 rough lifts.

A piecewise-linear path has an exact level-N signature: each linear segment
contributes exp(delta) = sum_k delta^xk / k! and segments concatenate by the
graded tensor product (Chen's identity).  The lift built this way is
geometric: the symmetric part of level 2 is half the square of level 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor_algebra import TruncatedTensor, tensor_mul

__all__ = [
    "PiecewiseLinearPath",
    "RoughLift",
    "segment_signature",
    "path_signature",
    "holder_constant",
    "p_variation_distance",
    "dyadic_times",
    "signature_grid",
]

BETA_LOW, BETA_HIGH = 1.0 / 3.0, 0.5


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Knot-based path in R^d: linear between strictly increasing times."""

    times: np.ndarray  # shape (m,), strictly increasing
    values: np.ndarray  # shape (m, d)

    def __post_init__(self) -> None:
        times = np.ascontiguousarray(self.times, dtype=float).reshape(-1)
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if len(times) < 2:
            raise ValueError("path needs at least 2 knots")
        if values.shape[0] != len(times):
            raise ValueError("times and values must have equal length")
        if not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def value_at(self, t: float | np.ndarray) -> np.ndarray:
        """Linear interpolation; t must lie within the knot range."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.times[0] - 1e-12) or np.any(t > self.times[-1] + 1e-12):
            raise ValueError("time outside path domain")
        cols = [np.interp(t, self.times, self.values[:, j]) for j in range(self.dim)]
        return np.stack(cols, axis=-1)

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"x{j + 1}" for j in range(self.dim)])
            for t, row in zip(self.times, self.values):
                writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])

    @classmethod
    def from_csv(cls, path: str) -> "PiecewiseLinearPath":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1:])


def segment_signature(delta: Sequence[float], degree: int) -> TruncatedTensor:
    """Signature of a single linear segment with increment ``delta``.

    Level k is delta^xk / k!: the k-fold simplex integral of a constant
    velocity path.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    delta = np.ascontiguousarray(delta, dtype=float).reshape(-1)
    levels = [np.ones(1)]
    for k in range(1, degree + 1):
        levels.append(np.kron(levels[-1], delta) / k)
    return TruncatedTensor(len(delta), degree, tuple(levels))


def path_signature(
    path: PiecewiseLinearPath, s: float, t: float, degree: int
) -> TruncatedTensor:
    """Exact signature of the path over [s, t] by Chen concatenation.

    Interior s, t are handled by splitting the containing segments linearly.
    """
    if s > t:
        raise ValueError(f"need s <= t, got s={s}, t={t}")
    if s < path.t_start - 1e-12 or t > path.t_end + 1e-12:
        raise ValueError("(s, t) outside path domain")
    if s == t:
        return TruncatedTensor.identity(path.dim, degree)
    interior = path.times[(path.times > s) & (path.times < t)]
    cuts = np.concatenate(([s], interior, [t]))
    points = path.value_at(cuts)
    sig = TruncatedTensor.identity(path.dim, degree)
    for a, b in zip(points[:-1], points[1:]):
        sig = tensor_mul(sig, segment_signature(b - a, degree))
    return sig


@dataclass
class RoughLift:
    """A signature evaluator over a path, with Holder metadata.

    ``path`` is the (finest available) piecewise-linear approximant; all
    signature levels are computed from it.  ``holder_const`` is a grid
    estimate of the constant C with ||y^i_{s,t}|| <= C (t-s)^(i beta); being
    a maximum over finitely many pairs it is a lower bound for the true C.
    """

    path: PiecewiseLinearPath
    degree: int = 2
    beta: float | None = None
    holder_const: float | None = None
    hurst: float | None = None

    @property
    def dim(self) -> int:
        return self.path.dim

    @property
    def t_start(self) -> float:
        return self.path.t_start

    @property
    def t_end(self) -> float:
        return self.path.t_end

    def signature(self, s: float, t: float, degree: int | None = None) -> TruncatedTensor:
        return path_signature(self.path, s, t, degree or self.degree)


def dyadic_times(t_end: float, depth: int, t_start: float = 0.0) -> np.ndarray:
    """The 2**depth + 1 dyadic times of [t_start, t_end]."""
    return np.linspace(t_start, t_end, 2**depth + 1)


def signature_grid(
    lift: RoughLift | PiecewiseLinearPath, times: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Prefix signature levels 1 and 2 at the given times.

    Returns (L1, L2) with L1[i] the level-1 block and L2[i] the flattened
    level-2 block of the signature over [times[0], times[i]].  Increments
    over any grid pair follow from Chen's identity:
        y1_{ij} = L1[j] - L1[i]
        y2_{ij} = L2[j] - L2[i] - L1[i] (x) y1_{ij}
    """
    path = lift.path if isinstance(lift, RoughLift) else lift
    n = len(times)
    d = path.dim
    L1 = np.zeros((n, d))
    L2 = np.zeros((n, d * d))
    prefix = TruncatedTensor.identity(d, 2)
    for i in range(1, n):
        step = path_signature(path, float(times[i - 1]), float(times[i]), 2)
        prefix = tensor_mul(prefix, step)
        L1[i] = prefix.levels[1]
        L2[i] = prefix.levels[2]
    return L1, L2


def _pair_level_norms(
    L1: np.ndarray, L2: np.ndarray, i: int
) -> tuple[np.ndarray, np.ndarray]:
    """l1 norms of level-1/level-2 increments from grid point i to all j > i."""
    y1 = L1[i + 1 :] - L1[i]  # (m, d)
    y2 = L2[i + 1 :] - L2[i] - np.einsum("a,jb->jab", L1[i], y1).reshape(len(y1), -1)
    return np.abs(y1).sum(axis=1), np.abs(y2).sum(axis=1)


def holder_constant(
    lift: RoughLift | PiecewiseLinearPath,
    grid: np.ndarray,
    beta: float,
) -> float:
    """Grid estimate of the Holder constant of a degree-2 lift.

    Maximizes (||y^i_{s,t}|| / (t-s)^(i beta))^(1/i) over grid pairs and
    i in {1, 2}.  beta must lie in (1/3, 1/2).
    """
    if not BETA_LOW < beta < BETA_HIGH:
        raise ValueError(f"beta must lie in (1/3, 1/2), got {beta}")
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 2:
        raise ValueError("grid needs at least 2 points")
    L1, L2 = signature_grid(lift, grid)
    best = 0.0
    for i in range(len(grid) - 1):
        dt = grid[i + 1 :] - grid[i]
        n1, n2 = _pair_level_norms(L1, L2, i)
        best = max(
            best,
            float(np.max(n1 / dt**beta)),
            float(np.max(np.sqrt(n2 / dt ** (2 * beta)))),
        )
    return best


def p_variation_distance(
    a: RoughLift,
    b: RoughLift,
    depth: int = 10,
    p: float | None = None,
) -> float:
    """p-variation distance between two lifts, over dyadic partitions.

    The partition supremum is restricted to partitions whose points are
    dyadics of [0, T] at the given depth, maximized exactly by dynamic
    programming; the result is non-decreasing in depth.  p defaults to
    1/beta of the first lift.
    """
    if a.dim != b.dim:
        raise ValueError("lifts have different dimensions")
    if abs(a.t_end - b.t_end) > 1e-12 or abs(a.t_start - b.t_start) > 1e-12:
        raise ValueError("lifts live on different intervals")
    if a.degree != b.degree:
        raise ValueError("lifts have different degrees")
    if p is None:
        if a.beta is None:
            raise ValueError("p not given and lift has no beta")
        p = 1.0 / a.beta
    times = dyadic_times(a.t_end, depth, a.t_start)
    n = len(times)
    La1, La2 = signature_grid(a, times)
    Lb1, Lb2 = signature_grid(b, times)
    top = min(a.degree, int(p))
    dist = 0.0
    for level in range(1, top + 1):
        # weight[i, j] = ||x^level_{ij} - y^level_{ij}||^(p/level)
        weights = np.zeros((n, n))
        for i in range(n - 1):
            na1, na2 = _pair_level_norms_diff(La1, La2, Lb1, Lb2, i, level)
            weights[i, i + 1 :] = na1 ** (p / level) if level == 1 else na2 ** (p / level)
        best = np.full(n, -np.inf)
        best[0] = 0.0
        for j in range(1, n):
            best[j] = np.max(best[:j] + weights[:j, j])
        dist = max(dist, float(best[-1]) ** (level / p))
    return dist


def _pair_level_norms_diff(
    La1: np.ndarray,
    La2: np.ndarray,
    Lb1: np.ndarray,
    Lb2: np.ndarray,
    i: int,
    level: int,
) -> tuple[np.ndarray | None, np.ndarray | None]:
    """l1 norms of (x - y) increments at one level, from grid point i."""
    if level == 1:
        diff = (La1[i + 1 :] - La1[i]) - (Lb1[i + 1 :] - Lb1[i])
        return np.abs(diff).sum(axis=1), None
    ya1 = La1[i + 1 :] - La1[i]
    yb1 = Lb1[i + 1 :] - Lb1[i]
    ya2 = La2[i + 1 :] - La2[i] - np.einsum("a,jb->jab", La1[i], ya1).reshape(len(ya1), -1)
    yb2 = Lb2[i + 1 :] - Lb2[i] - np.einsum("a,jb->jab", Lb1[i], yb1).reshape(len(yb1), -1)
    return None, np.abs(ya2 - yb2).sum(axis=1)
