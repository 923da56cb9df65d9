"""Assembly and truncation of the Taylor expansion x0 + sum_k g_k(t).

Each term pairs the coefficient table with one signature level:
g_k has j-th component sum_{|I|=k} P^j_I y^{k,I}_{0,t}.  Signature levels
beyond degree 2 are computed from the finest piecewise-linear approximant
carried by the lift, which at desk scale is the object defining them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .bounds import BoundParams, alpha_const, k_const, tail_sum
from .path_signature import PiecewiseLinearPath, RoughLift, path_signature
from .tensor_algebra import TruncatedTensor
from .vector_fields import TaylorTable

__all__ = [
    "TaylorEvaluation",
    "TruncationBound",
    "taylor_term",
    "taylor_evaluate",
    "stopping_time",
    "bound_truncation",
]


def _as_path(driver: RoughLift | PiecewiseLinearPath) -> PiecewiseLinearPath:
    return driver.path if isinstance(driver, RoughLift) else driver


def taylor_term(table: TaylorTable, sig: TruncatedTensor, k: int) -> np.ndarray:
    """The level-k Taylor term: contract P_I against the signature level."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if sig.degree < k:
        raise ValueError(f"signature degree {sig.degree} < level {k}")
    if table.max_len < k:
        raise ValueError(f"table holds words up to length {table.max_len} < {k}")
    if sig.dim != table.dim:
        raise ValueError("signature and table have different alphabets")
    d = sig.dim
    level = sig.levels[k]
    out = np.zeros(table.n)
    for word, vec in table.coeffs.items():
        if len(word) != k:
            continue
        idx = 0
        for letter in word:
            idx = idx * d + (letter - 1)
        out += vec * level[idx]
    return out


@dataclass
class TaylorEvaluation:
    """Partial sums, term norms, and the tail bound at one evaluation time."""

    t: float
    degree: int
    partial_sums: np.ndarray  # (degree+1, n); row j is x0 + sum_{k<=j} g_k
    term_norms: np.ndarray  # (degree,)
    error_bound: float  # NaN when no bound parameters were supplied
    signature_used: TruncatedTensor

    @property
    def value(self) -> np.ndarray:
        return self.partial_sums[-1]

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "N", "j", "partial_sum", "term_norm", "error_bound"])
            for n_level in range(self.degree + 1):
                norm = self.term_norms[n_level - 1] if n_level >= 1 else 0.0
                for j, value in enumerate(self.partial_sums[n_level], start=1):
                    writer.writerow(
                        [
                            f"{self.t:.17g}",
                            n_level,
                            j,
                            f"{value:.17g}",
                            f"{norm:.17g}",
                            f"{self.error_bound:.17g}",
                        ]
                    )


class TruncationBound(float):
    """Truncation bound value; carries the non-constructive closed shape."""

    q_shape: float

    def __new__(cls, value: float, q_shape: float):
        obj = super().__new__(cls, value)
        obj.q_shape = q_shape
        return obj


def bound_truncation(params: BoundParams, n_trunc: int) -> TruncationBound:
    """Tail bound on ||X_t - partial sum at N|| for t below the stopping time.

    Evaluated through the computable chain
        (x / alpha) sum_{k>N} Gamma(k gamma)/Gamma(k beta) x^(k-1),
    with x = M K^beta T^beta.  The closed shape
    x^N exp(2 x^(1/(beta-gamma))) / Gamma((beta-gamma) N) is attached as a
    secondary diagnostic (its prefactor is not constructive).
    """
    if n_trunc < 1:
        raise ValueError("N must be >= 1")
    x = params.growth_m * (params.k * params.t_end) ** params.beta
    tail = tail_sum(n_trunc, x, params.beta, params.gamma)
    return TruncationBound(x / params.alpha * tail.value, tail.bound_shape)


def taylor_evaluate(
    table: TaylorTable,
    driver: RoughLift | PiecewiseLinearPath,
    t: float,
    degree: int,
    bound_params: BoundParams | None = None,
) -> TaylorEvaluation:
    """Partial sums x0 + sum_{k<=j} g_k(t) for j = 0..degree."""
    if degree > table.max_len:
        raise ValueError(f"degree {degree} exceeds table length {table.max_len}")
    path = _as_path(driver)
    sig = (
        path_signature(path, path.t_start, t, max(degree, 1))
        if degree >= 1
        else TruncatedTensor.identity(path.dim, 1)
    )
    partial = np.zeros((degree + 1, table.n))
    partial[0] = table.x0
    norms = np.zeros(max(degree, 0))
    for k in range(1, degree + 1):
        g_k = taylor_term(table, sig, k)
        partial[k] = partial[k - 1] + g_k
        norms[k - 1] = np.linalg.norm(g_k)
    err = float("nan")
    if bound_params is not None and degree >= 1:
        err = float(bound_truncation(bound_params, degree))
    return TaylorEvaluation(
        t=t,
        degree=degree,
        partial_sums=partial,
        term_norms=norms,
        error_bound=err,
        signature_used=sig,
    )


def _majorant(
    table: TaylorTable,
    path: PiecewiseLinearPath,
    t: float,
    r: float,
    n_eff: int,
    beta: float,
    k_ext: float,
    alpha: float,
) -> float:
    """Truncated majorant sum_{k<=n_eff} r^k ||g_k(t)|| plus its tail estimate."""
    if t <= path.t_start:
        return 0.0
    sig = path_signature(path, path.t_start, t, n_eff)
    total = 0.0
    for k in range(1, n_eff + 1):
        total += r**k * float(np.linalg.norm(taylor_term(table, sig, k)))
    if table.growth_m > 0:
        x_t = r * table.growth_m * (k_ext * (t - path.t_start)) ** beta
        if x_t > 0:
            total += x_t / alpha * tail_sum(n_eff, x_t, beta, table.growth_gamma).value
    return total


def stopping_time(
    table: TaylorTable,
    lift: RoughLift,
    r: float,
    c_radius: float,
    t_grid: np.ndarray | None = None,
    n_cap: int = 30,
    rel_tol: float = 1e-6,
) -> float:
    """First time the r-majorized Taylor series reaches half the radius.

    The series is truncated at min(n_cap, table length); terms beyond are
    majorized through the factorial-decay bound with the fitted growth
    parameters, so the crossing decision is conservative.  Grid bracketing
    is refined by bisection to rel_tol * T; returns T when the majorant
    never crosses c_radius / 2.
    """
    if r <= 1.0:
        raise ValueError("r must exceed 1")
    if c_radius <= 0.0:
        raise ValueError("analyticity radius must be positive")
    if table.growth_m is None:
        raise ValueError("table has no fitted growth parameters; run fit_growth first")
    if lift.beta is None:
        raise ValueError("lift has no Holder exponent")
    if lift.holder_const is None:
        raise ValueError("lift has no Holder constant estimate")
    path = lift.path
    t0, t1 = path.t_start, path.t_end
    if t_grid is None:
        t_grid = np.linspace(t0, t1, 65)
    n_eff = min(n_cap, table.max_len)
    alpha = alpha_const(lift.beta)
    k_ext = (
        k_const(alpha, lift.beta, lift.holder_const) if table.growth_m > 0 else 1.0
    )
    threshold = c_radius / 2.0

    def maj(t: float) -> float:
        return _majorant(table, path, t, r, n_eff, lift.beta, k_ext, alpha)

    crossing = None
    for i, t in enumerate(t_grid):
        if maj(float(t)) >= threshold:
            crossing = i
            break
    if crossing is None:
        return t1
    if crossing == 0:
        return float(t_grid[0])
    lo, hi = float(t_grid[crossing - 1]), float(t_grid[crossing])
    tol = rel_tol * (t1 - t0)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if maj(mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return hi
