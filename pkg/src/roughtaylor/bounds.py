"""Explicit constants and inequalities behind the factorial-decay estimates.

All Gamma ratios are evaluated in log space: the tail sums reach k ~ 200,
where Gamma(k beta) alone overflows double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "BoundParams",
    "gamma_fn",
    "zeta",
    "alpha_const",
    "k_const",
    "level_bound",
    "tail_sum",
    "ml_sum",
    "TailSum",
    "MlSum",
]

GAMMA_OVERFLOW = 170.0
ZETA_TERMS = 10**6
KMAX_CAP = 10**6


def gamma_fn(x: float) -> float:
    """Gamma(x) for x > 0; reports overflow beyond the double range."""
    if x <= 0:
        raise ValueError(f"gamma_fn needs x > 0, got {x}")
    if x > GAMMA_OVERFLOW:
        raise OverflowError(
            f"Gamma({x}) overflows double precision; use log-space ratios instead"
        )
    return math.gamma(x)


def zeta(s: float, terms: int = ZETA_TERMS) -> float:
    """Riemann zeta for s > 1 by direct summation with Euler-Maclaurin tail.

    The two leading correction terms after the integral tail give absolute
    error well below 1e-10 for s near 1 at the default term count.
    """
    if s <= 1.0:
        raise ValueError(f"zeta(s) diverges for s <= 1, got s={s}")
    k = np.arange(1, terms + 1, dtype=float)
    partial = float(np.sum(k**-s))
    n = float(terms)
    tail = n ** (1.0 - s) / (s - 1.0) - 0.5 * n**-s + (s / 12.0) * n ** (-s - 1.0)
    return partial + tail


def alpha_const(beta: float) -> float:
    """The normalizing constant (1/beta^2)(1 + sum_{r>=3} (2/(r-2))^(3 beta)).

    The series resums to 2^(3 beta) zeta(3 beta); it converges iff
    3 beta > 1.
    """
    if beta <= 1.0 / 3.0:
        raise ValueError(
            f"beta={beta}: the defining series diverges for beta <= 1/3"
        )
    return (1.0 + 2.0 ** (3.0 * beta) * zeta(3.0 * beta)) / beta**2


def k_const(alpha: float, beta: float, holder_c: float) -> float:
    """K = max((alpha Gamma(beta) C)^(1/beta), (alpha Gamma(2 beta) C)^(1/(2 beta)))."""
    if alpha <= 0 or beta <= 0 or holder_c <= 0:
        raise ValueError("alpha, beta, C must all be positive")
    return max(
        (alpha * gamma_fn(beta) * holder_c) ** (1.0 / beta),
        (alpha * gamma_fn(2.0 * beta) * holder_c) ** (1.0 / (2.0 * beta)),
    )


@dataclass(frozen=True)
class BoundParams:
    """Parameters of the quantitative convergence bounds.

    beta: Holder exponent of the lift, in (1/3, 1/2).
    gamma: coefficient-growth exponent, in (0, beta).
    holder_c: Holder constant of the lift.
    growth_m: coefficient-growth scale M.
    t_end: horizon T.
    alpha, k: derived constants.
    """

    beta: float
    gamma: float
    holder_c: float
    growth_m: float
    t_end: float
    alpha: float
    k: float

    def __post_init__(self) -> None:
        if not 1.0 / 3.0 < self.beta < 0.5:
            raise ValueError(f"beta must lie in (1/3, 1/2), got {self.beta}")
        if not 0.0 < self.gamma < self.beta:
            raise ValueError(f"gamma must lie in (0, beta), got {self.gamma}")
        if min(self.holder_c, self.growth_m, self.t_end) <= 0:
            raise ValueError("C, M, T must be positive")

    @classmethod
    def create(
        cls, beta: float, gamma: float, holder_c: float, growth_m: float, t_end: float
    ) -> "BoundParams":
        alpha = alpha_const(beta)
        return cls(
            beta=beta,
            gamma=gamma,
            holder_c=holder_c,
            growth_m=growth_m,
            t_end=t_end,
            alpha=alpha,
            k=k_const(alpha, beta, holder_c),
        )


def level_bound(k: int, params: BoundParams) -> float:
    """Factorial-decay bound (K T)^(k beta) / (alpha Gamma(k beta)) on level k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    log_val = (
        k * params.beta * math.log(params.k * params.t_end)
        - math.log(params.alpha)
        - math.lgamma(k * params.beta)
    )
    if log_val > 700.0:  # beyond double range: the bound is vacuous anyway
        return math.inf
    return math.exp(log_val)


class TailSum(NamedTuple):
    value: float  # the tail sum_{k>N} Gamma(k gamma)/Gamma(k beta) x^(k-1)
    bound_shape: float  # x^N exp(2 x^(1/(beta-gamma))) / Gamma((beta-gamma) N)


class MlSum(NamedTuple):
    value: float
    paper_bound: float


def _log_terms(ks: np.ndarray, x: float, beta: float, gamma: float) -> np.ndarray:
    import scipy.special as sp

    return sp.gammaln(ks * gamma) - sp.gammaln(ks * beta) + (ks - 1) * math.log(x)


def tail_sum(
    n_trunc: int, x: float, beta: float, gamma: float, kmax: int = 400
) -> TailSum:
    """Tail sum_{k=N+1}^inf Gamma(k gamma)/Gamma(k beta) x^(k-1).

    Direct summation to kmax plus a geometric remainder estimate; the term
    ratio at kmax must have fallen below 1/2.  Also returns the closed
    bound shape for comparison (its unspecified prefactor taken as 1).
    """
    if not 0.0 < gamma < beta:
        raise ValueError(f"need 0 < gamma < beta, got gamma={gamma}, beta={beta}")
    if n_trunc < 0:
        raise ValueError("N must be >= 0")
    if x < 0:
        raise ValueError("x must be non-negative")
    delta = beta - gamma
    if n_trunc == 0:
        log_shape = 2.0 * x ** (1.0 / delta)
    elif x > 0:
        log_shape = (
            n_trunc * math.log(x) + 2.0 * x ** (1.0 / delta)
            - math.lgamma(delta * n_trunc)
        )
    else:
        log_shape = -math.inf
    shape = math.exp(log_shape) if log_shape <= 700.0 else math.inf
    if x == 0.0:
        # only the k = 1 term x^0 survives, and only when N = 0
        value = gamma_fn(gamma) / gamma_fn(beta) if n_trunc == 0 else 0.0
        return TailSum(value, shape)
    if kmax < n_trunc + 2:
        raise ValueError("kmax must leave at least two tail terms")
    # the term ratio only falls below 1/2 near k ~ x^(1/(beta-gamma)), so
    # extend the summation range until it has, within a hard cap
    while True:
        ks = np.arange(n_trunc + 1, kmax + 1, dtype=float)
        log_terms = _log_terms(ks, x, beta, gamma)
        log_ratio = log_terms[-1] - log_terms[-2]
        if log_ratio < math.log(0.5):
            break
        if kmax >= KMAX_CAP:
            raise ValueError(
                f"term ratio exp({log_ratio:.3g}) at kmax={kmax} has not "
                "fallen below 1/2; the argument x is too large"
            )
        kmax = min(2 * kmax, KMAX_CAP)
    ratio = math.exp(log_ratio)
    scale = float(np.max(log_terms))
    total = float(np.sum(np.exp(log_terms - scale)))
    total += math.exp(log_terms[-1] - scale) * ratio / (1.0 - ratio)
    log_value = scale + math.log(total)
    value = math.exp(log_value) if log_value <= 700.0 else math.inf
    return TailSum(value, shape)


def ml_sum(x: float, delta: float, kmax: int = 400) -> MlSum:
    """Mittag-Leffler-type sum_{k>=0} x^k / Gamma((1+k) delta), with its bound.

    The cited bound is (4 e^2 / delta) exp(2 x^(1/delta)); the computed value
    is checked against it.
    """
    if delta <= 0:
        raise ValueError("exponent must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    import scipy.special as sp

    bound = (4.0 * math.e**2 / delta) * math.exp(2.0 * x ** (1.0 / delta))
    if x == 0.0:
        return MlSum(1.0 / gamma_fn(delta), bound)
    while True:
        ks = np.arange(0, kmax + 1, dtype=float)
        log_terms = ks * math.log(x) - sp.gammaln((1.0 + ks) * delta)
        log_ratio = log_terms[-1] - log_terms[-2]
        if log_ratio < math.log(0.5):
            break
        if kmax >= KMAX_CAP:
            raise ValueError(
                f"term ratio exp({log_ratio:.3g}) at kmax={kmax} has not "
                "fallen below 1/2; the argument x is too large"
            )
        kmax = min(2 * kmax, KMAX_CAP)
    ratio = math.exp(log_ratio)
    scale = float(np.max(log_terms))
    partial = math.exp(scale) * float(np.sum(np.exp(log_terms - scale)))
    value = partial + math.exp(log_terms[-1]) * ratio / (1.0 - ratio)
    if value > bound:
        raise AssertionError(
            f"computed sum {value:.6g} exceeds its proven bound {bound:.6g}"
        )
    return MlSum(value, bound)
