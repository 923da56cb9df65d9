"""High-accuracy ODE integration along piecewise-linear drivers.

On each linear segment the rough equation dX = sum_i V_i(X) dy^i reduces to
the ODE dX/dt = sum_i V_i(X) slope_i, so an adaptive embedded Runge-Kutta
pair solved segment by segment (knots are mandatory step boundaries) is the
constructive oracle for X_t.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .path_signature import PiecewiseLinearPath, path_signature
from .taylor_solver import taylor_term
from .vector_fields import PolyVectorField, taylor_coefficients

__all__ = ["Trajectory", "BlowUpError", "solve", "picard_expansion_check"]

TOL_MIN, TOL_MAX = 1e-13, 1e-6


class BlowUpError(RuntimeError):
    """Step-size underflow: the trajectory escaped before t_end."""

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), n)
    driver_level: int | None
    tol: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"x{j + 1}" for j in range(self.states.shape[1])])
            for t, row in zip(self.times, self.states):
                writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])


def solve(
    fields: PolyVectorField,
    x0,
    driver: PiecewiseLinearPath,
    t_end: float,
    tol: float = 1e-10,
    driver_level: int | None = None,
) -> Trajectory:
    """Integrate dX = sum_i V_i(X) dy^i along the driver up to t_end.

    Uses the DOP853 embedded pair with rtol = atol = tol, restarted at every
    driver knot so the slope is constant within each solver call.  Blow-up
    (polynomial fields are not globally bounded) raises BlowUpError with the
    last completed time.
    """
    if not TOL_MIN <= tol <= TOL_MAX:
        raise ValueError(f"tol must lie in [{TOL_MIN}, {TOL_MAX}], got {tol}")
    if fields.d != driver.dim:
        raise ValueError("driver dimension must match number of fields")
    if not driver.t_start <= t_end <= driver.t_end + 1e-12:
        raise ValueError("t_end outside driver domain")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if len(x) != fields.n:
        raise ValueError("x0 dimension must match state dimension")
    cut_times = driver.times[(driver.times > driver.t_start) & (driver.times < t_end)]
    bounds = np.concatenate(([driver.t_start], cut_times, [t_end]))
    knot_values = driver.value_at(bounds)
    times = [bounds[0]]
    states = [x.copy()]
    for (ta, tb), (ya, yb) in zip(
        zip(bounds[:-1], bounds[1:]), zip(knot_values[:-1], knot_values[1:])
    ):
        if tb <= ta:
            continue
        slope = (yb - ya) / (tb - ta)

        def rhs(_t, state):
            return fields.eval_fields(state).T @ slope

        sol = solve_ivp(
            rhs, (ta, tb), states[-1], method="DOP853", rtol=tol, atol=tol
        )
        if not sol.success:
            raise BlowUpError(
                f"integration failed in [{ta:g}, {tb:g}]: {sol.message}",
                last_time=float(sol.t[-1]),
            )
        times.append(tb)
        states.append(sol.y[:, -1])
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        driver_level=driver_level,
        tol=tol,
    )


def _iterated_integrals_quadrature(
    driver: PiecewiseLinearPath, t_end: float, max_len: int, num_points: int
) -> dict[tuple[int, ...], float]:
    """Simplex iterated integrals by trapezoidal cumulative quadrature.

    Independent of the Chen-concatenation signature: each word extends on
    the right, I_{w+(i)}(t) = int_0^t I_w(s) dy^i(s), discretized on a fine
    uniform grid that also contains the driver knots.
    """
    grid = np.union1d(
        np.linspace(driver.t_start, t_end, num_points),
        driver.times[(driver.times >= driver.t_start) & (driver.times <= t_end)],
    )
    values = driver.value_at(grid)
    dy = np.diff(values, axis=0)  # (m-1, d)
    d = driver.dim
    cumulative: dict[tuple[int, ...], np.ndarray] = {
        (): np.ones(len(grid))
    }
    results: dict[tuple[int, ...], float] = {}
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for word in frontier:
            base = cumulative[word]
            mid = 0.5 * (base[:-1] + base[1:])
            for i in range(1, d + 1):
                new_word = word + (i,)
                integral = np.concatenate(([0.0], np.cumsum(mid * dy[:, i - 1])))
                cumulative[new_word] = integral
                results[new_word] = float(integral[-1])
                nxt.append(new_word)
        frontier = nxt
    return results


def picard_expansion_check(
    fields: PolyVectorField,
    x0,
    driver: PiecewiseLinearPath,
    max_len: int,
    num_points: int = 20001,
) -> np.ndarray:
    """Per-level discrepancy between two routes to the expansion terms.

    Route one: quadrature iterated integrals contracted against the
    coefficient table.  Route two: taylor_term on the exact signature.
    Their agreement pins the word-to-operator order convention.
    """
    if fields.d > 2 or fields.n > 2 or max_len > 4:
        raise ValueError("check is desk-scale only: n, d <= 2 and N <= 4")
    table = taylor_coefficients(fields, x0, max_len)
    quad = _iterated_integrals_quadrature(
        driver, driver.t_end, max_len, num_points
    )
    sig = path_signature(driver, driver.t_start, driver.t_end, max_len)
    discrepancies = np.zeros(max_len)
    for k in range(1, max_len + 1):
        g_quad = np.zeros(fields.n)
        for word, vec in table.coeffs.items():
            if len(word) == k:
                g_quad += vec * quad[word]
        g_sig = taylor_term(table, sig, k)
        discrepancies[k - 1] = float(np.max(np.abs(g_quad - g_sig)))
    return discrepancies
