"""Taylor expansion of a linear rough equation driven by sampled fBm.

Solves dX = A X dy along a dyadic interpolation of a fractional Brownian
sample and compares Taylor partial sums against a high-accuracy ODE solve.

Run:  python3 demos/fbm_taylor_demo.py
"""

import numpy as np

from roughtaylor import (
    PolyVectorField,
    dyadic_interpolation,
    sample_fbm,
    solve,
    taylor_coefficients,
    taylor_evaluate,
)

hurst, n, seed = 0.4, 256, 7
sample = sample_fbm(hurst, 1.0, n, d=2, seed=seed)
driver = dyadic_interpolation(sample, 8)
print(f"fBm sample: H={hurst}, {n} dyadic steps, seed={seed}")

# small rotating + scaling pair of linear fields
a1 = 0.3 * np.array([[0.0, 1.0], [-1.0, 0.0]])
a2 = 0.3 * np.array([[1.0, 0.0], [0.0, -1.0]])
fields = PolyVectorField.from_linear([a1, a2])
x0 = np.array([1.0, 0.5])

table = taylor_coefficients(fields, x0, max_len=10)
reference = solve(fields, x0, driver, 1.0, tol=1e-12).final_state
evaluation = taylor_evaluate(table, driver, 1.0, degree=10)

print("reference state:", reference)
print(f"{'N':>3} {'partial sum error':>20} {'term norm':>14}")
for n_level in range(1, 11):
    err = float(np.linalg.norm(evaluation.partial_sums[n_level] - reference))
    print(f"{n_level:>3} {err:>20.3e} {evaluation.term_norms[n_level - 1]:>14.3e}")
