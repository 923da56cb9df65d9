"""Factorial-decay bounds and the quantitative stopping time.

Checks measured signature level norms of an fBm lift against the explicit
bound (K T)^(k beta) / (alpha Gamma(k beta)), then computes the stopping
time of a linear benchmark and compares it with the analytic threshold.

Run:  python3 demos/bounds_demo.py
"""

import math

import numpy as np

from roughtaylor import (
    BoundParams,
    PiecewiseLinearPath,
    PolyVectorField,
    RoughLift,
    dyadic_times,
    fit_growth,
    holder_constant,
    level_bound,
    lift_fbm,
    path_signature,
    sample_fbm,
    stopping_time,
    taylor_coefficients,
)

beta = 0.35
sample = sample_fbm(0.4, 1.0, 1024, d=2, seed=11)
lift = lift_fbm(sample, 10, beta=beta)
holder_c = holder_constant(lift, dyadic_times(1.0, 8), beta)
params = BoundParams.create(beta, beta / 2, holder_c, 1.0, 1.0)
sig = path_signature(lift.path, 0.0, 1.0, 6)

print(f"Holder constant C = {holder_c:.4f}, K = {params.k:.4f}")
print(f"{'k':>2} {'measured ||y^k||':>18} {'level bound':>14}")
for k in range(1, 7):
    measured = float(np.abs(sig.levels[k]).sum())
    print(f"{k:>2} {measured:>18.4e} {level_bound(k, params):>14.4e}")

# stopping time of dX = X dy along a slow ramp, against the closed form
a, x0, slope, r = 1.0, 1.0, 0.002, 2.0
fields = PolyVectorField.from_linear([np.array([[a]])])
table = taylor_coefficients(fields, [x0], 30)
fit_growth(table, [0.1])
driver = PiecewiseLinearPath(np.array([0.0, 1.0]), np.array([[0.0], [slope]]))
ramp = RoughLift(driver, 2, beta=0.4)
ramp.holder_const = holder_constant(ramp, dyadic_times(1.0, 8), 0.4)

dy_star = 0.001
c_radius = 2.0 * (math.exp(r * a * dy_star) - 1.0) * x0
computed = stopping_time(table, ramp, r=r, c_radius=c_radius)
analytic = math.log(1.0 + c_radius / (2.0 * x0)) / (r * a * slope)
print(f"\nstopping time: computed {computed:.6f}, analytic {analytic:.6f}")
