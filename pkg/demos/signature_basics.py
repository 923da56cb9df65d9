"""Signatures of piecewise-linear paths: levels, Chen identity, Levy area.

Run:  python3 demos/signature_basics.py
"""

import numpy as np

from roughtaylor import PiecewiseLinearPath, path_signature, tensor_mul, tensor_norm

# a planar "L": one unit step along e1, then one unit step along e2
path = PiecewiseLinearPath(
    np.array([0.0, 1.0, 2.0]),
    np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]),
)

sig = path_signature(path, 0.0, 2.0, degree=3)
print("level norms:", [float(np.abs(b).sum()) for b in sig.levels])
print("y^(1,2) =", sig.coeff((1, 2)), " y^(2,1) =", sig.coeff((2, 1)))
area = 0.5 * (sig.coeff((1, 2)) - sig.coeff((2, 1)))
print("Levy area =", area, "(half the unit square, as the picture suggests)")

# Chen: the signature over [0, 2] is the product of the halves
left = path_signature(path, 0.0, 1.0, 3)
right = path_signature(path, 1.0, 2.0, 3)
product = tensor_mul(left, right)
disc = max(
    float(np.max(np.abs(a - b))) for a, b in zip(product.levels, sig.levels)
)
print("Chen identity discrepancy:", disc)
print("total tensor norm:", tensor_norm(sig).total)
