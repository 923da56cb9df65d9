"""Taylor expansions for differential equations driven by Holder rough paths.

Subpackages cover the truncated tensor algebra, exact signatures of
piecewise-linear paths, fractional Brownian motion drivers with verified
rough lifts, polynomial vector fields and their Taylor coefficient tables,
the explicit factorial-decay error bounds, a reference ODE solver, and a
configuration-driven experiment harness.
"""

from .bounds import (
    BoundParams,
    alpha_const,
    gamma_fn,
    k_const,
    level_bound,
    ml_sum,
    tail_sum,
    zeta,
)
from .fbm import (
    FbmSample,
    GarsiaEstimate,
    dyadic_interpolation,
    estimate_garsia,
    fbm_covariance,
    lift_fbm,
    sample_fbm,
)
from .path_signature import (
    PiecewiseLinearPath,
    RoughLift,
    dyadic_times,
    holder_constant,
    p_variation_distance,
    path_signature,
    segment_signature,
)
from .reference_solver import BlowUpError, Trajectory, picard_expansion_check, solve
from .taylor_solver import (
    TaylorEvaluation,
    bound_truncation,
    stopping_time,
    taylor_evaluate,
    taylor_term,
)
from .tensor_algebra import (
    TruncatedTensor,
    Word,
    group_inverse,
    tensor_mul,
    tensor_norm,
)
from .vector_fields import (
    MultiPoly,
    PolyVectorField,
    TaylorTable,
    apply_field,
    fit_growth,
    taylor_coefficients,
)

__version__ = "0.1.0"
