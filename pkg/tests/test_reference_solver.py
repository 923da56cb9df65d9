import math

import numpy as np
import pytest
from scipy.linalg import expm

from roughtaylor import (
    BlowUpError,
    MultiPoly,
    PiecewiseLinearPath,
    PolyVectorField,
    picard_expansion_check,
    solve,
)


def line_path(v, t_end=1.0):
    v = np.atleast_1d(np.asarray(v, float))
    return PiecewiseLinearPath(
        np.array([0.0, t_end]), np.stack([np.zeros(len(v)), v])
    )


class TestSolve:
    def test_zero_field_is_constant(self):
        fields = PolyVectorField.from_linear([np.zeros((2, 2))])
        traj = solve(fields, [1.0, -2.0], line_path([1.0]), 1.0)
        assert np.array_equal(traj.final_state, [1.0, -2.0])

    def test_scalar_exponential(self):
        fields = PolyVectorField.from_linear([np.array([[1.0]])])
        traj = solve(fields, [1.0], line_path([0.5]), 1.0, tol=1e-12)
        assert traj.final_state[0] == pytest.approx(math.exp(0.5), abs=1e-11)

    def test_matrix_exponential_multisegment(self):
        a = np.array([[0.0, 1.0], [-1.0, 0.0]])
        fields = PolyVectorField.from_linear([a])
        # zig-zag driver with net increment 0.7
        path = PiecewiseLinearPath(
            np.array([0.0, 0.3, 0.6, 1.0]),
            np.array([[0.0], [0.5], [0.2], [0.7]]),
        )
        x0 = np.array([1.0, 2.0])
        traj = solve(fields, x0, path, 1.0, tol=1e-12)
        assert np.allclose(traj.final_state, expm(0.7 * a) @ x0, atol=1e-10)

    def test_knots_recorded(self):
        fields = PolyVectorField.from_linear([np.array([[1.0]])])
        path = PiecewiseLinearPath(
            np.array([0.0, 0.25, 1.0]), np.array([[0.0], [0.3], [0.5]])
        )
        traj = solve(fields, [1.0], path, 1.0)
        assert np.allclose(traj.times, [0.0, 0.25, 1.0])

    def test_accuracy_improves_with_tol(self):
        fields = PolyVectorField.from_linear([np.array([[1.0]])])
        errs = [
            abs(
                solve(fields, [1.0], line_path([1.0]), 1.0, tol=tol).final_state[0]
                - math.e
            )
            for tol in (1e-6, 1e-9, 1e-12)
        ]
        assert errs[2] < errs[0]
        assert errs[2] < 1e-10

    def test_tol_range_enforced(self):
        fields = PolyVectorField.from_linear([np.eye(1)])
        for tol in (1e-14, 1e-3):
            with pytest.raises(ValueError, match="tol"):
                solve(fields, [1.0], line_path([1.0]), 1.0, tol=tol)

    def test_blow_up_detected(self):
        # dX = X^2 dy with a steep driver: X_t = x0 / (1 - x0 y_t) escapes
        # once y_t reaches 1/x0
        sq = MultiPoly(1, {(2,): 1.0})
        fields = PolyVectorField(d=1, n=1, components=[[sq]])
        with pytest.raises(BlowUpError) as err:
            solve(fields, [1.0], line_path([10.0]), 1.0, tol=1e-10)
        assert 0.0 < err.value.last_time < 1.0

    def test_domain_checks(self):
        fields = PolyVectorField.from_linear([np.eye(1)])
        with pytest.raises(ValueError, match="domain"):
            solve(fields, [1.0], line_path([1.0]), 2.0)
        with pytest.raises(ValueError, match="x0"):
            solve(fields, [1.0, 2.0], line_path([1.0]), 1.0)

    def test_csv(self, tmp_path):
        fields = PolyVectorField.from_linear([np.eye(1)])
        traj = solve(fields, [1.0], line_path([0.2]), 1.0)
        f = str(tmp_path / "traj.csv")
        traj.to_csv(f)
        rows = open(f).read().strip().splitlines()
        assert rows[0] == "t,x1"
        assert len(rows) == len(traj.times) + 1


class TestPicardExpansionCheck:
    def test_linear_commuting(self):
        fields = PolyVectorField.from_linear([np.array([[1.0]])])
        disc = picard_expansion_check(fields, [1.0], line_path([1.0]), 4)
        assert np.all(disc < 1e-6)

    def test_noncommuting_pair(self):
        fields = PolyVectorField(
            d=2,
            n=1,
            components=[[MultiPoly.constant(1, 1.0)], [MultiPoly.variable(1, 0)]],
        )
        path = PiecewiseLinearPath(
            np.array([0.0, 1.0, 2.0]), np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        )
        disc = picard_expansion_check(fields, [0.0], path, 3)
        assert np.all(disc < 1e-6)

    def test_scale_guard(self):
        fields = PolyVectorField.from_linear([np.eye(3)])
        with pytest.raises(ValueError, match="desk-scale"):
            picard_expansion_check(fields, np.zeros(3), line_path([1.0, 0.0, 0.0]), 2)
