import json

import numpy as np
import pytest

from roughtaylor import (
    PiecewiseLinearPath,
    RoughLift,
    dyadic_interpolation,
    dyadic_times,
    estimate_garsia,
    fbm_covariance,
    holder_constant,
    lift_fbm,
    sample_fbm,
)


class TestCovariance:
    def test_diagonal(self):
        for t in (0.3, 1.0, 2.5):
            assert fbm_covariance(t, t, 0.4) == pytest.approx(t**0.8)

    def test_brownian_special_case(self):
        # H = 1/2 reduces to standard Brownian motion: R(s, t) = min(s, t)
        assert fbm_covariance(1.0, 2.0, 0.5) == pytest.approx(1.0)
        assert fbm_covariance(0.7, 0.3, 0.5) == pytest.approx(0.3)

    def test_zero_time(self):
        assert fbm_covariance(0.0, 1.7, 0.41) == 0.0

    def test_hurst_range(self):
        with pytest.raises(ValueError, match="Hurst"):
            fbm_covariance(1.0, 1.0, 1.2)


class TestSampling:
    def test_starts_at_zero(self):
        sample = sample_fbm(0.4, 1.0, 32, 3, seed=123)
        assert np.all(sample.values[0] == 0.0)

    def test_deterministic_per_seed(self):
        a = sample_fbm(0.42, 1.0, 64, 2, seed=9)
        b = sample_fbm(0.42, 1.0, 64, 2, seed=9)
        assert np.array_equal(a.values, b.values)

    def test_seeds_differ(self):
        a = sample_fbm(0.42, 1.0, 64, 2, seed=9)
        b = sample_fbm(0.42, 1.0, 64, 2, seed=10)
        assert not np.array_equal(a.values, b.values)

    def test_components_independent_quick(self):
        # cross-covariance between components should be near zero
        prods = [
            sample_fbm(0.4, 1.0, 8, 2, seed=s).values[-1].prod() for s in range(400)
        ]
        assert abs(np.mean(prods)) < 3.0 * np.std(prods) / np.sqrt(len(prods))

    def test_empirical_covariance_quick(self):
        n, n_mc = 8, 800
        i, j = 2, 6
        sample0 = sample_fbm(0.4, 1.0, n, 1, seed=0)
        ti, tj = sample0.grid[i], sample0.grid[j]
        prods = np.array(
            [
                sample_fbm(0.4, 1.0, n, 1, seed=s).values[i, 0]
                * sample_fbm(0.4, 1.0, n, 1, seed=s).values[j, 0]
                for s in range(n_mc)
            ]
        )
        target = fbm_covariance(ti, tj, 0.4)
        assert abs(np.mean(prods) - target) <= 3.0 * np.std(prods) / np.sqrt(n_mc)

    def test_cap_enforced(self):
        with pytest.raises(ValueError, match="cap"):
            sample_fbm(0.4, 1.0, 5000, 1, seed=0)

    def test_csv_with_sidecar(self, tmp_path):
        sample = sample_fbm(0.35, 1.0, 16, 1, seed=5)
        f = str(tmp_path / "fbm.csv")
        sample.to_csv(f)
        rows = open(f).read().strip().splitlines()
        assert len(rows) == 18  # header + 17 knots
        sidecar = json.load(open(f + ".json"))
        assert sidecar == {"hurst": 0.35, "T": 1.0, "n": 16, "d": 1, "seed": 5}


class TestDyadicInterpolation:
    def test_full_level_is_grid(self):
        sample = sample_fbm(0.4, 1.0, 16, 2, seed=1)
        path = dyadic_interpolation(sample, 4)
        assert np.array_equal(path.times, sample.grid)
        assert np.array_equal(path.values, sample.values)

    def test_knots_are_sample_values(self):
        sample = sample_fbm(0.4, 1.0, 16, 2, seed=1)
        path = dyadic_interpolation(sample, 2)
        assert np.array_equal(path.values, sample.values[::4])

    def test_midpoint_is_mean(self):
        sample = sample_fbm(0.4, 1.0, 16, 1, seed=2)
        path = dyadic_interpolation(sample, 2)
        mid = path.value_at(0.125)
        assert mid[0] == pytest.approx(0.5 * (path.values[0, 0] + path.values[1, 0]))

    def test_level_too_deep(self):
        sample = sample_fbm(0.4, 1.0, 16, 1, seed=2)
        with pytest.raises(ValueError, match="level"):
            dyadic_interpolation(sample, 5)


def polyline_levy_area(times, values):
    """Trapezoidal Levy-area oracle on the knots of a planar polyline."""
    rel = values - values[0]
    dx = np.diff(rel[:, 0])
    dy = np.diff(rel[:, 1])
    return 0.5 * float(np.sum(rel[:-1, 0] * dy - rel[:-1, 1] * dx))


class TestLift:
    def test_level1_is_increment(self):
        sample = sample_fbm(0.4, 1.0, 64, 2, seed=3)
        lift = lift_fbm(sample, 6, beta=0.35)
        s, t = 0.21, 0.83
        sig = lift.signature(s, t)
        expected = lift.path.value_at(t) - lift.path.value_at(s)
        assert np.allclose(sig.levels[1], expected, atol=1e-14)

    def test_geometric_symmetry(self):
        sample = sample_fbm(0.4, 1.0, 64, 2, seed=4)
        lift = lift_fbm(sample, 6)
        sig = lift.signature(0.0, 1.0)
        lvl2 = sig.levels[2].reshape(2, 2)
        lvl1 = sig.levels[1]
        assert np.max(np.abs(0.5 * (lvl2 + lvl2.T) - 0.5 * np.outer(lvl1, lvl1))) < 1e-12

    def test_levy_area_against_trapezoid_oracle(self):
        sample = sample_fbm(0.4, 1.0, 256, 2, seed=6)
        lift = lift_fbm(sample, 8)
        sig = lift.signature(0.0, 1.0)
        area = 0.5 * (sig.coeff((1, 2)) - sig.coeff((2, 1)))
        oracle = polyline_levy_area(lift.path.times, lift.path.values)
        assert area == pytest.approx(oracle, abs=1e-6)

    def test_holder_monotone_in_depth(self):
        sample = sample_fbm(0.4, 1.0, 256, 1, seed=7)
        lift = lift_fbm(sample, 8, beta=0.35)
        cs = [
            holder_constant(lift, dyadic_times(1.0, depth), 0.35)
            for depth in (3, 5, 7)
        ]
        assert cs[0] <= cs[1] <= cs[2]


class TestGarsia:
    def constant_lift(self):
        path = PiecewiseLinearPath(np.array([0.0, 1.0]), np.zeros((2, 2)))
        return RoughLift(path=path, degree=2, beta=0.35, hurst=0.4)

    def test_constant_path_vanishes(self):
        est = estimate_garsia(self.constant_lift(), beta=0.35, p=12.0, depth=4)
        assert est.u_gamma_p == 0.0
        assert est.v_gamma_p == 0.0
        assert est.c_beta_t == 0.0

    def test_integrability_threshold(self):
        with pytest.raises(ValueError, match="threshold"):
            estimate_garsia(self.constant_lift(), beta=0.35, p=9.0, depth=4)

    def test_beta_below_hurst(self):
        with pytest.raises(ValueError, match="beta"):
            estimate_garsia(self.constant_lift(), beta=0.45, p=20.0, depth=4)

    def test_requires_hurst(self):
        lift = RoughLift(
            PiecewiseLinearPath(np.array([0.0, 1.0]), np.zeros((2, 1))), 2
        )
        with pytest.raises(ValueError, match="Hurst"):
            estimate_garsia(lift, beta=0.35, p=12.0)

    def test_v_below_eta_squared(self):
        # Chen makes the simplex increment a product of level-1 increments
        for seed in range(5):
            sample = sample_fbm(0.4, 1.0, 64, 2, seed=seed)
            lift = lift_fbm(sample, 6, beta=0.35)
            est = estimate_garsia(lift, beta=0.35, p=12.0, depth=5)
            assert est.v_gamma_p <= est.eta**2 * (1 + 1e-12)

    def test_moments_bounded_over_seeds(self):
        xis = []
        for seed in range(100):
            sample = sample_fbm(0.4, 1.0, 64, 1, seed=seed)
            lift = lift_fbm(sample, 6, beta=0.35)
            est = estimate_garsia(lift, beta=0.35, p=12.0, depth=5)
            xis.append(est.xi)
        xis = np.array(xis)
        for q in (1, 2, 4):
            assert np.isfinite(np.mean(xis**q))
