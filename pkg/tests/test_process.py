import math

import numpy as np
import pytest

from stablekern import (
    NOISE_ALGORITHM,
    SS1,
    WIENER,
    KernelSpec,
    PathSet,
    WhiteNoiseSource,
    audit_constraints,
    errors,
    gram,
    make_grid,
    sample_ss1,
    sample_wiener,
    stable_time_transform,
)

LN2 = math.log(2.0)
GRID = make_grid([0.5, 1.0, 2.0, 3.5])


def empirical_cov(paths):
    return paths.T @ paths / paths.shape[0]


def cov_tolerance(target, p, z=5.0):
    d = np.diag(target)
    return z * np.sqrt((np.outer(d, d) + target**2) / p)


class TestWhiteNoiseSource:
    def test_reproducible(self):
        a = WhiteNoiseSource(seed=11).draw((3, 4))
        b = WhiteNoiseSource(seed=11).draw((3, 4))
        assert np.array_equal(a, b)

    def test_seed_matters(self):
        a = WhiteNoiseSource(seed=1).draw(1000)
        b = WhiteNoiseSource(seed=2).draw(1000)
        assert not np.array_equal(a, b)

    def test_variance_scaling(self):
        a = WhiteNoiseSource(seed=5, variance=1.0).draw(100)
        b = WhiteNoiseSource(seed=5, variance=4.0).draw(100)
        np.testing.assert_allclose(b, 2.0 * a, rtol=1e-15)

    def test_moments(self):
        x = WhiteNoiseSource(seed=0, variance=2.5).draw(200_000)
        assert abs(x.mean()) < 5 * math.sqrt(2.5 / x.size)
        assert abs(x.var() - 2.5) < 5 * 2.5 * math.sqrt(2.0 / x.size)

    def test_bad_variance(self):
        for v in (0.0, -1.0, float("nan"), float("inf")):
            with pytest.raises(errors.InvalidParameter):
                WhiteNoiseSource(seed=0, variance=v)

    def test_algorithm_id(self):
        assert NOISE_ALGORITHM == "pcg64-inverse-cdf"


class TestPathSet:
    def test_shape_check(self):
        with pytest.raises(errors.DimensionMismatch):
            PathSet(grid=GRID, paths=np.zeros((3, GRID.n + 1)))
        with pytest.raises(errors.DimensionMismatch):
            PathSet(grid=GRID, paths=np.zeros(GRID.n))

    def test_p_property(self):
        ps = PathSet(grid=GRID, paths=np.zeros((7, GRID.n)))
        assert ps.p == 7
        assert "p=7" in repr(ps)


class TestSamplers:
    def test_wiener_deterministic(self):
        a = sample_wiener(GRID, c=1.5, seed=42, p=8)
        b = sample_wiener(GRID, c=1.5, seed=42, p=8)
        assert np.array_equal(a.paths, b.paths)
        assert a.paths.shape == (8, GRID.n)

    def test_ss1_deterministic(self):
        a = sample_ss1(GRID, c=1.5, beta=0.7, seed=42, p=8)
        b = sample_ss1(GRID, c=1.5, beta=0.7, seed=42, p=8)
        assert np.array_equal(a.paths, b.paths)

    def test_argument_validation(self):
        with pytest.raises(errors.InvalidParameter):
            sample_wiener(GRID, c=0.0, seed=0, p=10)
        with pytest.raises(errors.InvalidParameter):
            sample_wiener(GRID, c=1.0, seed=0, p=0)
        with pytest.raises(errors.InvalidParameter):
            sample_ss1(GRID, c=1.0, beta=float("nan"), seed=0, p=10)

    def test_wiener_covariance(self):
        p = 40_000
        spec = KernelSpec(family=WIENER, c=2.0)
        target = gram(spec, GRID).values
        ps = sample_wiener(GRID, c=2.0, seed=101, p=p)
        emp = empirical_cov(ps.paths)
        assert np.all(np.abs(emp - target) <= cov_tolerance(target, p))

    def test_ss1_covariance(self):
        p = 40_000
        spec = KernelSpec(family=SS1, c=2.0, beta=0.7)
        target = gram(spec, GRID).values
        ps = sample_ss1(GRID, c=2.0, beta=0.7, seed=102, p=p)
        emp = empirical_cov(ps.paths)
        assert np.all(np.abs(emp - target) <= cov_tolerance(target, p))


class TestTimeTransform:
    def test_transformed_grid_values(self):
        tf = stable_time_transform(make_grid([1.0, 2.0, 3.0]), beta=LN2)
        np.testing.assert_allclose(tf.tau.times, [0.125, 0.25, 0.5], rtol=1e-15)
        np.testing.assert_array_equal(tf.reversal, [2, 1, 0])

    def test_reversed_wiener_matches_ss1_law(self):
        p = 40_000
        beta = 0.7
        spec = KernelSpec(family=SS1, c=2.0, beta=beta)
        target = gram(spec, GRID).values
        tf = stable_time_transform(GRID, beta=beta)
        on_tau = sample_wiener(tf.tau, c=2.0, seed=103, p=p)
        ps = tf.reverse_paths(on_tau)
        assert ps.grid == GRID
        emp = empirical_cov(ps.paths)
        assert np.all(np.abs(emp - target) <= cov_tolerance(target, p))

    def test_reverse_rejects_foreign_paths(self):
        tf = stable_time_transform(GRID, beta=0.7)
        direct = sample_ss1(GRID, c=1.0, beta=0.7, seed=0, p=5)
        with pytest.raises(errors.DimensionMismatch):
            tf.reverse_paths(direct)

    def test_bad_beta(self):
        with pytest.raises(errors.InvalidParameter):
            stable_time_transform(GRID, beta=0.0)
        with pytest.raises(errors.InvalidParameter):
            stable_time_transform(GRID, beta=-1.0)

    def test_underflowing_transform(self):
        with pytest.raises(errors.InvalidParameter):
            stable_time_transform(make_grid([1.0, 2.0]), beta=1000.0)


class TestAudit:
    def test_matched_wiener_passes(self):
        spec = KernelSpec(family=WIENER, c=1.5)
        ps = sample_wiener(GRID, c=1.5, seed=7, p=5000)
        report = audit_constraints(ps, spec)
        assert report.ok
        assert report.max_abs_z < 5.0
        assert report.family == WIENER
        assert report.n_paths == 5000
        assert len(report.checks) == GRID.n

    def test_matched_ss1_passes(self):
        spec = KernelSpec(family=SS1, c=1.5, beta=0.7)
        ps = sample_ss1(GRID, c=1.5, beta=0.7, seed=8, p=5000)
        report = audit_constraints(ps, spec)
        assert report.ok

    def test_wrong_scale_is_flagged(self):
        ps = sample_wiener(GRID, c=1.0, seed=9, p=5000)
        report = audit_constraints(ps, KernelSpec(family=WIENER, c=4.0))
        assert not report.ok
        assert report.max_abs_z > 20.0
        assert any(c.flagged for c in report.checks)

    def test_wrong_family_is_flagged(self):
        ps = sample_wiener(GRID, c=1.0, seed=10, p=5000)
        report = audit_constraints(ps, KernelSpec(family=SS1, c=1.0, beta=0.7))
        assert not report.ok

    def test_too_few_paths(self):
        ps = sample_wiener(GRID, c=1.0, seed=0, p=99)
        with pytest.raises(errors.TooFewPaths):
            audit_constraints(ps, KernelSpec(family=WIENER, c=1.0))

    def test_report_to_dict(self):
        ps = sample_wiener(GRID, c=1.0, seed=0, p=200)
        d = audit_constraints(ps, KernelSpec(family=WIENER, c=1.0)).to_dict()
        assert set(d) == {"family", "n_paths", "checks", "max_abs_z", "ok"}
        assert d["checks"][0]["index"] == 1
        assert isinstance(d["ok"], bool)
