"""Limit clustering and convexity probes on traces."""

import numpy as np
import pytest

import lindescent as ld
from lindescent.adherence import cluster_limits, convexity_audit

E1 = ld.euclidean(1, r=10.0)
S2 = ld.sphere(2)


def synthetic_trace(points, values):
    pts = [E1.point([p]) for p in points]
    return ld.DescentTrace(
        iterates=pts,
        values=list(values),
        steps=[0.0] * (len(pts) - 1),
        displacements=[0.0] * (len(pts) - 1),
        stop=ld.StopReason.MAX_ITERATIONS,
    )


class TestClusterLimits:
    def test_converged_trace_single_cluster_zero_spread(self):
        trace = synthetic_trace([1.0, 0.5, 0.2, 0.2, 0.2, 0.2], [1, 0.5, 0.2, 0.2, 0.2, 0.2])
        report = cluster_limits(trace, radius=0.05)
        assert len(report.clusters) == 1
        assert report.clusters[0].f_spread == 0.0
        assert report.passed

    def test_two_point_orbit_equal_values_passes(self):
        pts = [0.0, 5.0] * 8
        vals = [2.0, 2.0] * 8
        report = cluster_limits(synthetic_trace(pts, vals), radius=0.1)
        assert len(report.clusters) == 2
        assert report.passed

    def test_unequal_values_flagged(self):
        pts = [0.0, 0.0 + 1e-9] * 8
        vals = [2.0, 3.0] * 8
        report = cluster_limits(synthetic_trace(pts, vals), radius=0.1)
        assert len(report.clusters) == 1
        assert report.clusters[0].f_spread == pytest.approx(1.0)
        assert not report.passed

    def test_tail_only(self):
        # early wandering must not leak into the clusters
        pts = [float(i) for i in range(12)] + [100.0] * 4
        vals = [float(-i) for i in range(16)]
        report = cluster_limits(synthetic_trace(pts, vals), radius=0.5)
        assert len(report.clusters) == 1
        assert all(i >= 12 for i in report.clusters[0].indices)

    def test_min_cluster_value_not_above_start(self):
        trace = synthetic_trace([3.0, 1.0, 0.5, 0.5], [9.0, 1.0, 0.25, 0.25])
        report = cluster_limits(trace, radius=0.1)
        assert report.min_cluster_f <= report.start_f

    def test_empty_trace_rejected(self):
        trace = ld.DescentTrace([], [], [], [], ld.StopReason.MAX_ITERATIONS)
        with pytest.raises(ValueError):
            cluster_limits(trace, radius=0.1)

    def test_bad_radius_rejected(self):
        with pytest.raises(ValueError):
            cluster_limits(synthetic_trace([0.0], [0.0]), radius=0.0)


def probe_1d(fn, lo=-1.0, hi=1.0, samples=150, seed=0):
    return ld.ConvexProbe(
        param=lambda c: E1.point([float(fn(c[0]))]),
        lower=np.array([lo]),
        upper=np.array([hi]),
        samples=samples,
        seed=seed,
    )


class TestConvexityAudit:
    def test_square_is_strictly_convex(self):
        F = ld.Functional(E1, lambda x: float(x.coords[0] ** 2))
        probe = probe_1d(lambda c: c)
        report = convexity_audit(probe, F)
        assert report.extras["verdict"] == "strictly-convex"

    def test_negative_square_is_non_convex(self):
        F = ld.Functional(E1, lambda x: -float(x.coords[0] ** 2))
        probe = probe_1d(lambda c: c)
        report = convexity_audit(probe, F)
        assert report.extras["verdict"] == "non-convex"
        assert not report.item("convexity_inequality").passed

    def test_affine_is_convex_but_not_strict(self):
        F = ld.Functional(E1, lambda x: 3.0 * float(x.coords[0]) + 1.0)
        probe = probe_1d(lambda c: c)
        report = convexity_audit(probe, F)
        assert report.extras["verdict"] == "convex"

    def test_sphere_exp_chart_cosine_unique_limit(self):
        # F(x) = 1 - <x,p> through the exponential chart around p is
        # strictly convex on a half-ball; the descent tail must collapse
        pole = S2.point([0.0, 0.0, 1.0])
        frame = S2.tangent_frame(pole)

        def param(c):
            vec = c[0] * frame[0] + c[1] * frame[1]
            return S2.exp(pole, ld.TangentVec(pole, vec))

        probe = ld.ConvexProbe(
            param=param,
            lower=np.array([-0.6, -0.6]),
            upper=np.array([0.6, 0.6]),
            samples=200,
            seed=1,
        )
        F = ld.sphere_cosine(S2, pole)
        lin = ld.Linearization(S2)
        w = ld.random_witnesses(S2, 32, 0)
        x0 = param(np.array([0.5, -0.4]))
        trace = ld.run_descent(lin, F, x0, ld.DescentConfig(n_max=100), w)
        report = convexity_audit(probe, F, trace=trace, cluster_radius=1e-3)
        assert report.extras["verdict"] == "strictly-convex"
        assert report.item("unique_limit").passed
        assert report.item("parameter_injective").passed

    def test_zero_samples_rejected(self):
        F = ld.Functional(E1, lambda x: 0.0)
        with pytest.raises(ValueError):
            convexity_audit(probe_1d(lambda c: c, samples=0), F)
