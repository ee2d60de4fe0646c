"""Checks for the (nu, delta) pair and its audit."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import lindescent as ld
from lindescent.errors import FiberMismatchError
from lindescent.linearization import drop_k, zero_elem

S2 = ld.sphere(2)
LIN = ld.Linearization(S2)


def elem(m, x, covec, k=0.0):
    return ld.BundleElem(x, ld.CotangentVec(x, np.asarray(covec, dtype=float)), k)


class TestCutoff:
    def test_plateau_and_support(self):
        assert LIN.cutoff(0.0) == 1.0
        assert LIN.cutoff(LIN.cutoff_inner) == 1.0
        assert LIN.cutoff(LIN.cutoff_outer) == 0.0
        assert LIN.cutoff(10.0) == 0.0

    def test_monotone_nonincreasing(self):
        ts = np.linspace(0.0, math.pi, 400)
        vals = LIN.cutoff_many(ts)
        assert np.all(np.diff(vals) <= 1e-15)
        assert np.all((0.0 <= vals) & (vals <= 1.0))

    def test_smooth_across_edges(self):
        # high-order finite differences stay bounded at the glue points
        for edge in (LIN.cutoff_inner, LIN.cutoff_outer):
            h = 1e-3
            ts = edge + h * np.arange(-5, 6)
            vals = LIN.cutoff_many(ts)
            second = np.diff(vals, 2) / h**2
            assert np.all(np.abs(second) < 1e3)


class TestNu:
    def test_diagonal_is_zero_element(self):
        for seed in range(5):
            x = S2.random_point(seed)
            assert LIN.nu(x, x).is_zero()

    def test_quarter_circle_values(self):
        x, y = S2.point([0, 0, 1]), S2.point([1, 0, 0])
        e = LIN.nu(x, y)
        assert np.allclose(e.xi.covec, [math.pi / 2, 0, 0], atol=1e-12)
        assert e.k == pytest.approx(math.pi / 2, abs=1e-12)

    def test_antipode_keeps_scalar_slot(self):
        x = S2.point([0, 0, 1])
        e = LIN.nu(x, ld.Point(-x.coords))
        assert not np.any(e.xi.covec)
        assert e.k == pytest.approx(math.pi, abs=1e-12)
        assert not e.is_zero()

    def test_scalar_slot_is_geodesic_distance_exactly(self):
        pts = S2.random_points(40, 3)
        for x, y in zip(pts[::2], pts[1::2]):
            assert LIN.nu(x, y).k == S2.distance(x, y)

    def test_base_is_first_argument(self):
        pts = S2.random_points(10, 9)
        for x, y in zip(pts[::2], pts[1::2]):
            assert LIN.nu(x, y).base is x


class TestDelta:
    def test_zero_section_to_diagonal(self):
        x = S2.random_point(1)
        b, second = LIN.delta(zero_elem(x, 3))
        assert b is x and np.array_equal(second.coords, x.coords)

    def test_euclidean_saturation_k0(self):
        m = ld.euclidean(2)
        lin = ld.Linearization(m)
        o = m.point([0, 0])
        _, y = lin.delta(elem(m, o, [1.0, 0.0], 0.0))
        assert np.allclose(y.coords, [1 / math.sqrt(2), 0.0], atol=1e-15)

    def test_euclidean_saturation_k1(self):
        m = ld.euclidean(2)
        lin = ld.Linearization(m)
        o = m.point([0, 0])
        _, y = lin.delta(elem(m, o, [1.0, 0.0], 1.0))
        assert np.allclose(y.coords, [1 / math.sqrt(5), 0.0], atol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(
        seed=st.integers(0, 2**31 - 1),
        scale=st.floats(0.0, 50.0),
        k=st.floats(0.0, 20.0),
    )
    def test_argument_stays_inside_radius(self, seed, scale, k):
        # saturation: r |v| / sqrt(1 + (1+k)^2 |v|^2) < r for k >= 0
        rng = np.random.default_rng(seed)
        x = S2.random_point(seed)
        v = S2.tangent_project(x, rng.standard_normal(3)) * scale
        e = elem(S2, x, v, k)
        vv = float(v @ v)
        arg = S2.r * math.sqrt(vv) / math.sqrt(1.0 + (1.0 + k) ** 2 * vv)
        assert arg < S2.r
        _, y = LIN.delta(e)
        assert S2.constraint_residual(y.coords[None]) <= 1e-12

    def test_first_component_is_base(self):
        x = S2.random_point(5)
        e = elem(S2, x, [0.3, 0.0, 0.0], 2.0)
        assert LIN.delta(e)[0] is x


class TestPairing:
    def test_vanishes_at_base(self):
        x = S2.random_point(2)
        xi = ld.CotangentVec(x, S2.tangent_project(x, np.array([1.0, 2.0, 3.0])))
        assert LIN.pairing_k(xi, x) == 0.0

    def test_quarter_circle_value(self):
        x = S2.point([0, 0, 1])
        xi = ld.CotangentVec(x, np.array([1.0, 0.0, 0.0]))
        assert LIN.pairing_k(xi, S2.point([1, 0, 0])) == pytest.approx(
            math.pi / 2, abs=1e-12
        )

    def test_derivative_is_pairing_with_xi(self):
        # d/dy k(xi, y) at y = x acts like <., xi> on tangent directions
        rng = np.random.default_rng(8)
        h = 1e-5
        for seed in range(5):
            x = S2.random_point(seed + 40)
            direction = S2.tangent_project(x, rng.standard_normal(3))
            xi = ld.CotangentVec(x, direction / np.linalg.norm(direction))
            for ei in S2.tangent_frame(x):
                yp = S2.exp(x, ld.TangentVec(x, h * ei))
                ym = S2.exp(x, ld.TangentVec(x, -h * ei))
                fd = (LIN.pairing_k(xi, yp) - LIN.pairing_k(xi, ym)) / (2 * h)
                assert fd == pytest.approx(float(ei @ xi.covec), abs=1e-6)


class TestBundleArithmetic:
    def test_fiberwise_subtraction(self):
        x = S2.random_point(3)
        u = elem(S2, x, [0.1, 0.0, 0.0], 2.0)
        v = elem(S2, x, [0.0, 0.0, 0.0], 0.5)
        w = u - v
        assert w.k == 1.5 and np.allclose(w.xi.covec, [0.1, 0, 0])

    def test_cross_fiber_subtraction_rejected(self):
        x, y = S2.point([0, 0, 1]), S2.point([1, 0, 0])
        u = elem(S2, x, [0.1, 0.0, 0.0])
        v = elem(S2, y, [0.0, 0.1, 0.0])
        with pytest.raises(FiberMismatchError):
            u - v

    def test_scaling_scales_both_slots(self):
        x = S2.random_point(4)
        e = 2.0 * elem(S2, x, [0.5, 0.0, 0.0], 3.0)
        assert e.k == 6.0 and np.allclose(e.xi.covec, [1.0, 0, 0])


class TestDerivativeIdentity:
    @pytest.mark.parametrize(
        "m", [ld.sphere(2), ld.torus(2), ld.euclidean(3)], ids=["S2", "T2", "E3"]
    )
    def test_residual_small_across_steps(self, m):
        # |(1/r) nu(x, delta(h e).1).xi - h e.xi| / h stays <= 1e-4
        lin = ld.Linearization(m)
        rng = np.random.default_rng(6)
        for h in (1e-6, 1e-5, 1e-4):
            for seed in range(10):
                x = m.random_point(seed + 100)
                v = m.tangent_project(x, rng.standard_normal(m.ambient_dim))
                v /= np.linalg.norm(v)
                e = ld.BundleElem(x, ld.CotangentVec(x, v), 0.0)
                _, y = lin.delta(h * e)
                resid = np.linalg.norm(lin.nu(x, y).xi.covec / m.r - h * v) / h
                assert resid <= 1e-4

    def test_euclidean_rate_is_second_order(self):
        # exact arithmetic case: residual/h = (1 - 1/sqrt(1+h^2)) ~ h^2/2
        m = ld.euclidean(3)
        lin = ld.Linearization(m)
        x = m.point([0.0, 0.0, 0.0])
        v = np.array([1.0, 0.0, 0.0])
        resids = []
        for h in (1e-3, 1e-4, 1e-5):
            e = ld.BundleElem(x, ld.CotangentVec(x, v), 0.0)
            _, y = lin.delta(h * e)
            resids.append(np.linalg.norm(lin.nu(x, y).xi.covec / m.r - h * v) / h)
        assert resids[0] == pytest.approx(0.5e-6, rel=1e-2)
        assert resids[1] / resids[0] == pytest.approx(1e-2, rel=0.1)


class TestAudit:
    @pytest.mark.parametrize(
        "m", [ld.sphere(2), ld.torus(2), ld.euclidean(3)], ids=["S2", "T2", "E3"]
    )
    def test_builtin_linearization_passes(self, m):
        report = ld.check_linearization(ld.Linearization(m), samples=100, seed=0)
        assert report.passed, report.to_text()

    def test_dropped_scalar_slot_fails_vanishing(self):
        report = ld.check_linearization(drop_k(LIN), samples=20, seed=0)
        assert not report.item("vanish_iff_equal").passed
        assert not report.passed

    def test_zero_samples_rejected(self):
        with pytest.raises(ValueError):
            ld.check_linearization(LIN, samples=0, seed=0)
