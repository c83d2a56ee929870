import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folding_assembly.estimator import (
    ContactEstimate,
    WrenchFilter,
    estimate_contact,
    estimate_r2,
    estimate_theta,
    filter_step,
)
from folding_assembly.spatial_math import Pose, Wrench

from conftest import cross_oracle

EZ = np.array([0.0, 0.0, 1.0])


def W(f, tau=(0, 0, 0)):
    return Wrench(np.array(f, float), np.array(tau, float))


class TestWrenchFilter:
    def test_constant_input(self):
        filt = WrenchFilter()
        w = W([1, 2, 3], [0.1, 0.2, 0.3])
        for _ in range(7):
            out = filter_step(filt, w)
        assert np.allclose(out.as_array(), w.as_array(), atol=1e-15)

    def test_two_sample_warmup(self):
        filt = WrenchFilter(5)
        filt.step(W([1, 0, 0]))
        assert np.array_equal(filt.step(W([3, 0, 0])).force, [2, 0, 0])

    def test_sixth_sample_drops_first(self):
        filt = WrenchFilter(5)
        for k in range(1, 7):
            out = filt.step(W([k, 0, 0]))
        # mean of 2..6 by hand
        assert out.force[0] == pytest.approx(4.0, abs=1e-15)

    def test_rejects_bad(self):
        with pytest.raises(ValueError):
            WrenchFilter(0)
        with pytest.raises(ValueError):
            WrenchFilter().step(W([np.nan, 0, 0]))

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=30), st.integers(1, 8))
    def test_mean_of_last_window(self, xs, window):
        filt = WrenchFilter(window)
        for x in xs:
            out = filt.step(W([x, -x, 0], [0, 0, 2 * x]))
        tail = xs[-window:]
        assert out.force[0] == pytest.approx(sum(tail) / len(tail), abs=1e-9)
        assert out.torque[2] == pytest.approx(2 * sum(tail) / len(tail), abs=1e-9)


class TestEstimateR2:
    def test_example(self):
        f = np.array([0, 0, -5.0])
        r2 = estimate_r2(W(f, [0, 0.5, 0]), EZ)
        assert np.allclose(r2, [0.1, 0, 0], atol=1e-15)
        assert np.allclose(cross_oracle(r2, f), [0, 0.5, 0], atol=1e-15)

    def test_zero_torque(self):
        assert np.array_equal(estimate_r2(W([0, 0, -5]), EZ), np.zeros(3))

    def test_tangential_only_is_invalid(self):
        assert estimate_r2(W([1, 0, 0], [0, 0, 0.1]), EZ) is None

    def test_below_threshold_is_invalid(self):
        assert estimate_r2(W([0, 0, -0.4], [0, 0.04, 0]), EZ, f_min=0.5) is None
        assert estimate_r2(W([0, 0, -0.4], [0, 0.04, 0]), EZ, f_min=0.1) is not None

    def test_reconstruction_planar(self):
        # planar task: the tangential force lies along r2
        rng = np.random.default_rng(6)
        for _ in range(1000):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            r2 = rng.uniform(-0.5, 0.5, 3)
            r2 -= (r2 @ n) * n
            t = r2 / np.linalg.norm(r2)
            f = -rng.uniform(0.5, 20) * n + rng.uniform(-10, 10) * t
            tau = cross_oracle(r2, f)
            est = estimate_r2(W(f, tau), n)
            assert np.linalg.norm(est - r2) < 1e-9

    def test_out_of_plane_friction_overestimates(self):
        # |tau|^2 = fn^2 |r2|^2 + |r2 x f_t|^2, so the magnitude formula reads long
        r2 = np.array([0.1, 0, 0])
        f = np.array([0, 1.0, -5.0])
        est = estimate_r2(W(f, cross_oracle(r2, f)), EZ)
        assert np.linalg.norm(est) == pytest.approx(np.sqrt(0.1**2 + (0.1 * 1.0 / 5.0) ** 2), rel=1e-12)
        assert est @ r2 > 0

    @settings(max_examples=200)
    @given(st.floats(0.01, 0.5), st.floats(0.6, 20), st.floats(-3, 3))
    def test_magnitude_formula_and_tangency(self, a, fn, ft):
        f = np.array([ft, 0.0, -fn])
        tau = cross_oracle([a, 0, 0], f) + np.array([0.0, 0.0, 0.0])
        r2 = estimate_r2(W(f, tau), EZ)
        assert abs(r2 @ EZ) < 1e-12
        assert np.linalg.norm(r2) == pytest.approx(np.linalg.norm(tau) / fn, rel=1e-12)


    @settings(max_examples=200)
    @given(st.floats(0.02, 0.2), st.floats(0.5, 20.0), st.floats(0.1, 10.0), st.floats(-0.2, 0.2))
    def test_misaligned_normal_bias_is_force_scale_free(self, x, fn, scale, tilt):
        # friction at the sliding limit, normal read through a tilted axis
        r2 = np.array([x, 0.0, 0.0])
        f = np.array([0.3 * fn, 0.0, -fn])
        n_cfg = np.array([math.sin(tilt), 0.0, math.cos(tilt)])
        a = estimate_r2(W(f, cross_oracle(r2, f)), n_cfg, f_min=0.0)
        b = estimate_r2(W(scale * f, cross_oracle(r2, scale * f)), n_cfg, f_min=0.0)
        assert np.allclose(a, b, rtol=1e-12, atol=0)


class TestEstimateTheta:
    def test_flat(self):
        assert estimate_theta([0.1, 0, 0], [0.2, 0, 0], EZ) == 0.0

    def test_forty_five(self):
        # atan2(0.05 * 0.1, 0.1 * 0.05) by hand
        assert estimate_theta([0.05, 0, 0.05], [0.1, 0, 0], EZ) == pytest.approx(math.pi / 4, abs=1e-15)

    def test_perpendicular(self):
        assert estimate_theta([0, 0, 0.1], [0.1, 0, 0], EZ) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_rod_hanging_from_above_is_negative(self):
        assert estimate_theta([0.05, 0, -0.05], [0.1, 0, 0], EZ) == pytest.approx(-math.pi / 4)

    def test_zero_r2(self):
        with pytest.raises(ValueError):
            estimate_theta([0.1, 0, 0], [0, 0, 0], EZ)

    def test_scale_cancellation(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            r1 = rng.uniform(-0.3, 0.3, 3)
            r2 = rng.uniform(-0.3, 0.3, 3)
            r2 -= (r2 @ n) * n
            t = r2 / np.linalg.norm(r2)
            assert abs(estimate_theta(r1, r2, n) - math.atan2(n @ r1, t @ r1)) < 1e-12


class TestEstimateContact:
    def test_contact_point_is_p2_plus_r2(self):
        pose2 = Pose(np.array([0.5, 0, 0]))
        est = estimate_contact(W([0, 0, -5], [0, 0.5, 0]), pose2, EZ, r1_hint=[0.05, 0, -0.05])
        assert est.valid
        assert np.allclose(est.p_c, [0.6, 0, 0], atol=1e-15)
        assert est.theta_c == pytest.approx(-math.pi / 4)

    def test_invalid_holds_previous(self):
        prev = ContactEstimate(np.array([0.1, 0, 0]), np.array([0.6, 0, 0]), -0.3, True)
        est = estimate_contact(W([0, 0, -0.1], [0, 0.01, 0]), Pose(np.array([0.5, 0, 0])), EZ, [0.1, 0, 0], previous=prev)
        assert not est.valid
        assert np.array_equal(est.p_c, prev.p_c)
        assert np.array_equal(est.r2, prev.r2)
        assert est.theta_c == prev.theta_c

    def test_invariants_of_valid_estimate(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            f = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2), -rng.uniform(1, 10)])
            tau = rng.uniform(-1, 1, 3)
            est = estimate_contact(W(f, tau), Pose(), EZ, [0.05, 0, -0.05])
            if not est.valid:
                continue
            assert abs(est.r2 @ EZ) < 1e-9
            assert abs(np.linalg.norm(est.r2) - np.linalg.norm(tau) / abs(f @ EZ)) < 1e-9
