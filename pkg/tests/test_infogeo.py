import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeseek.infogeo import (
    GeodesicConvergenceError,
    ModelPoint,
    distance_matrix,
    exp_distance,
    fisher_metric_numeric,
    geodesic_length,
    lognormal_distance_bvp,
    lognormal_distance_closed_form,
    lognormal_geodesic,
)

# fitted (alpha, beta) per range, in pso/sa/rsa order, from the time-model tables
LN_R3 = [(-3.229, 1.275), (-2.791, 1.343), (-2.886, 1.298)]
LN_R4 = [(0.62, 1.28), (1.08, 1.49), (0.42, 1.41)]
LN_R5 = [(4.27, 1.25), (5.43, 1.62), (4.06, 1.99)]


def lnp(a, b):
    return ModelPoint.lognormal(a, b)


class TestFisherMetricNumeric:
    def test_exponential_rate_two(self):
        g = fisher_metric_numeric(ModelPoint.exponential(2.0))
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(0.25, abs=1e-6)

    def test_lognormal_standard(self):
        g = fisher_metric_numeric(lnp(0.0, 1.0))
        assert g[0, 0] == pytest.approx(1.0, abs=1e-6)
        assert g[1, 1] == pytest.approx(2.0, abs=1e-6)
        assert g[0, 1] == pytest.approx(0.0, abs=1e-6)

    def test_lognormal_shifted(self):
        g = fisher_metric_numeric(lnp(5.0, 2.0))
        assert g[0, 0] == pytest.approx(0.25, abs=1e-6)
        assert g[1, 1] == pytest.approx(0.5, abs=1e-6)
        assert g[0, 1] == pytest.approx(0.0, abs=1e-6)


class TestExpDistance:
    def test_r3_pair(self):
        # |ln(8.800/14.301)| = 0.485578 (30-digit evaluation)
        assert exp_distance(14.301, 8.800) == pytest.approx(0.485578, abs=1e-6)
        assert round(exp_distance(14.301, 8.800), 2) == 0.49

    def test_identity(self):
        assert exp_distance(3.7, 3.7) == 0.0

    def test_r4_pair(self):
        assert exp_distance(0.305, 0.162) == pytest.approx(0.632715, abs=1e-6)

    def test_symmetry(self):
        assert exp_distance(2.0, 5.0) == exp_distance(5.0, 2.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            exp_distance(-1.0, 2.0)

    @given(st.floats(0.01, 100), st.floats(0.01, 100), st.integers(-8, 8))
    @settings(max_examples=100)
    def test_scale_invariance_exact_pow2(self, l1, l2, k):
        c = 2.0**k
        assert exp_distance(c * l1, c * l2) == exp_distance(l1, l2)


class TestClosedForm:
    def test_identity(self):
        assert lognormal_distance_closed_form(lnp(-3.2, 1.3), lnp(-3.2, 1.3)) == 0.0

    def test_r3_pso_sa(self):
        d = lognormal_distance_closed_form(lnp(*LN_R3[0]), lnp(*LN_R3[1]))
        assert d == pytest.approx(0.341859, abs=1e-6)

    def test_r3_sa_rsa(self):
        d = lognormal_distance_closed_form(lnp(*LN_R3[1]), lnp(*LN_R3[2]))
        assert d == pytest.approx(0.086592, abs=1e-6)

    @given(st.floats(-5, 5), st.floats(0.1, 3), st.floats(-5, 5), st.floats(0.1, 3))
    @settings(max_examples=100)
    def test_symmetry_exact(self, a1, b1, a2, b2):
        p, q = lnp(a1, b1), lnp(a2, b2)
        assert lognormal_distance_closed_form(p, q) == lognormal_distance_closed_form(q, p)

    def test_family_check(self):
        with pytest.raises(ValueError):
            lognormal_distance_closed_form(lnp(0, 1), ModelPoint.exponential(1.0))


class TestGeodesicBVP:
    def test_coincident_endpoints(self):
        path = lognormal_geodesic(lnp(1.0, 2.0), lnp(1.0, 2.0))
        assert geodesic_length(path) == 0.0
        assert np.all(path.alpha == 1.0) and np.all(path.beta == 2.0)

    def test_pure_beta_keeps_alpha_constant(self):
        path = lognormal_geodesic(lnp(-1.5, 0.8), lnp(-1.5, 2.4))
        assert np.max(np.abs(path.alpha + 1.5)) < 1e-9
        # the vertical-line geodesic has length sqrt(2)|ln(b2/b1)|
        assert geodesic_length(path) == pytest.approx(
            math.sqrt(2) * math.log(2.4 / 0.8), abs=1e-8)

    def test_endpoint_residual(self):
        path = lognormal_geodesic(lnp(*LN_R3[0]), lnp(*LN_R3[1]))
        assert path.residual <= 1e-8
        assert path.alpha[0] == LN_R3[0][0] and path.beta[0] == LN_R3[0][1]
        assert abs(path.alpha[-1] - LN_R3[1][0]) <= 1e-8
        assert abs(path.beta[-1] - LN_R3[1][1]) <= 1e-8

    def test_beta_stays_positive(self):
        path = lognormal_geodesic(lnp(-4.0, 0.2), lnp(4.0, 0.3))
        assert np.all(path.beta > 0)

    def test_speed_is_constant(self):
        path = lognormal_geodesic(lnp(*LN_R5[1]), lnp(*LN_R5[2]))
        speed = np.sqrt(path.d_alpha**2 + 2 * path.d_beta**2) / path.beta
        assert (speed.max() - speed.min()) / speed.max() <= 1e-6

    def test_unreachable_tolerance_raises(self):
        with pytest.raises(GeodesicConvergenceError):
            lognormal_geodesic(lnp(0.0, 1.0), lnp(1.0, 2.0), tolerance=1e-30)


class TestLengthVsClosedForm:
    def test_r3_pair_matches_table(self):
        d = lognormal_distance_bvp(lnp(*LN_R3[0]), lnp(*LN_R3[1]))
        assert d == pytest.approx(0.34, abs=0.01)

    def test_oracle_equivalence_sample(self):
        rng = np.random.Generator(np.random.PCG64(7))
        for _ in range(20):
            a1, a2 = rng.uniform(-5, 5, size=2)
            b1, b2 = rng.uniform(0.1, 3, size=2)
            p, q = lnp(a1, b1), lnp(a2, b2)
            bvp = lognormal_distance_bvp(p, q)
            closed = lognormal_distance_closed_form(p, q)
            assert abs(bvp - closed) <= 1e-5, (a1, b1, a2, b2)


class TestDistanceMatrix:
    def test_exponential_r3(self):
        pts = [ModelPoint.exponential(r) for r in (14.301, 8.800, 10.014)]
        mat = distance_matrix(pts)
        assert np.allclose(np.diag(mat), 0.0)
        assert round(mat[0, 1], 2) == 0.49
        assert round(mat[0, 2], 2) == 0.36
        assert round(mat[1, 2], 2) == 0.13
        assert np.allclose(mat, mat.T)

    def test_single_model(self):
        mat = distance_matrix([ModelPoint.exponential(3.0)])
        assert mat.shape == (1, 1) and mat[0, 0] == 0.0

    def test_mixed_families_rejected(self):
        with pytest.raises(ValueError, match="family"):
            distance_matrix([ModelPoint.exponential(1.0), lnp(0.0, 1.0)])

    def test_lognormal_r4(self):
        mat = distance_matrix([lnp(a, b) for a, b in LN_R4])
        assert round(mat[0, 1], 2) == 0.40
        assert round(mat[0, 2], 2) == 0.20
        assert round(mat[1, 2], 2) == 0.46

    def test_closed_form_method_agrees(self):
        pts = [lnp(a, b) for a, b in LN_R3]
        assert np.allclose(distance_matrix(pts),
                           distance_matrix(pts, method="closed_form"), atol=1e-5)


class TestModelPoint:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelPoint.exponential(0.0)
        with pytest.raises(ValueError):
            ModelPoint.lognormal(0.0, -1.0)
        with pytest.raises(ValueError):
            ModelPoint("weibull", (1.0, 2.0))
