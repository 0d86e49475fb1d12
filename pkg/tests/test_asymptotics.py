import math

import mpmath as mp
import numpy as np
import pytest

from truncvar import asymptotics as asy

mp.mp.dps = 40

# High-precision reference forms of the closed-form constants (mu != 0).


def ref_m(mu, c):
    return mp.mpf(mu) * mp.coth(c * mp.mpf(mu))


def ref_sigma2(mu, c):
    x = c * mp.mpf(mu)
    return (2 - 2 * x * mp.coth(x)) / mp.sinh(x) ** 2 + 1


def ref_rho2(mu, c):
    x = c * mp.mpf(mu)
    return 2 * mp.exp(4 * x) * (mp.sinh(2 * x) - 2 * x) / (mp.exp(2 * x) - 1) ** 3


def ref_phase(alpha, beta, mu, c):
    """E exp(alpha * excess - beta * duration) for an upward crossing phase."""
    mu, c, alpha = mp.mpf(mu), mp.mpf(c), mp.mpf(alpha)
    d = mp.sqrt(mu * mu + 2 * beta)
    return d * mp.exp(-(alpha + mu) * c) * mp.exp(alpha * c) / (
        d * mp.cosh(d * c) - (alpha + mu) * mp.sinh(d * c)
    )


def ref_joint(alpha, beta, a, b, mu, c):
    # G = rise + fall, H = rise - fall; the falling phase is a rising one under -mu
    return ref_phase(alpha * (a + b), beta, mu, c) * ref_phase(alpha * (a - b), beta, -mu, c)


def ref_second_moment_X(a, b, mu, c):
    r = asy.drift_ratio(a, b, mu, c)
    return mp.diff(lambda s: ref_joint(s, s * r, a, b, mu, c), 0, 2)


MU_C = [(1.0, 1.0), (-1.0, 1.0), (0.3, 2.0), (2.5, 0.4), (-0.8, 0.7), (0.2, 0.6)]


class TestReferenceValues:
    def test_zero_drift_branches(self):
        assert asy.m_mu_c(0.0, 0.5) == 2.0
        assert asy.n_mu_c(0.0, 2.0) == 0.5
        assert asy.sigma2_mu_c(0.0, 1.0) == pytest.approx(1 / 3, abs=1e-15)
        assert asy.rho2_mu_c(0.0, 1.0) == pytest.approx(1 / 3, abs=1e-15)
        assert asy.mean_renewal_time(0.0, 0.1) == pytest.approx(0.02, rel=1e-14)

    def test_unit_drift_unit_threshold(self):
        coth1 = math.cosh(1) / math.sinh(1)
        assert asy.m_mu_c(1, 1) == pytest.approx(coth1, rel=1e-14)
        assert asy.m_mu_c(1, 1) == pytest.approx(1.313035, abs=1e-6)
        assert asy.n_mu_c(1, 1) == pytest.approx(2.313035, abs=1e-6)
        assert asy.sigma2_mu_c(1, 1) == pytest.approx(0.54670, abs=5e-5)
        assert asy.rho2_mu_c(1, 1) == pytest.approx(0.6811, abs=1e-4)
        assert asy.mean_renewal_time(1, 1) == pytest.approx(2 * math.sinh(1) ** 2, rel=1e-14)
        assert asy.mean_Z(1, 0, 1, 1) == pytest.approx(math.sinh(2), rel=1e-14)

    def test_laplace_d_value(self):
        expected = 3 / (2 + math.cosh(2 * math.sqrt(3)))
        assert asy.laplace_D(1, 1, 1) == pytest.approx(expected, rel=1e-14)
        assert asy.laplace_D(1, 1, 1) == pytest.approx(0.166764, abs=1e-6)

    def test_second_moment_value(self):
        value = 3 + math.cosh(2) - 4 / math.tanh(1)
        assert asy.second_moment_X(1, 0, 1, 1) == pytest.approx(value, rel=1e-14)
        assert asy.var_large_time_tv(1, 1) == pytest.approx(1.51005, abs=1e-5)


@pytest.mark.parametrize("mu, c", MU_C)
class TestHighPrecisionOracle:
    def test_rates(self, mu, c):
        assert asy.m_mu_c(mu, c) == pytest.approx(float(ref_m(mu, c)), rel=1e-13)
        assert asy.n_mu_c(mu, c) == pytest.approx(float(ref_m(mu, c) + mu), rel=1e-13)

    def test_variances(self, mu, c):
        assert asy.sigma2_mu_c(mu, c) == pytest.approx(float(ref_sigma2(mu, c)), rel=1e-12)
        assert asy.rho2_mu_c(mu, c) == pytest.approx(float(ref_rho2(mu, c)), rel=1e-12)

    def test_laplace_d_is_product_of_phases(self, mu, c):
        for beta in (0.1, 1.0, 3.0):
            ref = ref_phase(0, beta, mu, c) * ref_phase(0, beta, -mu, c)
            assert asy.laplace_D(beta, mu, c) == pytest.approx(float(ref), rel=1e-12)
            up = asy.laplace_phase(0.0, beta, mu, c)
            down = asy.laplace_phase(0.0, beta, mu, c, downward=True)
            assert up * down == pytest.approx(asy.laplace_D(beta, mu, c), rel=1e-12)

    def test_laplace_z_matches_joint_transform(self, mu, c):
        for a, b in ((1.0, 0.0), (0.0, 1.0), (1.0, 0.5)):
            for alpha in (-0.2, 0.05):
                ref = ref_joint(alpha, 0, a, b, mu, c)
                assert asy.laplace_Z(alpha, a, b, mu, c) == pytest.approx(float(ref), rel=1e-11)

    def test_mean_d_is_derivative_of_transform(self, mu, c):
        slope = mp.diff(lambda s: ref_phase(0, s, mu, c) * ref_phase(0, s, -mu, c), 0)
        assert asy.mean_renewal_time(mu, c) == pytest.approx(float(-slope), rel=1e-10)

    def test_mean_z_is_derivative_of_transform(self, mu, c):
        for a, b in ((1.0, 0.0), (0.0, 1.0), (2.0, -1.0)):
            slope = mp.diff(lambda s: ref_joint(s, 0, a, b, mu, c), 0)
            assert asy.mean_Z(a, b, mu, c) == pytest.approx(float(slope), rel=1e-10, abs=1e-12)
            assert asy.drift_ratio(a, b, mu, c) == pytest.approx(
                asy.mean_Z(a, b, mu, c) / asy.mean_renewal_time(mu, c), rel=1e-12, abs=1e-12
            )

    def test_second_moment_of_centred_cycle(self, mu, c):
        for a, b in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -0.5)):
            ref = ref_second_moment_X(a, b, mu, c)
            assert asy.second_moment_X(a, b, mu, c) == pytest.approx(float(ref), rel=1e-9)


class TestSmallDrift:
    @pytest.mark.parametrize(
        "f",
        [
            lambda mu: asy.m_mu_c(mu, 1.0),
            lambda mu: asy.sigma2_mu_c(mu, 1.0),
            lambda mu: asy.mean_renewal_time(mu, 1.0),
            lambda mu: asy.mean_Z(1, 0, mu, 1.0),
            lambda mu: asy.second_moment_X(1, 0, mu, 1.0),
            lambda mu: asy.variance_rate(1, 0, mu, 1.0),
        ],
    )
    def test_continuity_at_zero(self, f):
        for mu in (1e-6, -1e-6, 1e-8):
            assert abs(f(mu) - f(0.0)) <= 1e-8 * abs(f(0.0))

    def test_zero_drift_limits(self):
        assert asy.m_mu_c(0.0, 1.0) == 1.0
        assert asy.mean_renewal_time(0.0, 1.0) == 2.0
        assert asy.mean_Z(1, 0, 0.0, 1.0) == 2.0
        assert asy.second_moment_X(1, 0, 0.0, 1.0) == pytest.approx(2 / 3, rel=1e-15)
        assert asy.variance_rate(1, 0, 0.0, 1.0) == pytest.approx(1 / 3, rel=1e-15)

    def test_rho2_has_linear_term(self):
        for mu in (1e-6, -1e-6, 1e-8):
            slope = (asy.rho2_mu_c(mu, 1.0) - asy.rho2_mu_c(0.0, 1.0)) / mu
            assert slope == pytest.approx(1 / 3, rel=1e-4)

    @pytest.mark.parametrize("x", [0.0999999, 0.1, 0.1000001, -0.1, 0.05, 0.2, 1e-3])
    def test_branches_agree_with_high_precision(self, x):
        mu = x
        c = 1.0
        cases = {
            asy.sigma2_mu_c(mu, c): ref_sigma2(mu, c),
            asy.rho2_mu_c(mu, c): ref_rho2(mu, c),
            asy.m_mu_c(mu, c): ref_m(mu, c),
        }
        for got, ref in cases.items():
            assert got == pytest.approx(float(ref), rel=1e-12)
        ref_var = 3 + mp.cosh(2 * mp.mpf(x)) - 4 * mp.mpf(x) * mp.coth(mp.mpf(x))
        assert asy.var_large_time_tv(mu, c) == pytest.approx(float(ref_var / mp.mpf(x) ** 2), rel=1e-11)


class TestIdentities:
    def test_variance_identity_random_points(self):
        rng = np.random.default_rng(2024)
        for mu, c in zip(rng.uniform(-3, 3, 20), rng.uniform(0.05, 3, 20)):
            lhs = asy.var_large_time_tv(mu, c) / asy.mean_renewal_time(mu, c)
            assert lhs == pytest.approx(asy.sigma2_mu_c(mu, c), rel=1e-10)

    @pytest.mark.parametrize("mu, c", MU_C)
    def test_symmetries(self, mu, c):
        assert asy.m_mu_c(-mu, c) == pytest.approx(asy.m_mu_c(mu, c), rel=1e-15)
        assert asy.n_mu_c(mu, c) - asy.n_mu_c(-mu, c) == pytest.approx(2 * mu, rel=1e-12)
        assert asy.sigma2_mu_c(-mu, c) == pytest.approx(asy.sigma2_mu_c(mu, c), rel=1e-14)
        assert asy.rho2_mu_c(mu, c) != pytest.approx(asy.rho2_mu_c(-mu, c))

    def test_drift_ratio_is_growth_rate(self):
        rng = np.random.default_rng(4)
        for mu, c in zip(rng.uniform(-3, 3, 20), rng.uniform(0.05, 3, 20)):
            assert asy.drift_ratio(1, 0, mu, c) == pytest.approx(asy.m_mu_c(mu, c), rel=1e-14)
            assert asy.n_mu_c(mu, c) - asy.m_mu_c(mu, c) == pytest.approx(mu, rel=1e-12)

    def test_variances_positive(self):
        for mu in (-50.0, -3.0, -1e-7, 0.0, 0.05, 2.0, 50.0):
            for c in (0.01, 1.0, 4.0):
                assert asy.sigma2_mu_c(mu, c) > 0
                assert asy.rho2_mu_c(mu, c) > 0
                assert asy.var_large_time_tv(mu, c) > 0
                assert asy.second_moment_X(1.0, 0.5, mu, c) > 0

    def test_variance_rate_small_c(self):
        # a^2/3 + b^2 + (4/3) a b c mu + O(c^2)
        a, b, mu, c = 1.0, 0.7, 1.3, 1e-3
        approx = a * a / 3 + b * b + 4 / 3 * a * b * c * mu
        assert asy.variance_rate(a, b, mu, c) == pytest.approx(approx, abs=1e-5)

    def test_laplace_at_zero(self):
        assert asy.laplace_D(0.0, 1.0, 1.0) == 1.0
        assert asy.laplace_Z(0.0, 1.0, 0.0, 1.0, 1.0) == 1.0


class TestDomain:
    def test_nonpositive_c(self):
        for f in (asy.m_mu_c, asy.sigma2_mu_c, asy.rho2_mu_c, asy.mean_renewal_time):
            with pytest.raises(ValueError):
                f(1.0, 0.0)
            with pytest.raises(ValueError):
                f(1.0, -1.0)

    def test_laplace_d_domain(self):
        with pytest.raises(ValueError):
            asy.laplace_D(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            asy.laplace_D(0.0, 0.0, 1.0)
        assert asy.laplace_D(1e6, 1.0, 1.0) == 0.0

    def test_laplace_z_domain(self):
        with pytest.raises(ValueError):
            asy.laplace_Z(0.1, 1, 0, 0.0, 1.0)
        with pytest.raises(ValueError):
            asy.laplace_Z(5.0, 1, 0, 1.0, 1.0)

    def test_phase_domain(self):
        with pytest.raises(ValueError):
            asy.laplace_phase(10.0, 1.0, 1.0, 1.0)

    def test_extreme_arguments_are_finite(self):
        for mu in (400.0, -400.0):
            assert math.isfinite(asy.sigma2_mu_c(mu, 1.0))
            assert math.isfinite(asy.rho2_mu_c(mu, 1.0))

    def test_constants_keys(self):
        out = asy.constants(1.0, 1.0)
        assert set(out) == {"m", "n", "n_neg", "sigma2", "rho2", "rho2_neg", "mean_D", "mean_Z", "var_X"}
