"""Distribution functions and the counter-based variate streams.

Frozen oracle values come from scipy.stats evaluated offline; the
package's own routines never generate their own expected values here.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from asrfcap import (
    DomainError,
    ModelDistributions,
    RandomStream,
    StandardNormal,
    StudentT,
    sample_chi_square,
    sample_std_normal,
    std_normal_cdf,
    std_normal_inv_cdf,
    student_t_cdf,
    student_t_inv_cdf,
)
from asrfcap.distributions import (
    sample_chi_square_array,
    sample_std_normal_array,
)

from conftest import ks_one_sample

# scipy.stats.norm oracle values, frozen
PHI_AT_MINUS_3090 = 0.0010007824766139484
PHI_AT_15597 = 0.9405846039212848
PHI_INV_001 = -2.326347874040836
PHI_INV_0001 = -3.0902323061678114
PHI_INV_0999 = 3.0902323061678083
# scipy.stats.t oracle values, frozen
T_INV_095_NU3 = 2.35336343480182
T_INV_0999_NU10 = 4.143700494046266


class TestStdNormalCdf:
    def test_symmetry_at_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_frozen_oracle_values(self):
        assert abs(std_normal_cdf(-3.090) - PHI_AT_MINUS_3090) <= 1e-12
        assert abs(std_normal_cdf(1.5597) - PHI_AT_15597) <= 1e-12

    def test_reflection(self):
        xs = np.linspace(-8.0, 8.0, 401)
        left = std_normal_cdf(-xs)
        right = 1.0 - std_normal_cdf(xs)
        assert np.max(np.abs(left - right)) <= 1e-13

    def test_nondecreasing(self):
        xs = np.linspace(-38.0, 38.0, 2001)
        vals = std_normal_cdf(xs)
        assert np.all(np.diff(vals) >= 0.0)
        assert np.all((vals >= 0.0) & (vals <= 1.0))

    def test_vectorized_shape(self):
        out = std_normal_cdf(np.zeros((3, 2)))
        assert out.shape == (3, 2)
        assert np.all(out == 0.5)

    def test_scalar_returns_float(self):
        assert isinstance(std_normal_cdf(1.0), float)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_nonfinite_rejected(self, bad):
        with pytest.raises(DomainError):
            std_normal_cdf(bad)

    def test_scipy_agreement_grid(self):
        xs = np.linspace(-12.0, 12.0, 3001)
        assert np.max(np.abs(std_normal_cdf(xs) - stats.norm.cdf(xs))) <= 1e-12


class TestStdNormalInvCdf:
    def test_median(self):
        assert std_normal_inv_cdf(0.5) == 0.0

    def test_frozen_oracle_values(self):
        assert abs(std_normal_inv_cdf(0.01) - PHI_INV_001) <= 1e-9
        assert abs(std_normal_inv_cdf(0.999) - PHI_INV_0999) <= 1e-9
        assert abs(std_normal_inv_cdf(0.001) - PHI_INV_0001) <= 1e-9

    def test_round_trip_grid(self):
        # |Phi(Phi^-1(u)) - u| <= 1e-9 over a 1,000-point grid
        u = np.linspace(1e-6, 1.0 - 1e-6, 1000)
        assert np.max(np.abs(std_normal_cdf(std_normal_inv_cdf(u)) - u)) <= 1e-9

    def test_strictly_increasing(self):
        u = np.linspace(1e-9, 1.0 - 1e-9, 1000)
        assert np.all(np.diff(std_normal_inv_cdf(u)) > 0.0)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5, np.nan])
    def test_out_of_unit_rejected(self, bad):
        with pytest.raises(DomainError):
            std_normal_inv_cdf(bad)

    @given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
    def test_round_trip_property(self, u):
        assert abs(std_normal_cdf(std_normal_inv_cdf(u)) - u) <= 1e-9


class TestStudentT:
    def test_symmetry_at_zero(self):
        for nu in (1, 3, 10, 30, 1000):
            assert student_t_cdf(0.0, nu) == 0.5

    def test_frozen_oracle_values(self):
        assert abs(student_t_inv_cdf(0.95, 3) - T_INV_095_NU3) <= 1e-8
        assert abs(student_t_inv_cdf(0.999, 10) - T_INV_0999_NU10) <= 1e-8

    def test_round_trip(self):
        u = np.linspace(1e-6, 1.0 - 1e-6, 1000)
        for nu in (1, 3, 10, 30):
            x = student_t_inv_cdf(u, nu)
            assert np.max(np.abs(student_t_cdf(x, nu) - u)) <= 1e-8

    def test_normal_limit_cdf(self):
        # for nu >= 1000 the t CDF is within 1e-3 of the Gaussian CDF
        xs = np.linspace(-4.0, 4.0, 801)
        for nu in (1000, 5000):
            gap = np.abs(student_t_cdf(xs, nu) - std_normal_cdf(xs))
            assert np.max(gap) <= 1e-3

    def test_normal_limit_inverse(self):
        for u in (0.9, 0.99, 0.999):
            gap = abs(student_t_inv_cdf(u, 10_000) - std_normal_inv_cdf(u))
            assert gap <= 2e-3

    def test_strictly_increasing(self):
        u = np.linspace(1e-6, 1.0 - 1e-6, 500)
        assert np.all(np.diff(student_t_inv_cdf(u, 3)) > 0.0)

    @pytest.mark.parametrize("bad_nu", [0, -1, 2.5, "3", np.nan])
    def test_bad_nu_rejected(self, bad_nu):
        with pytest.raises(DomainError):
            student_t_inv_cdf(0.5, bad_nu)
        with pytest.raises(DomainError):
            student_t_cdf(0.0, bad_nu)

    @pytest.mark.parametrize("bad_u", [0.0, 1.0, -0.1, 2.0])
    def test_bad_u_rejected(self, bad_u):
        with pytest.raises(DomainError):
            student_t_inv_cdf(bad_u, 5)


class TestRandomStream:
    def test_same_coordinates_same_value(self):
        a = RandomStream(42, 7, 3).uniform()
        b = RandomStream(42, 7, 3).uniform()
        assert a == b

    def test_open_unit_interval(self):
        for it in range(50):
            u = RandomStream(9, it, it % 5).uniform()
            assert 0.0 < u < 1.0

    def test_coordinates_differ(self):
        base = RandomStream(3, 0, 0).uniform()
        assert RandomStream(4, 0, 0).uniform() != base
        assert RandomStream(3, 1, 0).uniform() != base
        assert RandomStream(3, 0, 1).uniform() != base

    def test_at_returns_new_coordinates(self):
        s = RandomStream(1, 2, 3)
        t = s.at(iteration_index=9)
        assert (t.seed, t.iteration_index, t.variate_index) == (1, 9, 3)
        t = s.at(variate_index=0)
        assert (t.seed, t.iteration_index, t.variate_index) == (1, 2, 0)
        # original unchanged
        assert (s.iteration_index, s.variate_index) == (2, 3)

    def test_immutable(self):
        s = RandomStream(1)
        with pytest.raises(Exception):
            s.seed = 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"seed": 1 << 64},
            {"seed": -1},
            {"seed": 1, "iteration_index": 1 << 32},
            {"seed": 1, "iteration_index": -1},
            {"seed": 1, "variate_index": 1 << 31},
            {"seed": 1, "variate_index": -1},
        ],
    )
    def test_bounds_rejected(self, kwargs):
        with pytest.raises(DomainError):
            RandomStream(**kwargs)

    @given(
        st.integers(min_value=0, max_value=(1 << 64) - 1),
        st.integers(min_value=0, max_value=(1 << 32) - 1),
        st.integers(min_value=0, max_value=(1 << 31) - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_pure_function_of_coordinates(self, seed, it, var):
        s = RandomStream(seed, it, var)
        assert s.uniform() == RandomStream(seed, it, var).uniform()
        assert 0.0 < s.uniform() < 1.0


class TestSamplers:
    def test_normal_determinism(self):
        s = RandomStream(11, 5, 2)
        assert sample_std_normal(s) == sample_std_normal(s)

    def test_normal_matches_inverse_transform(self):
        s = RandomStream(11, 5, 2)
        assert sample_std_normal(s) == std_normal_inv_cdf(s.uniform())

    def test_normal_array_matches_scalar(self):
        arr = sample_std_normal_array(11, 20, variate=2)
        scalars = [sample_std_normal(RandomStream(11, k, 2)) for k in range(20)]
        assert np.array_equal(arr, np.array(scalars))

    def test_normal_moments_large_sample(self):
        z = sample_std_normal_array(7, 1_000_000)
        assert abs(z.mean()) <= 4e-3
        # variance of the sample variance is ~2/N for Gaussians
        assert abs(z.var() - 1.0) <= 3.0 * math.sqrt(2.0 / 1_000_000)

    def test_normal_ks_bound(self):
        z = sample_std_normal_array(123, 100_000)
        assert ks_one_sample(z, std_normal_cdf) <= 0.006

    def test_chi_square_determinism(self):
        s = RandomStream(11, 5)
        assert sample_chi_square(s, 10) == sample_chi_square(s, 10)

    def test_chi_square_shared_across_variates(self):
        # the mixing draw belongs to the iteration, not to a variate slot
        a = sample_chi_square(RandomStream(11, 5, 0), 10)
        b = sample_chi_square(RandomStream(11, 5, 99), 10)
        assert a == b

    def test_chi_square_positive(self):
        for nu in (1, 3, 10, 30):
            draws = sample_chi_square_array(13, 1000, nu)
            assert np.all(draws > 0.0)

    @pytest.mark.parametrize("nu", [1, 3, 10, 30])
    def test_chi_square_mean_within_one_percent(self, nu):
        draws = sample_chi_square_array(5, 1_000_000, nu)
        assert abs(draws.mean() - nu) <= 0.01 * nu

    def test_chi_square_mean_three_se(self):
        draws = sample_chi_square_array(9, 1_000_000, 10)
        se = math.sqrt(2.0 * 10 / 1_000_000)
        assert abs(draws.mean() - 10.0) <= 3.0 * se

    @pytest.mark.parametrize("nu", [1, 3, 10])
    def test_chi_square_ks_against_reference(self, nu):
        draws = sample_chi_square_array(5, 200_000, nu)
        d = ks_one_sample(draws, lambda x: stats.chi2.cdf(x, nu))
        assert d <= 0.01

    def test_chi_square_bad_nu(self):
        with pytest.raises(DomainError):
            sample_chi_square(RandomStream(1), 0)


class TestDistributionObjects:
    def test_standard_normal_round_trip(self):
        n = StandardNormal()
        u = np.linspace(1e-6, 1.0 - 1e-6, 1000)
        assert np.max(np.abs(n.cdf(n.inverse_cdf(u)) - u)) <= 1e-8

    def test_student_t_round_trip(self):
        t = StudentT(10)
        u = np.linspace(1e-6, 1.0 - 1e-6, 1000)
        assert np.max(np.abs(t.cdf(t.inverse_cdf(u)) - u)) <= 1e-8

    def test_sample_uses_inverse_transform(self):
        s = RandomStream(21, 4, 6)
        t = StudentT(5)
        assert t.sample(s) == t.inverse_cdf(s.uniform())

    def test_equality(self):
        assert StandardNormal() == StandardNormal()
        assert StudentT(5) == StudentT(5)
        assert StudentT(5) != StudentT(6)
        assert StandardNormal() != StudentT(5)

    def test_gaussian_preset(self):
        d = ModelDistributions.gaussian()
        assert d.margin_w == d.margin_z == d.systematic == StandardNormal()

    def test_t_margins_preset(self):
        d = ModelDistributions.t_margins(10)
        assert d.margin_w == StudentT(10)
        assert d.margin_z == StudentT(10)
        assert d.systematic == StandardNormal()
