"""Core polynomial machinery: recurrence, kernels, Gauss rules, coefficients."""

import math

import numpy as np
import pytest
from scipy.special import beta as beta_fn
from scipy.special import eval_jacobi, gamma, roots_jacobi

import jacoframe as jf
from conftest import cached_table

PARAM_GRID = [(-0.5, -0.5), (0.0, 0.0), (0.5, 1.0), (1.0, 0.5), (2.3, -0.4)]


def orthonormal_jacobi_oracle(alpha, beta, k, x):
    """Normalized classical Jacobi values via scipy's independent evaluator."""
    if k == 0:
        norm_sq = 2.0 ** (alpha + beta + 1) * beta_fn(alpha + 1, beta + 1)
    else:
        norm_sq = (
            2.0 ** (alpha + beta + 1)
            / (2 * k + alpha + beta + 1)
            * gamma(k + alpha + 1)
            * gamma(k + beta + 1)
            / (gamma(k + alpha + beta + 1) * gamma(k + 1))
        )
    return eval_jacobi(k, alpha, beta, x) / math.sqrt(norm_sq)


class TestBuildRecurrence:
    def test_legendre_total_mass(self):
        t = cached_table(0.0, 0.0, 8)
        assert t.total_mass == pytest.approx(2.0, rel=1e-14)
        assert t.m0 == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_chebyshev_total_mass_is_pi(self):
        # arc-length measure of the unit half-circle
        t = cached_table(-0.5, -0.5, 8)
        assert t.total_mass == pytest.approx(math.pi, rel=1e-12)

    def test_linear_weight_total_mass(self):
        # integral of (1 - x) over [-1, 1] is 2 by direct integration
        t = cached_table(1.0, 0.0, 8)
        assert t.total_mass == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_total_mass_against_quadrature(self, alpha, beta):
        import mpmath

        oracle = float(
            mpmath.quad(lambda x: (1 - x) ** alpha * (1 + x) ** beta, [-1, 0, 1])
        )
        t = cached_table(alpha, beta, 4)
        assert t.total_mass == pytest.approx(oracle, rel=1e-10)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_offdiagonal_coefficients_positive(self, alpha, beta):
        t = cached_table(alpha, beta, 200)
        assert np.all(t.b > 0.0)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(jf.ParameterError):
            jf.JacobiParams(-1.0, 0.0)
        with pytest.raises(jf.ParameterError):
            jf.JacobiParams(0.0, -1.5)
        with pytest.raises(jf.ParameterError):
            jf.JacobiParams(float("nan"), 0.0)
        with pytest.raises(jf.ParameterError):
            jf.build_recurrence(jf.JacobiParams(0.0, 0.0), -1)

    def test_localization_flag(self):
        assert jf.JacobiParams(-0.5, 0.0).supports_localization
        assert not jf.JacobiParams(-0.75, 0.0).supports_localization


class TestEvalAll:
    def test_chebyshev_constant(self):
        t = cached_table(-0.5, -0.5, 8)
        assert jf.eval_all(t, 1, 0.3)[0] == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-14)

    def test_chebyshev_cosine_form(self):
        t = cached_table(-0.5, -0.5, 16)
        theta = 1.234
        vals = jf.eval_all(t, 10, math.cos(theta))
        for k in range(1, 10):
            assert vals[k] == pytest.approx(
                math.sqrt(2.0 / math.pi) * math.cos(k * theta), abs=1e-13
            )

    def test_legendre_at_one(self):
        # orthonormalizing {1, x} against the flat weight by direct integration
        t = cached_table(0.0, 0.0, 8)
        vals = jf.eval_all(t, 2, 1.0)
        assert vals[0] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)
        assert vals[1] == pytest.approx(math.sqrt(1.5), rel=1e-14)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_against_scipy_normalized(self, alpha, beta):
        t = cached_table(alpha, beta, 64)
        xs = np.linspace(-0.99, 0.99, 7)
        vals = jf.eval_all(t, 41, xs)
        for k in (0, 1, 2, 5, 17, 40):
            oracle = orthonormal_jacobi_oracle(alpha, beta, k, xs)
            np.testing.assert_allclose(vals[k], oracle, rtol=1e-9, atol=1e-9)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_reflection_symmetry(self, alpha, beta):
        ta = cached_table(alpha, beta, 32)
        tb = cached_table(beta, alpha, 32)
        xs = np.linspace(-0.9, 0.9, 5)
        va = jf.eval_all(ta, 20, xs)
        vb = jf.eval_all(tb, 20, -xs)
        signs = (-1.0) ** np.arange(20)
        np.testing.assert_allclose(va, signs[:, None] * vb, rtol=1e-11, atol=1e-11)

    def test_capacity_error(self):
        t = cached_table(0.0, 0.0, 4)
        with pytest.raises(jf.CapacityError):
            jf.eval_all(t, 6, 0.0)

    def test_array_shape(self):
        t = cached_table(0.0, 0.0, 8)
        out = jf.eval_all(t, 5, np.zeros(7))
        assert out.shape == (5, 7)


class TestKernels:
    def test_single_term_is_inverse_mass(self):
        for alpha, beta in PARAM_GRID:
            t = cached_table(alpha, beta, 4)
            assert jf.cd_kernel(t, 1, 0.2, -0.7) == pytest.approx(
                1.0 / t.total_mass, rel=1e-14
            )

    def test_chebyshev_diagonal_value(self):
        # sum of squared Chebyshev values at 0: T_k(0) is 0, -1, 0 for k = 1..3
        t = cached_table(-0.5, -0.5, 8)
        assert jf.cd_kernel(t, 4, 0.0, 0.0) == pytest.approx(3.0 / math.pi, rel=1e-13)

    def test_legendre_diagonal_at_one(self):
        # squared normalized Legendre values at 1 are (2k+1)/2
        t = cached_table(0.0, 0.0, 8)
        assert jf.cd_kernel(t, 3, 1.0, 1.0) == pytest.approx(4.5, rel=1e-13)

    def test_symmetry_bitwise(self):
        t = cached_table(0.5, 1.0, 32)
        assert jf.cd_kernel(t, 20, 0.3, -0.6) == jf.cd_kernel(t, 20, -0.6, 0.3)

    def test_zero_terms_rejected(self):
        t = cached_table(0.0, 0.0, 4)
        with pytest.raises(jf.ParameterError):
            jf.cd_kernel(t, 0, 0.0, 0.0)
        with pytest.raises(jf.ParameterError):
            jf.christoffel(t, 0, 0.0)

    def test_christoffel_one_term(self):
        for alpha, beta in PARAM_GRID:
            t = cached_table(alpha, beta, 4)
            assert jf.christoffel(t, 1, 0.37) == pytest.approx(t.total_mass, rel=1e-14)

    def test_christoffel_chebyshev_value(self):
        t = cached_table(-0.5, -0.5, 8)
        assert jf.christoffel(t, 4, 0.0) == pytest.approx(math.pi / 3.0, rel=1e-13)

    def test_christoffel_interior_scale(self):
        # Chebyshev-Gauss masses are pi/m; the interior Christoffel function
        # approaches that value as m grows
        t = cached_table(-0.5, -0.5, 300)
        m = 256
        val = jf.christoffel(t, m, math.cos(1.0))
        assert val == pytest.approx(math.pi / m, rel=0.02)

    def test_christoffel_nonincreasing_in_m(self):
        t = cached_table(0.5, 1.0, 64)
        xs = np.linspace(-0.99, 0.99, 9)
        prev = jf.christoffel(t, 1, xs)
        for m in range(2, 60):
            cur = jf.christoffel(t, m, xs)
            assert np.all(cur <= prev + 1e-15)
            prev = cur

    def test_reproducing_identity(self):
        for alpha, beta in [(-0.5, -0.5), (0.0, 0.0), (1.0, 0.5)]:
            t = cached_table(alpha, beta, 64)
            for m in (5, 20, 50):
                rule = jf.gauss_rule(t, m)
                for x in (-0.8, 0.0, 0.33):
                    kvals = jf.cd_kernel(t, m, x, rule.nodes)
                    integral = float(np.sum(rule.masses * kvals**2))
                    assert integral == pytest.approx(
                        jf.cd_kernel(t, m, x, x), rel=1e-10
                    )


class TestBarWeight:
    def test_zero_exponents(self):
        assert jf.bar_weight(1, 0.0, 0.0, 0.0) == pytest.approx(1.0)

    def test_endpoint_value(self):
        # (sqrt(0) + 1/2)^1 * (sqrt(2) + 1/2)^1 evaluated directly
        expected = 0.5 * (math.sqrt(2.0) + 0.5)
        assert jf.bar_weight(2, 0.5, 0.5, 1.0) == pytest.approx(expected, rel=1e-14)

    def test_large_m_limit(self):
        # interior limit is the plain weight with doubled exponents
        x = 0.3
        a, b = 0.7, -0.2
        lim = (1 - x) ** (2 * a) * (1 + x) ** (2 * b)
        assert jf.bar_weight(10**6, a, b, x) == pytest.approx(lim, rel=1e-5)

    def test_invalid_m(self):
        with pytest.raises(jf.ParameterError):
            jf.bar_weight(0, 0.5, 0.5, 0.0)


class TestGaussRule:
    def test_chebyshev_closed_form(self):
        t = cached_table(-0.5, -0.5, 8)
        rule = jf.gauss_rule(t, 4)
        expected_nodes = np.sort(np.cos((2 * np.arange(1, 5) - 1) * np.pi / 8))
        np.testing.assert_allclose(rule.nodes, expected_nodes, atol=1e-14)
        np.testing.assert_allclose(rule.masses, np.pi / 4, rtol=1e-13)

    def test_legendre_midpoint(self):
        t = cached_table(0.0, 0.0, 4)
        rule = jf.gauss_rule(t, 1)
        assert rule.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert rule.masses[0] == pytest.approx(2.0, rel=1e-14)
        assert rule.exactness_degree == 1

    def test_legendre_three_point_moments(self):
        # direct integration: moment 0 is 2, moment 2 is 2/3
        t = cached_table(0.0, 0.0, 8)
        rule = jf.gauss_rule(t, 3)
        assert float(np.sum(rule.masses)) == pytest.approx(2.0, rel=1e-14)
        assert float(np.sum(rule.masses * rule.nodes**2)) == pytest.approx(
            2.0 / 3.0, rel=1e-13
        )

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    @pytest.mark.parametrize("m", [5, 16, 64])
    def test_against_scipy_roots(self, alpha, beta, m):
        t = cached_table(alpha, beta, 64)
        rule = jf.gauss_rule(t, m)
        nodes, weights = roots_jacobi(m, alpha, beta)
        np.testing.assert_allclose(rule.nodes, nodes, atol=1e-12)
        np.testing.assert_allclose(rule.masses, weights, rtol=1e-10)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_masses_match_christoffel(self, alpha, beta):
        t = cached_table(alpha, beta, 64)
        rule = jf.gauss_rule(t, 32)
        lam = jf.christoffel(t, 32, rule.nodes)
        np.testing.assert_allclose(rule.masses, lam, rtol=1e-10)
        assert np.all(rule.masses > 0)
        assert rule.exactness_degree == 63

    def test_capacity_and_parameter_errors(self):
        t = cached_table(0.0, 0.0, 4)
        with pytest.raises(jf.CapacityError):
            jf.gauss_rule(t, 6)
        with pytest.raises(jf.ParameterError):
            jf.gauss_rule(t, 0)


class TestOrthonormality:
    @pytest.mark.parametrize("alpha,beta", [(-0.5, 0.0), (0.0, 0.0), (1.0, 2.3)])
    def test_gram_is_identity(self, alpha, beta):
        t = cached_table(alpha, beta, 64)
        rule = jf.gauss_rule(t, 32)
        vals = jf.eval_all(t, 13, rule.nodes)
        gram = (vals * rule.masses) @ vals.T
        np.testing.assert_allclose(gram, np.eye(13), atol=1e-12)


class TestFourierCoeffs:
    def test_basis_function_gives_unit_vector(self):
        t = cached_table(0.5, 1.0, 64)
        j = 7
        f = lambda x: jf.eval_all(t, j + 1, x)[j]
        coeffs = jf.fourier_coeffs(t, f, 12)
        expected = np.zeros(12)
        expected[j] = 1.0
        np.testing.assert_allclose(coeffs, expected, atol=1e-12)

    def test_zero_function(self):
        t = cached_table(0.0, 0.0, 32)
        coeffs = jf.fourier_coeffs(t, lambda x: np.zeros_like(x), 8)
        assert np.all(coeffs == 0.0)

    def test_abs_x_chebyshev_closed_form(self):
        # classical even-index coefficients of |x| in the cosine basis,
        # rescaled to the orthonormal normalization
        t = cached_table(-0.5, -0.5, 2100)
        n = 64
        expected = np.zeros(n)
        expected[0] = 2.0 / math.sqrt(math.pi)
        j = np.arange(1, n // 2)
        expected[2 * j] = (
            2.0 * math.sqrt(2.0 / math.pi) * (-1.0) ** (j + 1) / (4.0 * j**2 - 1.0)
        )
        coarse = jf.fourier_coeffs(t, np.abs, n, oracle_degree=256)
        fine = jf.fourier_coeffs(t, np.abs, n, oracle_degree=2048)
        assert np.max(np.abs(fine - expected)) < 1e-5
        assert np.max(np.abs(fine - expected)) < np.max(np.abs(coarse - expected))

    def test_capacity_error(self):
        t = cached_table(0.0, 0.0, 16)
        with pytest.raises(jf.CapacityError):
            jf.fourier_coeffs(t, np.abs, 64, oracle_degree=8)


class TestChristoffelEquivalence:
    @pytest.mark.parametrize("alpha,beta", [(-0.5, -0.5), (0.0, 0.0), (0.5, 1.0)])
    def test_ratio_interval_stable_across_m(self, alpha, beta):
        # m * lambda_m against the regularized weight with half-shifted
        # exponents: per-m extreme ratios should not drift as m grows
        t = cached_table(alpha, beta, 300)
        xs = np.cos(np.linspace(0.001, np.pi - 0.001, 801))
        lows, highs = [], []
        for m in (16, 64, 256):
            ratio = m * jf.christoffel(t, m, xs) / jf.bar_weight(
                m, alpha + 0.5, beta + 0.5, xs
            )
            assert np.all(ratio > 0.0)
            lows.append(ratio.min())
            highs.append(ratio.max())
        assert max(lows) / min(lows) < 2.0
        assert max(highs) / min(highs) < 2.0
