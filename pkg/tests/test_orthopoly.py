"""Polynomial evaluation, norms, weighted forms, and Gaussian rules."""

import math

import numpy as np
import pytest

from gegenexp.orthopoly import (
    gauss_gegenbauer_rule,
    gauss_hermite_rule,
    gauss_jacobi_rule,
    gegenbauer,
    gegenbauer_all,
    gegenbauer_endpoint,
    gegenbauer_norm_sq,
    hermite,
    u_weighted,
)
from gegenexp.specfun import DomainError, beta, gamma


class TestGegenbauer:
    def test_degree_zero(self):
        assert gegenbauer(0.7, 0, 0.23) == 1.0

    def test_quadratic(self):
        # C_2 at parameter 1 is 4x^2 - 1
        assert gegenbauer(1.0, 2, 0.5) == pytest.approx(0.0, abs=1e-15)
        xs = np.linspace(-1, 1, 11)
        np.testing.assert_allclose(gegenbauer(1.0, 2, xs), 4 * xs**2 - 1, atol=1e-14)

    def test_endpoint_value(self):
        # C_n(1) = Gamma(n + 2 lam) / (n! Gamma(2 lam))
        assert gegenbauer(2.0, 3, 1.0) == pytest.approx(20.0, rel=1e-14)
        assert gegenbauer_endpoint(2.0, 3) == pytest.approx(20.0, rel=1e-14)
        assert gegenbauer_endpoint(0.8, 40) == pytest.approx(
            gamma(40 + 1.6) / (math.factorial(40) * gamma(1.6)), rel=1e-12
        )

    def test_lambda_domain(self):
        with pytest.raises(DomainError):
            gegenbauer(0.0, 2, 0.5)
        with pytest.raises(DomainError):
            gegenbauer(-0.6, 2, 0.5)

    def test_parity_exact(self):
        xs = np.linspace(0.0, 1.0, 101)
        for lam in (0.5, 1.0, 3.0):
            for n in (1, 4, 9, 16):
                left = gegenbauer(lam, n, -xs)
                right = (-1.0) ** n * gegenbauer(lam, n, xs)
                assert np.array_equal(left, right)

    def test_endpoint_bound(self):
        xs = np.linspace(-1.0, 1.0, 1001)
        for lam in (0.5, 1.0, 3.0):
            for n in range(31):
                sup = np.abs(gegenbauer(lam, n, xs)).max()
                assert sup <= gegenbauer_endpoint(lam, n) * (1.0 + 1e-12)

    def test_derivative_lowers_degree(self):
        # d/dx C_n = 2 lam C_{n-1} at the raised parameter
        h = 1e-5
        xs = np.linspace(-0.9, 0.9, 19)
        for lam in (0.6, 1.5, 2.5):
            for n in (1, 3, 8):
                fd = (gegenbauer(lam, n, xs + h) - gegenbauer(lam, n, xs - h)) / (2 * h)
                exact = 2.0 * lam * gegenbauer(lam + 1.0, n - 1, xs)
                np.testing.assert_allclose(fd, exact, rtol=1e-6, atol=1e-8)

    def test_all_matches_single(self):
        xs = np.linspace(-1, 1, 7)
        allv = gegenbauer_all(1.3, 10, xs)
        for n in range(11):
            np.testing.assert_array_equal(allv[n], gegenbauer(1.3, n, xs))


class TestNorms:
    def test_known_values(self):
        assert gegenbauer_norm_sq(1.0, 0) == pytest.approx(math.pi / 2, rel=1e-14)
        assert gegenbauer_norm_sq(1.0, 1) == pytest.approx(math.pi / 2, rel=1e-14)
        # parameter 1/2 gives the Legendre norms 2/(2n+1)
        assert gegenbauer_norm_sq(0.5, 2) == pytest.approx(0.4, rel=1e-13)

    def test_quadrature_oracle(self):
        rule = gauss_gegenbauer_rule(1.7, 48)
        vals = gegenbauer(1.7, 5, rule.nodes)
        quad = float(rule.weights @ (vals * vals))
        assert gegenbauer_norm_sq(1.7, 5) == pytest.approx(quad, rel=1e-13)


class TestWeighted:
    def test_center_values(self):
        # 2^(2 lam - 1) Gamma(lam) / Gamma(2 lam) = sqrt(pi) / Gamma(lam + 1/2)
        assert u_weighted(0.5, 0, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert u_weighted(1.0, 0, 0.0) == pytest.approx(2.0, rel=1e-14)
        assert u_weighted(3.0, 1, 0.0) == 0.0

    def test_odd_parity(self):
        assert u_weighted(1.2, 3, 0.4) == pytest.approx(-u_weighted(1.2, 3, -0.4), rel=1e-13)

    def test_rodrigues_form(self):
        # u_n(s) = (-1)^n 2^-n sqrt(pi)/Gamma(lam+n+1/2) d^n/ds^n (1-s^2)^(lam+n-1/2)
        lam = 1.0
        h = 3e-3

        def w(n, s):
            return (1.0 - s * s) ** (lam + n - 0.5)

        stencils = {
            0: ([0.0], [1.0]),
            1: ([-1.0, 1.0], [-0.5, 0.5]),
            2: ([-1.0, 0.0, 1.0], [1.0, -2.0, 1.0]),
            3: ([-2.0, -1.0, 1.0, 2.0], [-0.5, 1.0, -1.0, 0.5]),
        }
        for n in range(4):
            offs, coefs = stencils[n]
            for s in (-0.4, 0.1, 0.55):
                deriv = sum(c * w(n, s + o * h) for o, c in zip(offs, coefs)) / h**n
                pref = (-1.0) ** n * 2.0**-n * math.sqrt(math.pi) / gamma(lam + n + 0.5)
                assert u_weighted(lam, n, s) == pytest.approx(pref * deriv, rel=1e-4)


class TestHermite:
    def test_values(self):
        assert hermite(0, 0.3) == 1.0
        assert hermite(2, 1.0) == pytest.approx(2.0, abs=1e-14)
        assert hermite(3, 0.5) == pytest.approx(-5.0, abs=1e-14)

    def test_ultraspherical_limit(self):
        # n! lam^(-n/2) C_n(x / sqrt(lam)) -> H_n(x) for large lam; errors are
        # measured against the polynomial's scale on the grid since pointwise
        # relative error blows up at the Hermite zeros.
        lam = 1e6
        xs = np.linspace(-2, 2, 9)
        for n in range(7):
            ref = np.array([hermite(n, float(x)) for x in xs])
            approx = np.array(
                [
                    math.factorial(n)
                    * lam ** (-n / 2.0)
                    * gegenbauer(lam, n, float(x) / math.sqrt(lam))
                    for x in xs
                ]
            )
            scale = max(1.0, float(np.abs(ref).max()))
            assert np.abs(approx - ref).max() <= 1e-4 * scale


class TestRules:
    def test_midpoint_case(self):
        r = gauss_gegenbauer_rule(0.5, 1)
        np.testing.assert_allclose(r.nodes, [0.0], atol=1e-15)
        np.testing.assert_allclose(r.weights, [2.0], rtol=1e-14)

    def test_two_point_legendre(self):
        r = gauss_gegenbauer_rule(0.5, 2)
        np.testing.assert_allclose(
            r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-14
        )
        np.testing.assert_allclose(r.weights, [1.0, 1.0], rtol=1e-14)

    def test_total_mass(self):
        for lam, order in ((1.0, 9), (0.7, 33), (2.4, 16)):
            r = gauss_gegenbauer_rule(lam, order)
            assert float(r.weights.sum()) == pytest.approx(
                beta(0.5, lam + 0.5), rel=1e-13
            )
        assert float(gauss_jacobi_rule(-0.5, -0.5, 12).weights.sum()) == pytest.approx(
            math.pi, rel=1e-13
        )

    def test_nodes_symmetric_and_increasing(self):
        r = gauss_gegenbauer_rule(1.9, 25)
        assert np.all(np.diff(r.nodes) > 0)
        np.testing.assert_array_equal(r.nodes, -r.nodes[::-1])
        assert np.all(r.weights > 0)

    def test_orthogonality(self):
        for lam in (0.5, 1.0, 2.5):
            rule = gauss_gegenbauer_rule(lam, 64)
            c = gegenbauer_all(lam, 20, rule.nodes)
            gram = (c * rule.weights) @ c.T
            expect = np.diag([gegenbauer_norm_sq(lam, i) for i in range(21)])
            assert np.abs(gram - expect).max() < 1e-10

    def test_polynomial_exactness(self):
        # monomial moments against the beta closed form
        lam = 1.3
        q = 10
        rule = gauss_gegenbauer_rule(lam, q)
        for k in range(0, 2 * q, 2):
            quad = float(rule.weights @ rule.nodes**k)
            exact = beta((k + 1) / 2.0, lam + 0.5)
            assert quad == pytest.approx(exact, rel=1e-12)
        for k in range(1, 2 * q, 2):
            assert float(rule.weights @ rule.nodes**k) == pytest.approx(0.0, abs=1e-14)

    def test_hermite_rule_mass(self):
        r = gauss_hermite_rule(64)
        assert float(r.weights.sum()) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            gauss_jacobi_rule(-1.0, 0.0, 4)
        with pytest.raises(DomainError):
            gauss_jacobi_rule(0.0, 0.0, 0)
