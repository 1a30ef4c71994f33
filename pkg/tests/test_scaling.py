import random
from dataclasses import replace
from fractions import Fraction

import pytest
from mpmath import mp

from vptosc.optimizer import optimize, reexpansion_cached, scaling_polynomial_cached
from vptosc.reexpansion import OscillatorSpec, evaluate_wn, reexpand
from vptosc.scaling import (
    build_scaling_polynomial,
    combined_identity_residual,
    d2w_domega2,
    d2w_domega2_at_extremum,
    dw_domega,
    scaling_polynomial_from_series,
    term_identity_residual,
    verify_binomial_identity,
    verify_combined_identity,
    verify_term_identity,
)
from vptosc.series_core import RationalPolynomial, generate_bw_coefficients

from oracles import richardson_derivative


class TestBuildScalingPolynomial:
    def test_order_zero_constant_half(self):
        scal = build_scaling_polynomial(generate_bw_coefficients(4, 0), 0)
        assert scal.poly.coeffs == (Fraction(1, 2),)

    def test_quartic_first_order(self):
        scal = build_scaling_polynomial(generate_bw_coefficients(4, 1), 1)
        assert scal.poly.coeffs == (Fraction(-3, 2), Fraction(1, 4))

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_equals_derivative_construction(self, p):
        bw = generate_bw_coefficients(p, 13)
        for n in range(0, 13):
            explicit = build_scaling_polynomial(bw, n)
            derived = scaling_polynomial_from_series(bw, n)
            assert explicit.poly == derived.poly, (p, n)

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_degree_is_order(self, p):
        bw = generate_bw_coefficients(p, 20)
        for n in range(0, 21):
            assert build_scaling_polynomial(bw, n).poly.degree == n

    def test_insufficient_coefficients_rejected(self):
        bw = generate_bw_coefficients(4, 3)
        with pytest.raises(ValueError):
            build_scaling_polynomial(bw, 4)


class TestDwDomega:
    def test_zero_at_root(self):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        scal = scaling_polynomial_cached(4, 1)
        assert dw_domega(scal, spec, 2.0, dps=50) == 0

    def test_matches_finite_differences(self):
        rng = random.Random(42)
        with mp.workdps(70):
            for _ in range(25):
                p = rng.choice([4, 6])
                n = rng.randint(1, 10)
                spec = OscillatorSpec(
                    omega=rng.choice([0, 1, 2]),
                    g=Fraction(rng.uniform(0.1, 10)),
                    p=p,
                )
                om = mp.mpf(rng.uniform(0.5, 5))
                series = reexpansion_cached(p, n)
                scal = scaling_polynomial_cached(p, n)
                closed = dw_domega(scal, spec, om, dps=60)
                fd = richardson_derivative(
                    lambda x: evaluate_wn(series, spec, x, dps=60), om, om * mp.mpf("1e-8")
                )
                scale = max(abs(closed), abs(fd), mp.mpf("1e-30"))
                assert abs(closed - fd) / scale < mp.mpf("1e-8")


class TestSecondDerivative:
    def test_hand_value_at_anchor(self):
        # coupling^N * P_1'(6) * dsigma/dOmega = (1/8)(1/4)(11) = 11/32
        spec = OscillatorSpec(omega=1, g=1, p=4)
        scal = scaling_polynomial_cached(4, 1)
        value = d2w_domega2_at_extremum(scal, spec, Fraction(6), 2, dps=50)
        with mp.workdps(50):
            assert abs(value - mp.mpf(11) / 32) < mp.mpf("1e-45")

    def test_away_from_root_rejected(self):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        scal = scaling_polynomial_cached(4, 1)
        with pytest.raises(ValueError):
            d2w_domega2_at_extremum(scal, spec, Fraction(5), 2, dps=50)

    def test_general_formula_reduces_at_extremum(self):
        spec = OscillatorSpec(omega=1, g=1, p=4)
        scal = scaling_polynomial_cached(4, 1)
        a = d2w_domega2(scal, spec, 2.0, dps=50)
        b = d2w_domega2_at_extremum(scal, spec, Fraction(6), 2, dps=50)
        with mp.workdps(50):
            assert abs(a - b) < mp.mpf("1e-45")

    def test_matches_second_finite_difference_at_extrema(self):
        rng = random.Random(20240209)
        checked = 0
        with mp.workdps(70):
            while checked < 50:
                p = rng.choice([4, 6])
                n = rng.randint(1, 9)
                spec = OscillatorSpec(
                    omega=rng.choice([1, 2]), g=Fraction(rng.uniform(0.1, 10)), p=p
                )
                result = optimize(spec, n, dps=60)
                for cand in result.all_candidates:
                    if cand.kind != "extremum":
                        continue
                    scal = scaling_polynomial_cached(p, n)
                    closed = d2w_domega2_at_extremum(
                        scal, spec, cand.sigma, cand.omega_trial, dps=60
                    )
                    series = reexpansion_cached(p, n)
                    fd = richardson_derivative(
                        lambda x: evaluate_wn(series, spec, x, dps=60),
                        cand.omega_trial,
                        cand.omega_trial * mp.mpf("1e-6"),
                        order=2,
                    )
                    scale = max(abs(closed), abs(fd))
                    assert abs(closed - fd) / scale < mp.mpf("1e-6")
                    checked += 1

    def test_sign_matches_polynomial_slope(self):
        # positive prefactor: sign(d2W) = sign(P_N'(sigma) * dsigma/dOmega)
        spec = OscillatorSpec(omega=1, g=1, p=4)
        scal = scaling_polynomial_cached(4, 1)
        value = d2w_domega2_at_extremum(scal, spec, Fraction(6), 2, dps=40)
        # P_1' = 1/4 > 0 and dsigma/dOmega = 11 > 0 at Omega = 2
        assert value > 0


@pytest.fixture(scope="module")
def series12_by_p():
    return {p: reexpand(generate_bw_coefficients(p, 12), 12) for p in (4, 6, 8, 10)}


class TestIdentities:
    def test_term_identity_quartic_low_order(self, series12_by_p):
        assert verify_term_identity(series12_by_p[4], 1)

    def test_term_identity_high_power(self):
        series = reexpand(generate_bw_coefficients(10, 8), 8)
        assert verify_term_identity(series, 7)

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_term_identity_all_orders(self, series12_by_p, p):
        series = series12_by_p[p]
        for l in range(0, 12):
            assert verify_term_identity(series, l), l

    def test_term_identity_mutation_sensitivity(self, series12_by_p):
        series = series12_by_p[4]
        for l in (1, 5):
            bumped = list(series.e_polys[l + 1].coeffs)
            bumped[len(bumped) // 2] += 1
            polys = list(series.e_polys)
            polys[l + 1] = RationalPolynomial(bumped)
            mutated = replace(series, e_polys=tuple(polys))
            assert not verify_term_identity(mutated, l)
            assert not term_identity_residual(mutated, l).is_zero

    def test_index_out_of_range(self, series12_by_p):
        with pytest.raises(ValueError):
            verify_term_identity(series12_by_p[4], 12)
        with pytest.raises(ValueError):
            verify_term_identity(series12_by_p[4], -1)

    def test_binomial_identity_hand_case(self):
        # p=4, j=0, l=1: both sides equal -1/4
        assert verify_binomial_identity(4, 0, 1)

    def test_binomial_identity_sextic_case(self):
        assert verify_binomial_identity(6, 2, 3)

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_binomial_identity_exhaustive(self, p):
        for l in range(0, 13):
            for j in range(0, l + 1):
                assert verify_binomial_identity(p, j, l), (j, l)

    def test_binomial_identity_requires_j_le_l(self):
        with pytest.raises(ValueError):
            verify_binomial_identity(4, 3, 2)

    def test_combined_identity_lowest_order(self, series12_by_p):
        # l = 0 collapses to 2 e_1'(sigma) = -e_0
        series = series12_by_p[4]
        assert series.e_polys[1].derivative().coeffs == (Fraction(-1, 4),)
        assert verify_combined_identity(series, 0)

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_combined_identity_all_orders(self, series12_by_p, p):
        series = series12_by_p[p]
        for l in range(0, 12):
            assert verify_combined_identity(series, l), l

    def test_combined_identity_mutation_sensitivity(self, series12_by_p):
        series = series12_by_p[4]
        polys = list(series.e_polys)
        bumped = list(polys[3].coeffs)
        bumped[1] += 1
        polys[3] = RationalPolynomial(bumped)
        mutated = replace(series, e_polys=tuple(polys))
        assert not verify_combined_identity(mutated, 3)
        assert not combined_identity_residual(mutated, 3).is_zero


class TestUniversality:
    """Roots of P_N match direct extremization at any coupling (core claim)."""

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_sigma_images_of_direct_extrema_are_roots(self, n):
        from vptosc.oracle import direct_extremize_wn
        from vptosc.reexpansion import sigma_of
        from vptosc.rootisolation import real_roots

        poly = scaling_polynomial_cached(4, n).poly
        roots = real_roots(poly, dps=40) if poly.degree >= 1 else []
        series = reexpansion_cached(4, n)
        for omega, g in ((1, Fraction(1, 10)), (1, 1), (2, 10)):
            spec = OscillatorSpec(omega=omega, g=g, p=4)
            points = direct_extremize_wn(series, spec, n, dps=40)
            sigmas = sorted(sigma_of(spec, om, dps=40) for om, _ in points)
            assert len(sigmas) == len(roots)
            for s, r in zip(sigmas, roots):
                assert abs(s - r) <= mp.mpf("1e-8") * max(1, abs(r))
